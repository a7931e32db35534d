"""Tools for discrete groups of hyperbolic isometries.

The package works in the hyperboloid model of hyperbolic d-space sitting
inside Minkowski space R^{d,1}.  It provides

* exact-form geometry primitives (distances, Gromov products, geodesics),
* breadth-first orbit enumeration with growth-exponent estimation,
* quantitative chain/fellow-traveling certificates for quasi-geodesics,
* construction of free subsemigroups whose Poincare series diverge at
  truncation, following a ping-pong discipline,
* atomic measures weighted by orbit norms together with shadow estimates,
* box-counting dimension of radial limit-direction samples,

plus a small CLI that runs the pipeline from a text config and writes JSON
reports, CSV dumps and matplotlib figures.
"""

from .hyperbolic import (
    Point,
    BoundaryPoint,
    Isometry,
    minkowski_inner,
    distance,
    gromov_product,
    geodesic_point,
    visual_angle,
    boundary_direction,
    validate_isometry,
    reorthogonalize,
    boost,
    rotation,
    identity_isometry,
)
from .orbit import (
    GroupSpec,
    OrbitBall,
    CriticalExponentEstimate,
    EnumerationBudgetError,
    enumerate_ball,
    poincare_partial,
    estimate_critical_exponent,
    separated_net,
    orbit_distance,
)
from .groups import (
    schottky,
    punctured_torus,
    cyclic,
    build_group,
    validate_schottky_caps,
)
from .chains import (
    ChainParams,
    ChainCertificate,
    ChainRegimeError,
    ShadowingReport,
    ShadowingViolation,
    chain_points,
    check_chain,
    chain_shadowing,
    fellow_travel_check,
    nearest_point_on_geodesic,
)
from .semigroup import (
    SemigroupError,
    PairNotFoundError,
    FeasibilityError,
    FactCounterexampleError,
    LemmaCounterexampleError,
    StageConditionError,
    PingPongPair,
    PropertyACertificate,
    SeedAlphabet,
    TruncatedFamily,
    SemigroupStage,
    DeepElementWitness,
    DeepElementQuery,
    find_ping_pong_pair,
    check_property_A,
    phi_map,
    concat_F,
    concatenate_certificates,
    build_seed_alphabet,
    family_separation,
    find_deep_element,
    build_stage,
)
from .measure import (
    MeasureError,
    ExponentRegimeError,
    HorizonError,
    PSAtomSet,
    Shadow,
    ConicalProfile,
    ps_atoms,
    shadow_contains,
    apex_products,
    shadow_principle_report,
    quasi_invariance_report,
    shadow_nesting_report,
    conical_profile,
    myrberg_witness,
    shadow_tail_report,
    sublinear_shadow_tail,
    write_atoms_csv,
    write_profile_csv,
)

__all__ = [
    "Point",
    "BoundaryPoint",
    "Isometry",
    "minkowski_inner",
    "distance",
    "gromov_product",
    "geodesic_point",
    "visual_angle",
    "boundary_direction",
    "validate_isometry",
    "reorthogonalize",
    "boost",
    "rotation",
    "identity_isometry",
    "GroupSpec",
    "OrbitBall",
    "CriticalExponentEstimate",
    "EnumerationBudgetError",
    "enumerate_ball",
    "poincare_partial",
    "estimate_critical_exponent",
    "separated_net",
    "orbit_distance",
    "schottky",
    "punctured_torus",
    "cyclic",
    "build_group",
    "validate_schottky_caps",
    "ChainParams",
    "ChainCertificate",
    "ChainRegimeError",
    "ShadowingReport",
    "ShadowingViolation",
    "chain_points",
    "check_chain",
    "chain_shadowing",
    "fellow_travel_check",
    "nearest_point_on_geodesic",
    "SemigroupError",
    "PairNotFoundError",
    "FeasibilityError",
    "FactCounterexampleError",
    "LemmaCounterexampleError",
    "StageConditionError",
    "PingPongPair",
    "PropertyACertificate",
    "SeedAlphabet",
    "TruncatedFamily",
    "SemigroupStage",
    "DeepElementWitness",
    "DeepElementQuery",
    "find_ping_pong_pair",
    "check_property_A",
    "phi_map",
    "concat_F",
    "concatenate_certificates",
    "build_seed_alphabet",
    "family_separation",
    "find_deep_element",
    "build_stage",
    "MeasureError",
    "ExponentRegimeError",
    "HorizonError",
    "PSAtomSet",
    "Shadow",
    "ConicalProfile",
    "ps_atoms",
    "shadow_contains",
    "apex_products",
    "shadow_principle_report",
    "quasi_invariance_report",
    "shadow_nesting_report",
    "conical_profile",
    "myrberg_witness",
    "shadow_tail_report",
    "sublinear_shadow_tail",
    "write_atoms_csv",
    "write_profile_csv",
]

__version__ = "0.1.0"
