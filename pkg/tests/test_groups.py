"""Builtin groups: ping-pong caps, cusp data, registry."""

import math

import numpy as np
import pytest

from kleinian.groups import (
    build_group,
    cyclic,
    punctured_torus,
    schottky,
    validate_schottky_caps,
)
from kleinian.hyperbolic import boundary_action, stable_arcosh
from kleinian.orbit import GroupSpec, enumerate_ball


def test_schottky_default_is_valid():
    spec = schottky()
    report = spec.metadata["ping_pong"]
    assert report["valid"]
    assert report["min_gap"] > 0.0
    assert report["min_margin"] > 0.0
    assert spec.free
    assert len(spec.generators) == 2


def test_schottky_three_dimensional():
    spec = schottky(2.4, dim=3)
    assert spec.dim == 3
    assert spec.metadata["ping_pong"]["valid"]
    # length-2 words reach down to 4.12, length-3 words start at 5.65
    ball = enumerate_ball(spec, 5.2)
    assert ball.n_members == 1 + 4 + 4 * 3  # identity, letters, reduced pairs


def test_schottky_rejects_short_translation():
    # caps of admissible radius stop existing below L = 2 atanh(cos pi/4)
    with pytest.raises(ValueError):
        schottky(1.5)


def test_schottky_cap_boundary_criterion():
    # cos(rho) = tanh(L/2) is the exact containment threshold for a boost:
    # just inside passes, just outside fails
    L = 2.2
    rho_crit = math.acos(math.tanh(L / 2.0))
    ok = schottky(L, cap_radius=rho_crit + 0.01)
    assert ok.metadata["ping_pong"]["min_margin"] > 0.0
    with pytest.raises(ValueError):
        schottky(L, cap_radius=rho_crit - 0.01)


def test_validate_requires_cap_data():
    spec = cyclic(1.0)
    with pytest.raises(ValueError):
        validate_schottky_caps(spec)


def test_boundary_action_of_boost_contracts_toward_axis():
    spec = schottky(2.2)
    g1 = spec.generators[0].matrix
    caps = spec.metadata["caps"]
    center, rho = caps[1]
    # a direction orthogonal to the axis maps well inside the attracting cap
    image = boundary_action(g1, np.array([0.0, 1.0]))
    image /= np.linalg.norm(image)
    angle = math.acos(float(np.clip(image @ center, -1, 1)))
    assert angle < rho


def test_punctured_torus_data():
    spec = punctured_torus()
    assert spec.free and spec.int_rep is not None
    assert spec.metadata["critical_exponent"] == 1.0
    norms = [stable_arcosh(g.matrix[0, 0]) for g in spec.generators]
    assert np.allclose(norms, math.acosh(3.5))
    # the commutator fixes the cusp direction on the boundary
    mats = {lab: m for lab, m, _ in spec.letters()}
    comm = mats[1] @ mats[2] @ mats[-1] @ mats[-2]
    cusp = spec.metadata["cusp_direction"]
    image = boundary_action(comm, cusp)
    assert np.allclose(image / np.linalg.norm(image), cusp, atol=1e-12)
    # parabolic: fixes no point inside, displacement has no positive lower
    # bound but the element is not the identity
    assert not np.allclose(comm, np.eye(3), atol=1e-6)


def test_cyclic_degenerate_data():
    spec = cyclic(0.8)
    assert spec.metadata["critical_exponent"] == 0.0
    dirs = spec.metadata["limit_directions"]
    assert dirs.shape == (2, 2)
    assert np.allclose(dirs[0], -dirs[1])
    with pytest.raises(ValueError):
        cyclic(0.0)


def test_build_group_registry():
    spec = build_group("cyclic", length=2.0)
    assert spec.name == "cyclic(t=2)"
    with pytest.raises(ValueError):
        build_group("nonesuch")


def test_caps_are_plausible_for_orbit_directions():
    """Every nontrivial orbit point should sit inside the cap of its
    leading letter; that is exactly what ping-pong gives."""
    spec = schottky(2.2)
    ball = enumerate_ball(spec, 9.0)
    caps = spec.metadata["caps"]
    idx = [i for i in ball.members if ball.word_length[i] > 0]
    for i in idx[:: max(1, len(idx) // 64)]:
        word = ball.word(i)
        center, rho = caps[word[0]]
        p = ball.orbit_points(np.array([i]))[0]
        u = p[1:] / np.linalg.norm(p[1:])
        assert math.acos(float(np.clip(u @ center, -1, 1))) <= rho + 1e-9
