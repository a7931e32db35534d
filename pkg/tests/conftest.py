"""Shared fixtures and samplers for the test suite."""

import numpy as np
import pytest

from kleinian.hyperbolic import (
    Isometry,
    boost,
    identity_isometry,
    reorthogonalize,
    rotation,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def random_isometry(rng, dim, n_factors=6, scale=2.0):
    """Product of random boosts and rotations, cleaned up at the end.

    ``scale`` bounds each boost length, so the basepoint displacement is at
    most n_factors * scale (usually much less).
    """
    g = identity_isometry(dim)
    for _ in range(n_factors):
        if dim >= 2 and rng.random() < 0.5:
            i, j = rng.choice(np.arange(1, dim + 1), size=2, replace=False)
            g = g @ rotation(dim, int(i), int(j), rng.uniform(0.0, 2.0 * np.pi))
        else:
            axis = int(rng.integers(1, dim + 1))
            g = g @ boost(dim, axis, rng.uniform(-scale, scale))
    return Isometry(reorthogonalize(g.matrix), g.word)


def random_point(rng, dim, radius=3.0):
    """Random point at distance <= radius from the basepoint."""
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    r = rng.uniform(0.0, radius)
    coords = np.empty(dim + 1)
    coords[0] = np.cosh(r)
    coords[1:] = np.sinh(r) * direction
    return coords


def random_chain(rng, n_points, product_bound, gap_bound, dim=2, gap_spread=5.0):
    """Step chain whose gaps and interior Gromov products are known exactly.

    Each interior turn solves the hyperbolic law of cosines for a product
    target drawn in [0, product_bound].  The target sum is capped at 12 so
    downstream prefix products keep usable relative precision (each unit of
    Gromov product costs a factor e^2 of cancellation).  Returns
    (steps, gaps, targets); feed the steps straight to the chain checks.
    """
    gaps = rng.uniform(gap_bound, gap_bound + gap_spread, size=n_points - 1)
    targets = rng.uniform(0.0, product_bound, size=max(n_points - 2, 0))
    total = float(np.sum(targets))
    if total > 12.0:
        targets *= 12.0 / total
    steps = []
    turn = rotation(dim, 1, 2, rng.uniform(0.0, 2.0 * np.pi))
    for i, ell in enumerate(gaps):
        steps.append(turn @ boost(dim, 1, float(ell)))
        if i + 1 < gaps.shape[0]:
            d1, d2 = float(ell), float(gaps[i + 1])
            skip = d1 + d2 - 2.0 * float(targets[i])
            cos_phi = (np.cosh(d1) * np.cosh(d2) - np.cosh(skip)) / (
                np.sinh(d1) * np.sinh(d2)
            )
            phi = np.arccos(np.clip(cos_phi, -1.0, 1.0))
            turn = rotation(dim, 1, 2, np.pi - phi)
            if dim >= 3:
                turn = rotation(dim, 2, 3, rng.uniform(0.0, 2.0 * np.pi)) @ turn
    return steps, gaps, targets
