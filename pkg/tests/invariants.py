"""Randomized invariant checks, one per module family.

Each check runs `cases` independent randomized trials and raises
AssertionError on the first violation.  They are exercised by the unit
test modules and timed as a block by the acceptance suite.
"""

from __future__ import annotations

import numpy as np

import sawsle


def check_walk_validity(cases: int = 1000, seed: int = 101) -> None:
    """Pivot moves preserve every Walk invariant (length, unit steps,
    origin start, y >= 1, self-avoidance)."""
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        n = int(rng.integers(2, 40))
        walk = sawsle.init_walk(n)
        for _ in range(int(rng.integers(1, 8))):
            walk, _accepted = sawsle.pivot_step(walk, rng)
        assert walk.n == n
        walk.check()


def check_cdf_monotone(cases: int = 1000, seed: int = 102) -> None:
    """Empirical CDFs are nondecreasing, live in [0, 1], and hit 0/1
    outside the sample support."""
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        m = int(rng.integers(1, 60))
        samples = rng.standard_normal(m) * rng.uniform(0.1, 5.0)
        F = sawsle.ecdf(samples)
        lo, hi = F.support()
        grid = np.sort(rng.uniform(lo - 1.0, hi + 1.0, 80))
        vals = F(grid)
        assert np.all(np.diff(vals) >= 0)
        assert np.all((vals >= 0) & (vals <= 1))
        assert F(lo - 1e-9) == 0.0
        assert F(hi) == 1.0


def _random_curve(rng, n_points: int) -> sawsle.ParamCurve:
    params = np.concatenate(([0.0], np.sort(rng.uniform(0, 1, n_points - 2)),
                             [1.0]))
    params = np.unique(params)
    m = len(params)
    points = np.cumsum(rng.standard_normal(m) + 1j * rng.standard_normal(m))
    points -= points[0]
    return sawsle.ParamCurve(params, points)


def check_var_no_reparam(cases: int = 1000, seed: int = 103) -> None:
    """var_no over the whole curve depends only on the image, not on the
    parameterization."""
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        curve = _random_curve(rng, int(rng.integers(4, 40)))
        dt = float(rng.uniform(0.02, 0.3))
        before = sawsle.var_no(curve, dt, 0.75, curve.horizon).value
        new_params = np.concatenate(
            ([0.0], np.cumsum(rng.uniform(0.1, 2.0, len(curve.params) - 1))))
        new_params *= curve.horizon / new_params[-1]
        reparam = curve.reparameterized(new_params)
        after = sawsle.var_no(reparam, dt, 0.75, reparam.horizon).value
        assert before == after


def _random_simple_points(rng, n_points: int) -> np.ndarray:
    # strictly increasing imaginary part makes the polyline simple
    x = np.cumsum(0.7 * rng.standard_normal(n_points))
    y = np.cumsum(rng.uniform(0.5, 1.5, n_points))
    pts = (x - x[0]) + 1j * (y - y[0])
    pts[0] = 0.0
    return pts


def check_capacity_additivity(cases: int = 1000, seed: int = 104) -> None:
    """Composed capacity is additive: the profile of a prefix equals the
    prefix of the profile, and capacity scales as r**2."""
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        pts = _random_simple_points(rng, int(rng.integers(4, 10)))
        knots, caps = sawsle.zip_points(pts)
        m = int(rng.integers(2, len(pts)))
        knots_m, caps_m = sawsle.zip_points(pts[:m])
        k = len(knots_m)
        assert np.array_equal(knots[:k], knots_m)
        np.testing.assert_allclose(caps[:k], caps_m, rtol=1e-10)
        r = float(rng.uniform(0.3, 3.0))
        _, caps_r = sawsle.zip_points(r * pts)
        np.testing.assert_allclose(caps_r.sum(), r * r * caps.sum(),
                                   rtol=1e-7)


ALL_CHECKS = (check_walk_validity, check_cdf_monotone,
              check_var_no_reparam, check_capacity_additivity)
