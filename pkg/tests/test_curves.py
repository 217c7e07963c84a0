import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sawsle
from sawsle import ParamCurve


def make_curve():
    params = np.array([0.0, 0.25, 0.5, 1.0])
    points = np.array([0.0, 1j, 1 + 1j, 2 + 3j])
    return ParamCurve(params, points)


def test_point_at_exact_at_samples():
    c = make_curve()
    for t, z in zip(c.params, c.points):
        assert c.point_at(t) == z


def test_point_at_interpolates_linearly():
    c = make_curve()
    assert c.point_at(0.125) == 0.5j
    mid = c.point_at(0.75)
    assert mid == pytest.approx((1 + 1j + 2 + 3j) / 2)


def test_point_at_vectorized_matches_scalar():
    c = make_curve()
    ts = np.linspace(0, 1, 17)
    vec = c.point_at(ts)
    assert np.allclose(vec, [c.point_at(t) for t in ts])


def test_point_at_out_of_range():
    c = make_curve()
    with pytest.raises(ValueError):
        c.point_at(1.5)
    with pytest.raises(ValueError):
        c.point_at(-0.1)


def test_horizon():
    assert make_curve().horizon == 1.0


def test_constructor_validation():
    with pytest.raises(ValueError):
        ParamCurve(np.array([0.1, 0.5]), np.array([0j, 1j]))  # not from 0
    with pytest.raises(ValueError):
        ParamCurve(np.array([0.0, 0.5, 0.5]), np.array([0j, 1j, 2j]))
    with pytest.raises(ValueError):
        ParamCurve(np.array([0.0]), np.array([0j]))
    with pytest.raises(ValueError):
        ParamCurve(np.array([0.0, 1.0]), np.array([0j, 1j, 2j]))


def test_rescaled():
    c = make_curve()
    d = c.rescaled(2.0)
    assert np.array_equal(d.params, c.params)
    assert np.allclose(d.points, 2.0 * c.points)
    with pytest.raises(ValueError):
        c.rescaled(-1.0)


def test_reparameterized_keeps_points():
    c = make_curve()
    d = c.reparameterized(np.array([0.0, 1.0, 2.0, 5.0]))
    assert np.array_equal(d.points, c.points)
    assert d.horizon == 5.0


def test_module_level_helpers():
    c = make_curve()
    assert sawsle.point_at(c, 0.5) == c.point_at(0.5)
    assert np.allclose(sawsle.rescale_curve(c, 3.0).points, 3.0 * c.points)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=30),
       st.floats(0.0, 1.0))
def test_point_at_stays_on_segment_hull(increments, frac):
    params = np.concatenate(([0.0], np.cumsum(increments)))
    rng = np.random.default_rng(int(1e6 * frac) + len(increments))
    points = np.cumsum(rng.standard_normal(len(params))
                       + 1j * rng.standard_normal(len(params)))
    c = ParamCurve(params, points)
    t = frac * c.horizon
    z = c.point_at(t)
    k = np.searchsorted(c.params, t, side="right") - 1
    k = min(k, len(params) - 2)
    a, b = c.points[k], c.points[k + 1]
    # interpolated point lies on the segment between its bracketing samples
    lo = min(a.real, b.real) - 1e-12
    hi = max(a.real, b.real) + 1e-12
    assert lo <= z.real <= hi
    lo = min(a.imag, b.imag) - 1e-12
    hi = max(a.imag, b.imag) + 1e-12
    assert lo <= z.imag <= hi
