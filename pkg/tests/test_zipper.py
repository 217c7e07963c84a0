import numpy as np
import pytest

import sawsle
from sawsle import CapacityProfile, ZipperError

from .invariants import check_capacity_additivity


def vertical_slit(L, n=200):
    return 1j * np.linspace(0.0, L, n)


def semicircle(n=500, cutoff=0.01):
    # unit semicircle centered at 1, traversed from the origin; encloses
    # the half-disk of radius 1, whose half-plane capacity is exactly 1
    th = np.linspace(np.pi, cutoff, n)
    pts = 1 + np.exp(1j * th)
    pts[0] = 0.0
    return pts


def test_vertical_slit_capacity_closed_form():
    for L in (0.3, 1.0, 2.7):
        for kind in ("arc", "segment"):
            _, caps = sawsle.zip_points(vertical_slit(L), kind=kind)
            assert caps.sum() == pytest.approx(L * L / 2, rel=1e-9)


def test_semicircle_capacity():
    _, caps = sawsle.zip_points(semicircle())
    assert caps.sum() == pytest.approx(1.0, rel=5e-3)


def test_capacity_scaling_r_squared():
    pts = semicircle(300)
    _, base = sawsle.zip_points(pts)
    for r in (0.37, 2.5):
        _, caps = sawsle.zip_points(r * pts)
        assert caps.sum() == pytest.approx(r * r * base.sum(), rel=1e-8)


def test_arc_and_segment_kinds_agree_on_smooth_curve():
    pts = semicircle(400)
    _, a = sawsle.zip_points(pts, kind="arc")
    _, s = sawsle.zip_points(pts, kind="segment")
    assert a.sum() == pytest.approx(s.sum(), rel=1e-3)


def test_elementary_map_roundtrip():
    rng = np.random.default_rng(6)
    for maker in (sawsle.elementary_arc_map, sawsle.elementary_segment_map):
        for _ in range(50):
            w = rng.normal() + 1j * abs(rng.normal()) + 0.05j
            fmap = maker(w)
            # inverse maps H onto the slit-removed domain; forward undoes it
            z = rng.normal() + 1j * (abs(rng.normal()) + 0.5)
            img = fmap.inverse(z)
            assert img.imag > 0
            assert abs(fmap.forward(img) - z) < 1e-8 * max(1.0, abs(z))
    # the arc map sends the tip of the removed piece to 0
    amap = sawsle.elementary_arc_map(0.3 + 1.1j)
    assert abs(amap.forward(0.3 + 1.1j)) < 1e-6


def test_self_touching_curve_raises():
    # the curve returns to a point it already visited
    pts = np.array([0.0, 1j, 1 + 1j, 1 + 2j, 2j, 1j])
    with pytest.raises(ZipperError):
        sawsle.zip_points(pts)


def test_drop_touching_skips_instead():
    pts = np.array([0.0, 1j, 1 + 1j, 1 + 2j, 2j, 1j, -1 + 1j])
    knots, caps = sawsle.zip_points(pts, drop_touching=True)
    assert len(knots) == len(caps)
    assert np.all(caps > 0)


def test_capacity_budget_stops_early():
    pts = vertical_slit(2.0, 400)
    knots, caps = sawsle.zip_points(pts, capacity_budget=0.5)
    total = caps.sum()
    assert total >= 0.5
    assert total < 2.0  # well short of the full slit capacity
    assert knots[-1] < 399


def test_chord_spacing_decimates_but_keeps_capacity():
    pts = semicircle(2000)
    _, dense = sawsle.zip_points(pts)
    knots, coarse = sawsle.zip_points(pts, chord_spacing=0.05)
    assert len(knots) < 200
    assert coarse.sum() == pytest.approx(dense.sum(), rel=5e-3)


def test_zip_curve_profile_is_monotone_inverse_pair():
    pts = semicircle(300)
    curve = sawsle.ParamCurve(np.linspace(0, 1, len(pts)), pts)
    total, profile = sawsle.zip_curve(curve)
    assert total == pytest.approx(1.0, rel=5e-3)
    assert np.all(np.diff(profile.h) > 0)
    assert np.all(np.diff(profile.s) > 0)
    for target in (0.1, 0.35, 0.8):
        s = profile.time_at_capacity(target)
        assert profile.capacity_at(s) == pytest.approx(target, rel=1e-9)
    assert sawsle.time_at_capacity(profile, 0.35) == profile.time_at_capacity(0.35)


def test_profile_validation():
    with pytest.raises(ValueError):
        CapacityProfile(np.array([0.0, 1.0]), np.array([0.0, -1.0]))


def test_capacity_additivity_property():
    check_capacity_additivity(cases=300)


def test_needs_two_points_starting_at_zero():
    with pytest.raises(ValueError):
        sawsle.zip_points(np.array([0.0 + 0j]))
    with pytest.raises(ValueError):
        sawsle.zip_points(np.array([1.0 + 0j, 1 + 1j]))
