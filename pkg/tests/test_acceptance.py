"""Acceptance suite: twelve end-to-end checks at full desk scale.

One test per criterion, in order.  The heavy Monte Carlo ensembles are
shared session fixtures (see ensembles.py); each cache records the
wall-clock seconds of its own construction, which is what the runtime
assertions check.  Tolerances are statistical targets, not best-case
numbers — a failure here means the physics or the statistics broke.
"""

import time

import numpy as np
import pytest
import scipy.stats

import sawsle
from sawsle.experiments import _cdf_batched, _cdf_iid

from . import ensembles, invariants

KAPPA = 8.0 / 3.0
NU = 0.75
P = 4.0 / 3.0


@pytest.fixture(scope="session")
def warmup():
    # compile/load the numba kernels so runtime assertions measure the
    # algorithms, not the JIT
    rng = np.random.default_rng(0)
    sawsle.sample_trace(KAPPA, 50, 1.0, rng, stride=5)
    sawsle.zip_points(1j * np.linspace(0, 1, 20))
    chain = sawsle.PivotChain(sawsle.init_walk(10), rng)
    chain.step(100)
    chain.run_codes(100, 10)


@pytest.fixture(scope="session")
def saw_small():
    return ensembles.saw_small()


@pytest.fixture(scope="session")
def saw_large():
    return ensembles.saw_large()


@pytest.fixture(scope="session")
def saw_cap():
    return ensembles.saw_cap()


@pytest.fixture(scope="session")
def sle_end():
    return ensembles.sle_end()


@pytest.fixture(scope="session")
def sle_hat():
    return ensembles.sle_hat()


def _compare_cdfs(saw_vals, sle_vals, n_batches=100):
    """(diff, stderr) of SAW-minus-SLE CDFs on a pooled grid."""
    grid = np.linspace(min(saw_vals.min(), sle_vals.min()),
                       max(saw_vals.max(), sle_vals.max()), 512)
    F_saw, e_saw = _cdf_batched(saw_vals, grid, n_batches)
    F_sle, e_sle = _cdf_iid(sle_vals, grid)
    return F_saw - F_sle, np.sqrt(e_saw ** 2 + e_sle ** 2)


def test_criterion_01_loewner_exactness(warmup):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    trace = sawsle.sample_trace(0.0, 10_000, 1.0, rng, stride=10)
    elapsed = time.perf_counter() - start
    assert abs(trace.points[-1] - 2j) <= 1e-2
    assert elapsed < 1.0


def test_criterion_02_capacity_roundtrip():
    data = ensembles.zip_roundtrip()
    rel = np.abs(data["hs"] - 2 * data["ts"]) / (2 * data["ts"])
    assert rel.max() <= 0.02
    assert float(data["build_seconds"]) < 300


def test_criterion_03_analytic_capacities():
    for L in (0.4, 1.0, 2.0):
        _, caps = sawsle.zip_points(1j * np.linspace(0, L, 300),
                                    kind="segment")
        assert abs(caps.sum() - L * L / 2) <= 1e-6 * (L * L / 2)
    theta = np.linspace(np.pi, 0.01, 2000)
    semi = 1 + np.exp(1j * theta)
    semi[0] = 0.0
    _, caps = sawsle.zip_points(semi)
    assert abs(caps.sum() - 1.0) <= 5e-3
    _, base = sawsle.zip_points(semi[:500])
    for r in (0.37, 2.5):
        _, scaled = sawsle.zip_points(r * semi[:500])
        assert abs(scaled.sum() - r * r * base.sum()) <= 1e-8 * r * r * base.sum()


def test_criterion_04_saw_exponent():
    data = ensembles.saw_scaling()
    slope = np.polyfit(np.log(data["lengths"]), np.log(data["means"]), 1)[0]
    assert abs(slope - 1.50) <= 0.02
    assert float(data["build_seconds"]) < 600


def test_criterion_05_pivot_uniformity(warmup):
    rng = np.random.default_rng(7)
    chain = sawsle.PivotChain(sawsle.init_walk(6), rng)
    chain.equilibrate(1_000)
    # stride 10 decorrelates successive states; stride 5 leaves enough
    # autocorrelation to inflate the chi-square statistic at 10^6 samples
    codes = chain.run_codes(1_000_000, observe_every=10)
    universe = sorted(sawsle.enumerate_half_plane_saws(6))
    counts = np.array([np.sum(codes == c) for c in universe])
    assert counts.sum() == len(codes)
    _, p = scipy.stats.chisquare(counts)
    assert p > 0.01


def test_criterion_06_lattice_resolution_identity(warmup):
    rng = np.random.default_rng(6)
    chain = sawsle.PivotChain(sawsle.init_walk(2_000), rng)
    chain.step(5_000)
    curve = sawsle.scaled_path(chain.walk, 2_000, NU)
    value = sawsle.var_p_uniform(curve, P, 1.0 / 2_000, 1.0).value
    assert value == pytest.approx(1.0, abs=1e-12)


def test_criterion_07_variation_constants(saw_large, saw_cap):
    cdfs = lambda mat, dts: [(dt, sawsle.ecdf(mat[:, k]))
                             for k, dt in enumerate(dts)]
    var_c, _ = sawsle.intersection_estimate(
        cdfs(saw_large["var"], saw_large["dts"]))
    var_no_c, _ = sawsle.intersection_estimate(
        cdfs(saw_large["var_no"], saw_large["dts"]))
    var_cap_c, _ = sawsle.intersection_estimate(
        cdfs(saw_cap["vcap"], saw_cap["dts"]))
    assert abs(var_c - 0.987) <= 0.01
    assert abs(var_no_c - 0.972) <= 0.01
    assert abs(var_cap_c - 0.92) <= 0.03
    assert var_c > var_no_c > var_cap_c
    assert float(saw_large["build_seconds"]) < 1800
    assert float(saw_cap["build_seconds"]) < 7200


def test_criterion_08_variance_scaling(saw_large):
    dts = saw_large["dts"]
    for kind in ("var", "var_no"):
        groups = {dt: saw_large[kind][:, k] for k, dt in enumerate(dts)}
        _, slope = sawsle.variance_vs_dt(groups)
        assert abs(slope - 1.0) <= 0.1


def test_criterion_09_capacity_matched_agreement(saw_small, sle_end):
    r_saw, th_saw = sawsle.polar_arrays(saw_small["end_hat"])
    r_sle, th_sle = sawsle.polar_arrays(sle_end["end"])
    for s_vals, g_vals in ((r_saw, r_sle), (th_saw, th_sle)):
        diff, err = _compare_cdfs(s_vals, g_vals)
        assert np.all(np.abs(diff) <= np.maximum(0.01, 3 * err))


def test_criterion_10_mismatch_positive_control(saw_large, sle_end):
    # natural-time SAW endpoint vs capacity-time SLE endpoint, radial
    # parts normalized to mean one: distributions must differ visibly
    r_saw = sawsle.normalize_by_mean(np.abs(saw_large["end"]))
    r_sle = sawsle.normalize_by_mean(np.abs(sle_end["end"]))
    diff, _ = _compare_cdfs(r_saw, r_sle)
    assert np.max(np.abs(diff)) >= 0.05


def test_criterion_11_variation_matched_agreement(saw_large, saw_small,
                                                  sle_hat):
    # mean capacity when the SLE variation clock reaches 1 (hcap = 2t)
    mean_hcap = 2.0 * sle_hat["v1"].mean(axis=1)
    assert np.all(np.abs(mean_hcap - 0.5) <= 0.05)

    # Theta-difference curves for two dt agree within 2 stderr
    th_saw = np.angle(saw_large["end"])
    diffs, errs = [], []
    grid = np.linspace(0.0, np.pi, 512)
    F_saw, e_saw = _cdf_batched(th_saw, grid, 100)
    for k in range(len(sle_hat["dts"])):
        F_sle, e_sle = _cdf_iid(np.angle(sle_hat["end"][k]), grid)
        diffs.append(F_saw - F_sle)
        errs.append(np.sqrt(e_saw ** 2 + e_sle ** 2))
    gap = np.abs(diffs[0] - diffs[1])
    assert np.all(gap <= 2 * np.sqrt(errs[0] ** 2 + errs[1] ** 2) + 1e-12)

    # covariance vertical scales: capacity-time vs natural-time SAW
    grid_times = ensembles.GRID

    def vertical_scale(pts):
        return max(np.abs(sawsle.covariance_profile(
            grid_times, pts, pts[:, -1], i, i).values).max()
            for i in (1, 2))

    factor = (vertical_scale(saw_small["grid_hat"])
              / vertical_scale(saw_large["grid_pts"]))
    assert abs(factor - 4.0) <= 0.5


def test_criterion_12_property_suites():
    start = time.perf_counter()
    for check in invariants.ALL_CHECKS:
        check(cases=1000)
    assert time.perf_counter() - start < 60.0
