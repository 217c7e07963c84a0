"""1/nu-variation estimators and the variation time change.

Three estimators of the p-variation with p = 1/nu:

* var_p_uniform  -- sum of |increments|**p over a uniform partition of the
  curve's parameter.
* var_no         -- parameterization-free: counts successive chords of
  spatial length dt**nu along the curve; value = (#chords)*dt.
* var_cap        -- var_p_uniform after reparameterizing the curve so that
  parameter t corresponds to half-plane capacity 2t.

The variation time change inverts the var_no accumulation along an SLE
trace, matching the dt used for the SAW-side rate estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .curves import ParamCurve
from .stats import EmpiricalCDF
from .zipper import CapacityProfile


@dataclass(frozen=True)
class VariationSample:
    value: float
    dt: float
    kind: str  # "uniform" | "no_param" | "capacity"
    p: float
    horizon: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("variation value must be >= 0")


def _uniform_partition(dt: float, horizon: float) -> np.ndarray:
    """0, dt, 2 dt, ... plus a final partial step up to the horizon when
    dt does not divide it."""
    if not 0 < dt <= horizon:
        raise ValueError("need 0 < dt <= horizon")
    m = int(np.floor(horizon / dt + 1e-9))
    ts = np.arange(m + 1) * dt
    ts[-1] = min(ts[-1], horizon)
    if ts[-1] < horizon * (1 - 1e-9):
        ts = np.append(ts, horizon)
    return ts


def var_p_uniform(curve: ParamCurve, p: float, dt: float,
                  horizon: float) -> VariationSample:
    """Sum of |X(j dt) - X((j-1) dt)|**p over the uniform partition of
    [0, horizon] (final increment truncated at the horizon)."""
    if curve.horizon < horizon - 1e-12:
        raise ValueError("curve shorter than requested horizon")
    ts = _uniform_partition(dt, horizon)
    pts = curve.point_at(ts)
    value = float(np.sum(np.abs(np.diff(pts)) ** p))
    return VariationSample(value, dt, "uniform", p, horizon)


@njit(cache=True)
def _chord_times(params, px, py, r, max_chords, times):
    """First-exit chord walk along a polyline.

    From the current point, finds the first parameter at which the chord
    from that point reaches spatial length r (exact quadratic solution
    per linear piece), repeatedly, storing completion parameters in
    `times`.  Returns the number of chords completed before the curve is
    exhausted or max_chords is reached.
    """
    nseg = len(params) - 1
    seg = 0
    u0 = 0.0  # fraction along the current segment
    cx = px[0]
    cy = py[0]
    count = 0
    while count < max_chords:
        found = False
        j = seg
        u_start = u0
        while j < nseg:
            ax = px[j]
            ay = py[j]
            dx = px[j + 1] - ax
            dy = py[j + 1] - ay
            ex = ax - cx
            ey = ay - cy
            a = dx * dx + dy * dy
            b = 2.0 * (dx * ex + dy * ey)
            c = ex * ex + ey * ey - r * r
            disc = b * b - 4.0 * a * c
            if a > 0.0 and disc >= 0.0:
                root = (-b + np.sqrt(disc)) / (2.0 * a)
                if root > u_start and root <= 1.0 + 1e-12:
                    u = min(root, 1.0)
                    cx = ax + u * dx
                    cy = ay + u * dy
                    times[count] = params[j] + u * (params[j + 1] - params[j])
                    count += 1
                    seg = j
                    u0 = u
                    found = True
                    break
            j += 1
            u_start = 0.0
        if not found:
            break
    return count


def _chord_walk(curve: ParamCurve, r: float, max_chords: int):
    times = np.empty(max_chords)
    n = _chord_times(curve.params, curve.points.real.copy(),
                     curve.points.imag.copy(), r, max_chords, times)
    return times[:n]


def _max_chords_bound(curve: ParamCurve, r: float) -> int:
    length = float(np.sum(np.abs(np.diff(curve.points))))
    return int(length / r) + 2


def var_no(curve: ParamCurve, dt: float, nu: float,
           horizon: float) -> VariationSample:
    """Parameterization-free variation: (#chords of length dt**nu
    completed at parameters <= horizon) * dt."""
    if curve.horizon < horizon - 1e-12:
        raise ValueError("curve shorter than requested horizon")
    r = dt ** nu
    times = _chord_walk(curve, r, _max_chords_bound(curve, r))
    n = int(np.searchsorted(times, horizon, side="right"))
    return VariationSample(n * dt, dt, "no_param", 1.0 / nu, horizon)


def var_cap(curve: ParamCurve, profile: CapacityProfile, dt: float, p: float,
            horizon: float) -> VariationSample:
    """var_p_uniform with the curve reparameterized by capacity.

    The capacity clock is normalized so that the accumulated capacity at
    the horizon corresponds to clock value `horizon`: clock time t sits
    at the curve parameter where hcap equals (t/horizon) * hcap(horizon).
    On an SLE trace (hcap = 2t natively) this reduces to var_p_uniform in
    the trace's own time.
    """
    if profile.s[-1] < horizon - 1e-12:
        raise ValueError("capacity profile does not cover the horizon")
    ts = _uniform_partition(dt, horizon)
    total = float(profile.capacity_at(horizon))
    s = np.interp(ts * (total / horizon), profile.h, profile.s)
    pts = curve.point_at(s)
    value = float(np.sum(np.abs(np.diff(pts)) ** p))
    return VariationSample(value, dt, "capacity", p, horizon)


def capacity_parameterized(curve: ParamCurve, profile: CapacityProfile,
                           n_samples: int, horizon: float) -> ParamCurve:
    """The curve resampled at n_samples+1 uniform capacity times in
    [0, horizon] (hcap = 2t)."""
    t = np.linspace(0.0, horizon, n_samples + 1)
    s = np.interp(2.0 * t, profile.h, profile.s)
    return ParamCurve(t, curve.point_at(s))


class TraceExhausted(ValueError):
    """var_no target not reached before the end of the curve."""


def variation_times(curve: ParamCurve, targets, dt: float, rate: float,
                    nu: float = 0.75) -> np.ndarray:
    """V_t for each target t: the parameter where the var_no accumulation
    at scale dt reaches rate*t (chord counts rounded up)."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    targets = np.asarray(targets, dtype=float)
    counts = np.ceil(rate * targets / dt - 1e-12).astype(int)
    nmax = int(counts.max())
    r = dt ** nu
    times = _chord_walk(curve, r, nmax)
    if len(times) < nmax:
        raise TraceExhausted(
            f"curve exhausted after {len(times)} chords; {nmax} needed "
            "(generate a longer trace)")
    out = np.where(counts > 0, times[np.maximum(counts, 1) - 1], 0.0)
    return out


def time_at_variation(curve: ParamCurve, target: float, dt: float,
                      nu: float, rate: float) -> float:
    """Parameter V with var_no(curve[0, V], dt) = rate*target, exactly at
    chord granularity; monotone in target."""
    if target == 0:
        return 0.0
    return float(variation_times(curve, [target], dt, rate, nu)[0])


def intersection_estimate(cdfs: list[tuple[float, EmpiricalCDF]],
                          grid_points: int = 2048) -> tuple[float, float]:
    """Common-crossing estimate of a variation constant.

    For each pair of CDFs, finds the abscissa where their difference
    changes sign (median of the crossings if there are several); returns
    (mean of pairwise crossings, max deviation from that mean).
    """
    if len(cdfs) < 2:
        raise ValueError("need at least two CDFs")
    dts = [dt for dt, _ in cdfs]
    if len(set(dts)) != len(dts):
        raise ValueError("CDFs must be at distinct dt")
    crossings = []
    for idx_a in range(len(cdfs)):
        for idx_b in range(idx_a + 1, len(cdfs)):
            a, b = cdfs[idx_a][1], cdfs[idx_b][1]
            lo = max(a.support()[0], b.support()[0])
            hi = min(a.support()[1], b.support()[1])
            if hi <= lo:
                raise ValueError("CDF supports do not overlap")
            grid = np.linspace(lo, hi, grid_points)
            d = a(grid) - b(grid)
            if np.all(d == 0):
                raise ValueError("identical CDFs have no isolated crossing")
            sign = np.sign(d)
            nz = sign != 0
            flips = np.nonzero(np.diff(sign[nz]) != 0)[0]
            if len(flips) == 0:
                raise ValueError("CDFs do not cross")
            xs = grid[nz]
            ds = d[nz]
            pair_crossings = []
            for f in flips:
                x0, x1 = xs[f], xs[f + 1]
                d0, d1 = ds[f], ds[f + 1]
                pair_crossings.append(x0 + (x1 - x0) * d0 / (d0 - d1))
            crossings.append(float(np.median(pair_crossings)))
    value = float(np.mean(crossings))
    spread = float(np.max(np.abs(np.array(crossings) - value)))
    return value, spread


def variance_vs_dt(groups: dict[float, np.ndarray]) -> tuple[list[tuple[float, float]], float]:
    """Per-dt sample variance and the log-log slope of variance vs dt."""
    if len(groups) < 3:
        raise ValueError("need at least three distinct dt values")
    rows = sorted((float(dt), float(np.var(np.asarray(v), ddof=1)))
                  for dt, v in groups.items())
    logs = np.log([r[0] for r in rows]), np.log([r[1] for r in rows])
    slope = float(np.polyfit(logs[0], logs[1], 1)[0])
    return rows, slope
