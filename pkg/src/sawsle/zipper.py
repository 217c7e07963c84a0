"""Half-plane capacity of simple curves by sequential unzipping.

Each step removes the first remaining piece of the curve with an
elementary conformal map (circular arc orthogonal to the real axis by
default, straight segment as a cross-check variant), sends the removed
tip to 0, and applies the map to all remaining points.  Total capacity is
the sum of the elementary capacity increments.

For the arc to w = x+iy the map is T(v(m(z)))/c with
    m(z) = z/(1 - z x/|w|**2)       (straightens the arc to a vertical slit)
    v(s) = sqrt(s**2 + h**2),  h = |w|**2/y
    T(s) = q s/(q - s),  q = v(m(inf))
and scale c chosen so the derivative at infinity is 1.  The capacity
increment then comes out in closed form: x**2/4 + y**2/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .curves import ParamCurve, rescale_curve  # noqa: F401  (re-export)

SELF_TOUCH_FLOOR = 1e-14
_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 200


class ZipperError(ValueError):
    """Curve cannot be unzipped further (self-touching at resolution)."""

    def __init__(self, message, index=None, point=None):
        super().__init__(message)
        self.index = index
        self.point = point


@dataclass(frozen=True)
class CapacityProfile:
    """Monotone map from curve parameter to accumulated half-plane capacity."""

    s: np.ndarray  # curve parameters of the knots, s[0] = 0
    h: np.ndarray  # accumulated capacity, h[0] = 0, strictly increasing

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if s[0] != 0 or h[0] != 0:
            raise ValueError("profile must start at (0, 0)")
        if not (np.all(np.diff(s) > 0) and np.all(np.diff(h) > 0)):
            raise ValueError("profile knots must be strictly increasing")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "h", h)

    @property
    def total(self) -> float:
        return float(self.h[-1])

    def capacity_at(self, s):
        return np.interp(s, self.s, self.h)

    def time_at_capacity(self, target):
        """Smallest curve parameter with interpolated capacity >= target."""
        target = np.asarray(target, dtype=float)
        if np.any(target < 0) or np.any(target > self.h[-1] * (1 + 1e-12)):
            raise ValueError(
                f"capacity target outside [0, {self.h[-1]}]; zip a longer curve")
        out = np.interp(target, self.h, self.s)
        return float(out) if out.ndim == 0 else out


def time_at_capacity(profile: CapacityProfile, target):
    return profile.time_at_capacity(target)


# ----------------------------------------------------------------------
# elementary maps
# ----------------------------------------------------------------------

@njit(cache=True, inline="always")
def _sqrt_h(w):
    """Square root with nonnegative imaginary part."""
    s = np.sqrt(w)
    if s.imag < 0:
        s = -s
    return s


@njit(cache=True, inline="always")
def _arc_params(x, y):
    """(a, h, q, c) for the arc map to x+iy; a = inf signalled by x == 0."""
    r2 = x * x + y * y
    h = r2 / y
    if x == 0.0:
        return 0.0, h, 0.0, 1.0
    a = r2 / x
    q2 = a * a + h * h
    q = -np.sign(a) * np.sqrt(q2)
    c = np.sqrt(q2) ** 3 / abs(a) ** 3
    return a, h, q, c


@njit(cache=True, inline="always")
def _arc_forward_one(z, x, y, a, h, q, c):
    if x == 0.0:
        return _sqrt_h(z * z + h * h)
    m = a * z / (a - z)
    v = _sqrt_h(m * m + h * h)
    return q * v / (q - v) / c


@njit(cache=True)
def _zip_arc(points, caps, images, budget, used, drop_touching, min_spacing):
    """Unzip `points` (points[0] == 0) with arc maps.

    caps[i] receives the capacity increment of the step removing the
    piece ending at points[i+1]; used[i+1] records whether that point
    became a knot.  With drop_touching, points whose image has fallen
    onto the real axis are skipped instead of raising; otherwise the
    offending index is returned.  Points whose image lies within
    min_spacing of the tip are skipped (except the last): resolving
    features below that scale drives the composed map's derivative past
    what double precision can represent.  Stops early once the
    accumulated capacity reaches `budget` (pass inf for the whole
    curve).  Returns (last point index processed, error index or -1).
    """
    n = len(points) - 1
    for j in range(1, n + 1):
        images[j] = points[j]
        used[j] = False
    total = 0.0
    cap_max = 0.0
    for i in range(n):
        w = images[i + 1]
        x = w.real
        y = w.imag
        cap = 0.25 * x * x + 0.5 * y * y
        # an increment too small to advance the running total is a touch;
        # one vastly larger than anything seen is a branch artifact of a
        # near-touch upstream -- both poison the composition if applied
        if y <= SELF_TOUCH_FLOOR or cap <= total * 1e-15:
            if drop_touching:
                continue
            return i, i + 1
        if drop_touching and 0.0 < cap_max < 1e-3 * cap:
            continue
        if i + 1 < n and x * x + y * y < min_spacing * min_spacing:
            continue
        if abs(x) < 1e-14 * y:
            x = 0.0
        a, h, q, c = _arc_params(x, y)
        caps[i] = cap
        used[i + 1] = True
        total += cap
        if cap > cap_max:
            cap_max = cap
        for j in range(i + 2, n + 1):
            z = _arc_forward_one(images[j], x, y, a, h, q, c)
            if z.imag < 0.0:
                # rounding can push a near-axis image below R; reflect back
                z = complex(z.real, -z.imag)
            images[j] = z
        if total >= budget:
            return i + 1, -1
    return n, -1


@njit(cache=True, inline="always")
def _segment_params(x, y):
    """(alpha, aa, bb, ztip) for the tilted-slit map to x+iy."""
    alpha = np.arctan2(y, x) / np.pi
    rho = np.hypot(x, y)
    s = rho / ((1.0 - alpha) ** (1.0 - alpha) * alpha ** alpha)
    aa = alpha * s
    bb = (1.0 - alpha) * s
    ztip = (1.0 - alpha) * bb - alpha * aa  # critical point, f(ztip) = tip
    return alpha, aa, bb, ztip


@njit(cache=True, inline="always")
def _segment_inverse_one(z, alpha, aa, bb, ztip):
    """f(z + ztip): H -> H minus the straight slit, tip -> handled by caller."""
    zz = z + ztip
    return np.exp((1.0 - alpha) * np.log(zz + aa) + alpha * np.log(zz - bb))

_SEG_NEWTON_FAIL = -1


@njit(cache=True)
def _segment_forward_one(target, alpha, aa, bb, ztip):
    """Solve f(z) = target by damped Newton; returns z - ztip (recentred).

    Returns complex(nan) on non-convergence.
    """
    # initial guess from the arc map with the same endpoints
    tip = np.exp((1.0 - alpha) * np.log(complex(ztip + aa))
                 + alpha * np.log(complex(ztip - bb)))
    x = tip.real
    y = tip.imag
    a_, h_, q_, c_ = _arc_params(x, y)
    z = _arc_forward_one(target, x, y, a_, h_, q_, c_) + ztip
    if z.imag <= 0:
        z = complex(z.real, 1e-9)
    fz = np.exp((1.0 - alpha) * np.log(z + aa) + alpha * np.log(z - bb))
    err = abs(fz - target)
    scale = abs(target) + 1.0
    for _ in range(_NEWTON_MAXIT):
        if err <= _NEWTON_TOL * scale:
            return z - ztip
        deriv = fz * ((1.0 - alpha) / (z + aa) + alpha / (z - bb))
        step = (fz - target) / deriv
        lam = 1.0
        improved = False
        for _ in range(60):
            znew = z - lam * step
            if znew.imag > 0:
                fnew = np.exp((1.0 - alpha) * np.log(znew + aa)
                              + alpha * np.log(znew - bb))
                if abs(fnew - target) < err:
                    z = znew
                    fz = fnew
                    err = abs(fnew - target)
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            return complex(np.nan, np.nan)
    if err <= _NEWTON_TOL * scale:
        return z - ztip
    return complex(np.nan, np.nan)


@njit(cache=True)
def _zip_segment(points, caps, images, budget, used, drop_touching, min_spacing):
    """Unzip with straight-segment maps (Newton forward evaluation).

    Error codes: positive index = self-touch at that point; the same index
    with caps[i] set to nan marks a Newton failure.
    """
    n = len(points) - 1
    for j in range(1, n + 1):
        images[j] = points[j]
        used[j] = False
    total = 0.0
    cap_max = 0.0
    for i in range(n):
        w = images[i + 1]
        x = w.real
        y = w.imag
        cap = 0.25 * x * x + 0.5 * y * y
        if y <= SELF_TOUCH_FLOOR or cap <= total * 1e-15:
            if drop_touching:
                continue
            return i, i + 1
        if drop_touching and 0.0 < cap_max < 1e-3 * cap:
            continue
        if i + 1 < n and x * x + y * y < min_spacing * min_spacing:
            continue
        if cap > cap_max:
            cap_max = cap
        alpha, aa, bb, ztip = _segment_params(x, y)
        s = aa + bb
        caps[i] = 0.5 * alpha * (1.0 - alpha) * s * s
        used[i + 1] = True
        total += caps[i]
        for j in range(i + 2, n + 1):
            z = _segment_forward_one(images[j], alpha, aa, bb, ztip)
            if np.isnan(z.real):
                caps[i] = np.nan
                return i, j
            images[j] = z
        if total >= budget:
            return i + 1, -1
    return n, -1


@dataclass(frozen=True)
class ElementaryMap:
    """Map removing one arc or segment from 0 to w, tip sent to 0."""

    kind: str  # "arc" | "segment"
    w: complex
    capacity: float

    def forward(self, z):
        """Evaluate the map at points of H (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        x, y = self.w.real, self.w.imag
        if self.kind == "arc":
            if abs(x) < 1e-14 * y:
                h = y
                out = _sqrt_branch(z * z + h * h)
            else:
                a, h, q, c = _arc_params(x, y)
                m = a * z / (a - z)
                v = _sqrt_branch(m * m + h * h)
                out = q * v / (q - v) / c
        else:
            alpha, aa, bb, ztip = _segment_params(x, y)
            flat = np.atleast_1d(z)
            res = np.empty(flat.shape, dtype=complex)
            for i, zi in enumerate(flat):
                val = _segment_forward_one(zi, alpha, aa, bb, ztip)
                if np.isnan(val.real):
                    raise ZipperError(
                        f"Newton did not converge at {zi}", point=zi)
                res[i] = val
            out = res.reshape(z.shape)
        return complex(out) if out.ndim == 0 else out

    def inverse(self, z):
        """Inverse map: H -> H minus the removed piece."""
        z = np.asarray(z, dtype=complex)
        x, y = self.w.real, self.w.imag
        if self.kind == "arc":
            if abs(x) < 1e-14 * y:
                h = y
                out = _sqrt_branch(z * z - h * h)
            else:
                a, h, q, c = _arc_params(x, y)
                s = c * z
                s = q * s / (q + s)          # T^{-1}
                s = _sqrt_branch(s * s - h * h)  # v^{-1}
                out = a * s / (a + s)        # m^{-1}
        else:
            alpha, aa, bb, ztip = _segment_params(x, y)
            zz = z + ztip
            out = np.exp((1.0 - alpha) * np.log(zz + aa)
                         + alpha * np.log(zz - bb))
        return complex(out) if out.ndim == 0 else out


def _sqrt_branch(w):
    s = np.sqrt(np.asarray(w, dtype=complex))
    return np.where(s.imag < 0, -s, s)


def elementary_arc_map(w: complex) -> ElementaryMap:
    """Map removing the circular arc from 0 to w orthogonal to the real axis."""
    w = complex(w)
    if w.imag <= 0:
        raise ValueError("endpoint must be in the open upper half plane")
    cap = 0.25 * w.real ** 2 + 0.5 * w.imag ** 2
    return ElementaryMap("arc", w, cap)


def elementary_segment_map(w: complex) -> ElementaryMap:
    """Map removing the straight segment from 0 to w."""
    w = complex(w)
    if w.imag <= 0:
        raise ValueError("endpoint must be in the open upper half plane")
    alpha, aa, bb, _ = _segment_params(w.real, w.imag)
    s = aa + bb
    cap = 0.5 * alpha * (1.0 - alpha) * s * s
    return ElementaryMap("segment", w, cap)


# ----------------------------------------------------------------------
# zipping curves
# ----------------------------------------------------------------------

def _chord_thin(pts: np.ndarray, spacing: float) -> np.ndarray:
    """Indices of a first-exit chord decimation of pts (always keeps ends).

    Keeps the next point at distance >= spacing from the last kept one,
    giving a roughly even spatial resolution regardless of how the
    parameterization clusters the samples.
    """
    keep = [0]
    last = pts[0]
    for j in range(1, len(pts)):
        if abs(pts[j] - last) >= spacing:
            keep.append(j)
            last = pts[j]
    if keep[-1] != len(pts) - 1:
        keep.append(len(pts) - 1)
    return np.asarray(keep)


def zip_points(points, kind: str = "arc", capacity_budget: float = np.inf,
               drop_touching: bool = False, min_spacing: float = 0.0,
               chord_spacing: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Unzip the given points (points[0] = 0).

    Returns (knots, caps): indices of the points that became profile
    knots, and the capacity increment contributed at each.  Stops early
    once the accumulated capacity reaches capacity_budget.  An image
    point on the real axis (curve self-touching at resolution) raises
    ZipperError, or is silently skipped when drop_touching is set.
    chord_spacing > 0 decimates the input to chords of at least that
    length before zipping; resolving a rough curve much below the scale
    of its closest self-approaches makes the composed map's derivatives
    overflow double precision, so capped resolution is what keeps the
    capacity estimate stable.
    """
    pts = np.ascontiguousarray(points, dtype=complex)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    if pts[0] != 0:
        raise ValueError("curve must start at 0")
    if np.any(pts[1:].imag <= 0):
        raise ValueError("all points after the first must be in H")
    if np.any(pts[1:] == pts[:-1]):
        raise ValueError("consecutive points must be distinct")
    if kind not in ("arc", "segment"):
        raise ValueError("kind must be 'arc' or 'segment'")
    if chord_spacing > 0.0:
        subset = _chord_thin(pts, chord_spacing)
        pts = pts[subset]
    else:
        subset = None
    caps = np.zeros(len(pts) - 1)
    images = np.empty(len(pts), dtype=complex)
    used = np.zeros(len(pts), dtype=np.bool_)
    kernel = _zip_arc if kind == "arc" else _zip_segment
    done, err = kernel(pts, caps, images, capacity_budget, used, drop_touching,
                       min_spacing)
    if err >= 0:
        bad = err if subset is None else subset[err]
        if np.isnan(caps[done]):
            raise ZipperError(f"Newton did not converge at point {bad}",
                              index=bad, point=pts[err])
        raise ZipperError(
            f"image of point {bad} has nonpositive imaginary part "
            "(curve self-touching at resolution)", index=bad, point=pts[err])
    knots = np.nonzero(used[:done + 1])[0]
    caps = caps[knots - 1]
    if subset is not None:
        knots = subset[knots]
    return knots, caps


def zip_curve(curve: ParamCurve, kind: str = "arc",
              capacity_budget: float = np.inf,
              drop_touching: bool = False, min_spacing: float = 0.0,
              chord_spacing: float = 0.0) -> tuple[float, CapacityProfile]:
    """(total capacity, profile) of a curve, one elementary map per sample."""
    knots, caps = zip_points(curve.points, kind=kind,
                             capacity_budget=capacity_budget,
                             drop_touching=drop_touching,
                             min_spacing=min_spacing,
                             chord_spacing=chord_spacing)
    s = np.concatenate(([0.0], curve.params[knots]))
    h = np.concatenate(([0.0], np.cumsum(caps)))
    profile = CapacityProfile(s, h)
    return profile.total, profile
