"""Distribution and covariance estimation with batched-means errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_BATCHES = 100
DEFAULT_GRID = 512


def polar(pt: complex) -> tuple[float, float]:
    """(R, Theta) of a point in the closed upper half plane; Theta in [0, pi]."""
    pt = complex(pt)
    if pt == 0:
        raise ValueError("polar coordinates undefined at the origin")
    return abs(pt), float(np.arctan2(pt.imag, pt.real))


def polar_arrays(pts) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(pts, dtype=complex)
    if np.any(pts == 0):
        raise ValueError("polar coordinates undefined at the origin")
    return np.abs(pts), np.arctan2(pts.imag, pts.real)


@dataclass(frozen=True)
class EmpiricalCDF:
    """F(x) = (# samples <= x)/n; right-continuous step function."""

    sorted_samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.sorted_samples, dtype=float))
        if len(s) == 0:
            raise ValueError("need at least one sample")
        object.__setattr__(self, "sorted_samples", s)

    @property
    def n(self) -> int:
        return len(self.sorted_samples)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.sorted_samples, x, side="right") / self.n
        return float(out) if out.ndim == 0 else out

    def support(self) -> tuple[float, float]:
        return float(self.sorted_samples[0]), float(self.sorted_samples[-1])


def ecdf(samples) -> EmpiricalCDF:
    return EmpiricalCDF(np.asarray(samples, dtype=float))


def cdf_grid(cdfs, n_points: int = DEFAULT_GRID) -> np.ndarray:
    """Uniform grid over the pooled support hull of the given CDFs."""
    lo = min(c.support()[0] for c in cdfs)
    hi = max(c.support()[1] for c in cdfs)
    return np.linspace(lo, hi, n_points)


def cdf_diff(a: EmpiricalCDF, b: EmpiricalCDF, grid=None):
    """Pointwise a(x) - b(x) on the grid; returns (grid, diff, sup-norm)."""
    if grid is None:
        grid = cdf_grid([a, b])
    grid = np.asarray(grid, dtype=float)
    diff = a(grid) - b(grid)
    return grid, diff, float(np.max(np.abs(diff)))


def normalize_by_mean(samples) -> np.ndarray:
    """samples/mean(samples); output mean is exactly 1."""
    samples = np.asarray(samples, dtype=float)
    m = samples.mean()
    if m == 0:
        raise ValueError("cannot normalize samples with zero mean")
    return samples / m


def batched_means(series, n_batches: int = DEFAULT_BATCHES) -> tuple[float, float]:
    """(mean, stderr) by the method of batched means.

    The series is split into n_batches contiguous batches of equal length
    (a remainder shorter than a batch is dropped); stderr is the standard
    deviation of the batch means divided by sqrt(n_batches).  Use for
    correlated Monte Carlo series; error bars downstream are 2 stderr.
    """
    series = np.asarray(series, dtype=float)
    if len(series) < 2 * n_batches:
        raise ValueError("series too short for the requested batch count")
    blen = len(series) // n_batches
    trimmed = series[:blen * n_batches]
    bm = trimmed.reshape(n_batches, blen).mean(axis=1)
    return float(bm.mean()), float(bm.std(ddof=1) / np.sqrt(n_batches))


def batched_means_matrix(series_matrix, n_batches: int = DEFAULT_BATCHES):
    """batched_means applied column-wise to a (n_samples, m) matrix."""
    s = np.asarray(series_matrix, dtype=float)
    if s.shape[0] < 2 * n_batches:
        raise ValueError("series too short for the requested batch count")
    blen = s.shape[0] // n_batches
    bm = s[:blen * n_batches].reshape(n_batches, blen, -1).mean(axis=1)
    return bm.mean(axis=0), bm.std(axis=0, ddof=1) / np.sqrt(n_batches)


@dataclass(frozen=True)
class CovarianceProfile:
    """E[(X_i(1) - X_i(t)) X_j(t)] on a grid of times, with stderr."""

    times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    i: int
    j: int


def covariance_profile(grid_times, curve_points, endpoint, i: int, j: int,
                       n_batches: int = DEFAULT_BATCHES) -> CovarianceProfile:
    """Monte Carlo estimate of E[(X_i(1) - X_i(t)) X_j(t)].

    curve_points: (n_samples, n_times) complex array of X(t) per sample;
    endpoint: (n_samples,) complex array of X(1).  Components i, j in
    {1, 2} select real/imaginary parts.  stderr comes from batched means
    over the sample series (contiguous in chain order).
    """
    pts = np.asarray(curve_points, dtype=complex)
    end = np.asarray(endpoint, dtype=complex)
    if pts.shape[0] != len(end):
        raise ValueError("sample counts disagree")
    grid_times = np.asarray(grid_times, dtype=float)
    if pts.shape[1] != len(grid_times):
        raise ValueError("a sample is missing grid points")

    def comp(z, c):
        return z.real if c == 1 else z.imag

    series = (comp(end, i)[:, None] - comp(pts, i)) * comp(pts, j)
    mean, err = batched_means_matrix(series, n_batches)
    return CovarianceProfile(grid_times, mean, err, i, j)


def moment_estimates(points, n_batches: int = DEFAULT_BATCHES) -> tuple[float, float]:
    """Mean squared norm of planar point samples, with batched-means stderr.

    For SAW endpoints this is b = E[omega(1)^2]; for SLE endpoints
    c = E[gamma(1)^2]; the deterministic reparameterization uses a = b/c.
    """
    pts = np.asarray(points, dtype=complex)
    if len(pts) == 0:
        raise ValueError("need at least one sample")
    sq = np.abs(pts) ** 2
    if len(sq) >= 2 * n_batches:
        return batched_means(sq, n_batches)
    if len(sq) > 1:
        return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(len(sq)))
    return float(sq.mean()), 0.0
