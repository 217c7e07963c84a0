"""Chordal SLE traces in the upper half plane via composed vertical-slit maps.

The Loewner flow over each subinterval is approximated by the map removing
a vertical slit of the right capacity, with the driving function held at
its left-endpoint value.  Trace points are obtained by composing the
inverse slit maps, which is exact for zero driving: gamma(t) = 2i sqrt(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .curves import ParamCurve

IM_FLOOR = 1e-12


@dataclass(frozen=True)
class TimePartition:
    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t[0] != 0.0 or not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing from 0")
        object.__setattr__(self, "times", t)

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class DrivingFunction:
    """Discretized sqrt(kappa)*B_t on a partition; values[0] = 0."""

    partition: TimePartition
    values: np.ndarray
    kappa: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if len(v) != len(self.partition.times):
            raise ValueError("values must match partition length")
        if v[0] != 0.0:
            raise ValueError("driving must start at 0")
        object.__setattr__(self, "values", v)


@dataclass
class SleTrace:
    """gamma(t_k) sampled at capacity times; also usable as a ParamCurve."""

    capacity_times: np.ndarray
    points: np.ndarray
    kappa: float
    lifted: int = 0  # points whose Im fell below the numerical floor

    def as_curve(self) -> ParamCurve:
        t = np.concatenate(([0.0], self.capacity_times))
        z = np.concatenate(([0.0 + 0.0j], self.points))
        return ParamCurve(t, z)


def partition_times(n: int, horizon: float) -> TimePartition:
    """Quadratic partition t_k = T*(k/N)**2: since |gamma(t)| ~ sqrt(t),
    successive trace points are roughly equally spaced."""
    if n < 1 or horizon <= 0:
        raise ValueError("need n >= 1 and horizon > 0")
    k = np.arange(n + 1, dtype=float)
    return TimePartition(horizon * (k / n) ** 2)


def sample_driving(kappa: float, partition: TimePartition,
                   rng: np.random.Generator) -> DrivingFunction:
    """Brownian driving sampled at the partition times."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    dt = np.diff(partition.times)
    incr = np.sqrt(kappa * dt) * rng.standard_normal(len(dt))
    values = np.concatenate(([0.0], np.cumsum(incr)))
    return DrivingFunction(partition, values, kappa)


def incremental_slit_map(u: float, dt: float, z: complex) -> complex:
    """Forward slit map u + sqrt((z-u)**2 + 4 dt), branch with Im >= 0.

    Removes the vertical slit of half-plane capacity 2*dt at u; identity
    for dt = 0; the slit tip u + 2i*sqrt(dt) maps to u.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    w = (complex(z) - u) ** 2 + 4.0 * dt
    s = np.sqrt(complex(w))
    if s.imag < 0:
        s = -s
    return u + s


def inverse_slit_map(u: float, dt: float, z: complex) -> complex:
    """Inverse of incremental_slit_map: u + sqrt((z-u)**2 - 4 dt)."""
    w = (complex(z) - u) ** 2 - 4.0 * dt
    s = np.sqrt(complex(w))
    if s.imag < 0:
        s = -s
    return u + s


@njit(cache=True)
def _compose_trace(times, values, ks):
    """Trace points gamma(t_k) for stored indices ks (ascending).

    Point k starts at U_{k-1} and passes through the inverse slit maps
    f_k, f_{k-1}, ..., f_1 where f_j uses u = U_{j-1} and capacity
    increment 2*(t_j - t_{j-1}).  The loop over j is shared across all
    stored points, costing O(sum k) map applications in total.
    """
    m = len(ks)
    z = np.empty(m, dtype=np.complex128)
    lifted = 0
    pos = m  # first active slot; ks sorted ascending, activate from the top
    nmaps = len(times) - 1
    for j in range(nmaps, 0, -1):
        while pos > 0 and ks[pos - 1] >= j:
            pos -= 1
            z[pos] = values[ks[pos] - 1] + 0.0j
        u = values[j - 1]
        fourdt = 4.0 * (times[j] - times[j - 1])
        for i in range(pos, m):
            w = (z[i] - u) ** 2 - fourdt
            s = np.sqrt(w)
            if s.imag < 0:
                s = -s
            zi = u + s
            if zi.imag < IM_FLOOR:
                zi = complex(zi.real, IM_FLOOR)
                lifted += 1
            z[i] = zi
    return z, lifted


@njit(cache=True, parallel=True)
def _endpoints(times, values_matrix):
    """gamma(T) for many independent driving samples (rows)."""
    nsamp = values_matrix.shape[0]
    out = np.empty(nsamp, dtype=np.complex128)
    nmaps = len(times) - 1
    for s_idx in prange(nsamp):
        values = values_matrix[s_idx]
        z = values[nmaps - 1] + 0.0j
        for j in range(nmaps, 0, -1):
            u = values[j - 1]
            w = (z - u) ** 2 - 4.0 * (times[j] - times[j - 1])
            s = np.sqrt(w)
            if s.imag < 0:
                s = -s
            z = u + s
            if z.imag < IM_FLOOR:
                z = complex(z.real, IM_FLOOR)
        out[s_idx] = z
    return out


def trace_point(driving: DrivingFunction, k: int) -> complex:
    """gamma(t_k): the inverse maps f_1 ... f_k applied to the k-th tip."""
    n = driving.partition.n_intervals
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    z, _ = _compose_trace(driving.partition.times, driving.values,
                          np.array([k], dtype=np.int64))
    return complex(z[0])


def trace_points(driving: DrivingFunction, ks: np.ndarray) -> tuple[np.ndarray, int]:
    """gamma(t_k) for ascending indices ks; returns (points, lifted count)."""
    ks = np.asarray(ks, dtype=np.int64)
    if len(ks) == 0:
        return np.empty(0, dtype=complex), 0
    n = driving.partition.n_intervals
    if ks[0] < 1 or ks[-1] > n or np.any(np.diff(ks) <= 0):
        raise ValueError("ks must be strictly increasing in 1..N")
    return _compose_trace(driving.partition.times, driving.values, ks)


def sample_trace(kappa: float, n_maps: int, horizon: float,
                 rng: np.random.Generator, stride: int = 1) -> SleTrace:
    """One SLE trace with points at indices stride, 2*stride, ..., N."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    part = partition_times(n_maps, horizon)
    drv = sample_driving(kappa, part, rng)
    ks = np.arange(stride, n_maps + 1, stride, dtype=np.int64)
    if ks[-1] != n_maps:
        ks = np.append(ks, n_maps)
    pts, lifted = _compose_trace(part.times, drv.values, ks)
    return SleTrace(part.times[ks], pts, kappa, lifted)


def sample_endpoints(kappa: float, n_maps: int, horizon: float, n_samples: int,
                     rng: np.random.Generator, batch: int = 2000) -> np.ndarray:
    """gamma(T) for n_samples independent traces (parallel over samples).

    Batches keep the (batch, n_maps) work arrays a few hundred MB at
    most; each batch allocates several arrays of that shape."""
    part = partition_times(n_maps, horizon)
    dt = np.diff(part.times)
    out = np.empty(n_samples, dtype=complex)
    pos = 0
    while pos < n_samples:
        take = min(batch, n_samples - pos)
        incr = np.sqrt(kappa * dt) * rng.standard_normal((take, n_maps))
        values = np.concatenate(
            (np.zeros((take, 1)), np.cumsum(incr, axis=1)), axis=1)
        out[pos:pos + take] = _endpoints(part.times, values)
        pos += take
    return out
