"""Planar curves sampled at ordered parameter values, with linear interpolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ParamCurve:
    """A planar curve given by samples (params[i], points[i]).

    params is strictly increasing and starts at 0; points is an array of
    complex numbers (x + iy).  Between samples the curve is the straight
    segment joining consecutive points.
    """

    params: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        points = np.asarray(self.points, dtype=complex)
        if params.ndim != 1 or points.ndim != 1 or len(params) != len(points):
            raise ValueError("params and points must be 1-d and of equal length")
        if len(params) < 2:
            raise ValueError("need at least two samples")
        if params[0] != 0.0:
            raise ValueError("params must start at 0")
        if not np.all(np.diff(params) > 0):
            raise ValueError("params must be strictly increasing")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)

    @property
    def horizon(self) -> float:
        return float(self.params[-1])

    def point_at(self, t) -> complex | np.ndarray:
        """Linear interpolation; exact at sample params.

        t may be a scalar or an array; every value must lie in
        [0, params[-1]].
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.params[-1]):
            raise ValueError(f"parameter out of range [0, {self.params[-1]}]")
        x = np.interp(t, self.params, self.points.real)
        y = np.interp(t, self.params, self.points.imag)
        out = x + 1j * y
        return complex(out) if out.ndim == 0 else out

    def rescaled(self, r: float) -> "ParamCurve":
        """Multiply all points by r > 0 (params unchanged)."""
        if r <= 0:
            raise ValueError("scale factor must be positive")
        return ParamCurve(self.params, r * self.points)

    def reparameterized(self, new_params: np.ndarray) -> "ParamCurve":
        """Same point sequence with new strictly increasing parameter values."""
        return ParamCurve(np.asarray(new_params, dtype=float), self.points)


def point_at(curve: ParamCurve, t):
    return curve.point_at(t)


def rescale_curve(curve: ParamCurve, r: float) -> ParamCurve:
    """Spatially rescale a curve; half-plane capacity scales as r**2."""
    return curve.rescaled(r)
