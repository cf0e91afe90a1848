"""Schedule adaptation from rejection statistics.

The cumulative communication barrier is estimated by interpolating the
running sums of per-neighbour rejection estimates with a shape-preserving
(Fritsch-Carlson) monotone cubic, then the grid is moved so every
neighbour pair carries an equal share of the barrier: t_n solves
barrier(t_n) = (n/N) * barrier(1), found by bisection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Schedule:
    """Monotone grid 0 = t_0 <= ... <= t_N = 1."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("schedule needs at least two points")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise ValueError("schedule endpoints must be exactly 0 and 1")
        if np.any(np.diff(pts) < 0.0):
            raise ValueError("schedule points must be non-decreasing")
        self.points = pts

    @classmethod
    def uniform(cls, n_intervals: int) -> "Schedule":
        if n_intervals < 1:
            raise ValueError("need at least one interval")
        return cls(np.linspace(0.0, 1.0, n_intervals + 1))

    @property
    def n_intervals(self) -> int:
        return self.points.size - 1

    def to_jsonable(self) -> list:
        return [float(t) for t in self.points]


class BarrierInterpolant:
    """Monotone cubic through (abscissa, ordinate) knots.

    Tangents start from secant averages and are then limited to the
    Fritsch-Carlson monotonicity region (alpha^2 + beta^2 <= 9), so the
    interpolant is non-decreasing whenever the ordinates are. Equal secant
    slopes are left untouched, which reproduces a straight line exactly.
    """

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.shape != y.shape:
            raise ValueError("need matching 1-d knot arrays with >= 2 points")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError("knot abscissae must be strictly increasing")
        if np.any(np.diff(y) < 0.0):
            raise ValueError("knot ordinates must be non-decreasing")
        self.x = x
        self.y = y
        self.tangents = self._fritsch_carlson_tangents(x, y)

    @staticmethod
    def _fritsch_carlson_tangents(x, y):
        h = np.diff(x)
        slopes = np.diff(y) / h
        n = x.size
        d = np.empty(n)
        d[0] = slopes[0]
        d[-1] = slopes[-1]
        if n > 2:
            d[1:-1] = 0.5 * (slopes[:-1] + slopes[1:])
        for i in range(n - 1):
            if slopes[i] == 0.0:
                d[i] = 0.0
                d[i + 1] = 0.0
                continue
            a = d[i] / slopes[i]
            b = d[i + 1] / slopes[i]
            s = a * a + b * b
            if s > 9.0:
                tau = 3.0 / np.sqrt(s)
                d[i] = tau * a * slopes[i]
                d[i + 1] = tau * b * slopes[i]
        return d

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tt = np.clip(np.atleast_1d(t_arr), self.x[0], self.x[-1])
        idx = np.clip(np.searchsorted(self.x, tt, side="right") - 1, 0, self.x.size - 2)
        h = self.x[idx + 1] - self.x[idx]
        s = (tt - self.x[idx]) / h
        s2 = s * s
        s3 = s2 * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = s3 - 2.0 * s2 + s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        out = (self.y[idx] * h00 + h * self.tangents[idx] * h10
               + self.y[idx + 1] * h01 + h * self.tangents[idx + 1] * h11)
        return float(out[0]) if scalar else out

    @property
    def total(self) -> float:
        return float(self.y[-1])


def fit_cumulative_barrier(schedule: Schedule, rejections) -> BarrierInterpolant:
    """Interpolant through (t_n, sum of rejections below t_n).

    Duplicate grid points are merged before fitting; the rejection between
    two chains at identical coordinates is identically zero, so merging
    drops no information.
    """
    r = np.asarray(rejections, dtype=float)
    pts = schedule.points
    if r.size != pts.size - 1:
        raise ValueError(f"expected {pts.size - 1} rejections, got {r.size}")
    if np.any(r < 0.0):
        raise ValueError("rejections must be non-negative")
    cumulative = np.concatenate([[0.0], np.cumsum(r)])
    keep = np.concatenate([[True], np.diff(pts) > 0.0])
    return BarrierInterpolant(pts[keep], cumulative[keep])


def _bisect_nondecreasing(fn, target: float, tol: float = 1e-10, max_iter: int = 60) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def update_schedule(barrier: BarrierInterpolant, n_intervals: int) -> Schedule:
    """Grid equalizing the barrier: barrier(t_n) = (n/N) * barrier(1).

    A flat barrier (no rejections anywhere) carries no information and
    yields the uniform grid; rejection sums below 1e-10 are treated as
    flat because they are rounding dust, not signal.
    """
    if n_intervals < 1:
        raise ValueError("need at least one interval")
    total = barrier.total
    if total <= 1e-10:
        return Schedule.uniform(n_intervals)
    points = np.empty(n_intervals + 1)
    points[0] = 0.0
    points[-1] = 1.0
    for n in range(1, n_intervals):
        points[n] = _bisect_nondecreasing(barrier, total * n / n_intervals)
    # Bisection on plateaus can wobble below resolution; enforce ordering.
    points[1:-1] = np.clip(np.maximum.accumulate(points[1:-1]), 0.0, 1.0)
    return Schedule(points)
