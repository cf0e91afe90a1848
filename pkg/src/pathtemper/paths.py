"""Annealing paths in the two-coefficient exponential-family plane.

A path maps t in [0, 1] to coefficients eta(t) = (eta0, eta1) weighting the
reference and target log densities, so the tempered log density is
eta0(t) * W0(x) + eta1(t) * W1(x) up to normalization. Three kinds are
supported: the straight line (1-t, t), piecewise-linear splines with K
segments and monotone knots, and arbitrary user functions pinned to the
target endpoint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Clamp applied to interior knot components before any log transform.
INTERIOR_FLOOR = 1e-6

REFERENCE_ENDPOINT = np.array([1.0, 0.0])
TARGET_ENDPOINT = np.array([0.0, 1.0])


def _check_unit_interval(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"path parameter t={t!r} outside [0, 1]")


def eta_linear(t: float) -> np.ndarray:
    """Coefficients (1-t, t) of the straight-line path."""
    _check_unit_interval(t)
    return np.array([1.0 - t, t])


@dataclass
class SplineKnots:
    """Knot matrix of a K-segment piecewise-linear path.

    ``knots`` has shape (K+1, 2); row k is the k-th knot. The first and last
    rows are pinned to (1, 0) and (0, 1), the first column is non-increasing
    and the second non-decreasing, so the path always flows from reference
    to target.
    """

    knots: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.knots, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValueError(f"knot matrix must be (K+1, 2) with K >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("knot components must be finite")
        if not (np.array_equal(arr[0], REFERENCE_ENDPOINT) and np.array_equal(arr[-1], TARGET_ENDPOINT)):
            raise ValueError("endpoints must be exactly (1, 0) and (0, 1)")
        if np.any(np.diff(arr[:, 0]) > 0.0) or np.any(np.diff(arr[:, 1]) < 0.0):
            raise ValueError("knots must be non-increasing in eta0 and non-decreasing in eta1")
        self.knots = arr

    @property
    def segments(self) -> int:
        return self.knots.shape[0] - 1

    @classmethod
    def on_line(cls, segments: int) -> "SplineKnots":
        """Knots evenly spaced on the straight line, i.e. the linear path."""
        f = np.linspace(0.0, 1.0, segments + 1)
        return cls(np.column_stack([1.0 - f, f]))

    def interior(self) -> np.ndarray:
        """Copy of the tunable interior knots, shape (K-1, 2)."""
        return self.knots[1:-1].copy()

    def with_interior(self, interior: np.ndarray) -> "SplineKnots":
        arr = np.asarray(interior, dtype=float).reshape(self.segments - 1, 2)
        return SplineKnots(np.vstack([REFERENCE_ENDPOINT, arr, TARGET_ENDPOINT]))

    def log_coords(self, floor: float = INTERIOR_FLOOR) -> np.ndarray:
        """Flattened log of the interior knots, clamped at ``floor``."""
        return np.log(np.maximum(self.interior().ravel(), floor))

    def to_jsonable(self) -> list:
        return [[float(a), float(b)] for a, b in self.knots]

    @classmethod
    def from_jsonable(cls, pairs) -> "SplineKnots":
        return cls(np.asarray(pairs, dtype=float))


def _segment_index(segments: int, t: float) -> int:
    # t = k/K resolves to segment k; t = 0 to segment 1.
    return min(max(math.ceil(segments * t), 1), segments)


def _eta_spline_raw(arr: np.ndarray, segments: int, t: float) -> np.ndarray:
    k = _segment_index(segments, t)
    a = k - segments * t
    return a * arr[k - 1] + (1.0 - a) * arr[k]


def eta_spline(phi: SplineKnots, t: float) -> np.ndarray:
    """Evaluate the piecewise-linear path at t.

    On segment k the result is the convex combination
    (k - Kt) * phi[k-1] + (Kt - k + 1) * phi[k].
    """
    if not isinstance(phi, SplineKnots):
        phi = SplineKnots(np.asarray(phi, dtype=float))
    _check_unit_interval(t)
    return _eta_spline_raw(phi.knots, phi.segments, t)


def monotone_repair(phi: SplineKnots) -> SplineKnots:
    """Restore componentwise monotonicity of a knot sequence.

    A greedy left-to-right scan keeps each knot that stays inside the unit
    square and is componentwise monotone relative to the last kept knot;
    both endpoints are always kept, and interior knots superposed exactly
    on an endpoint are discarded. Discarded slots are refilled by linear
    interpolation, evenly spaced in knot index, between the retained
    neighbours. Idempotent.
    """
    if isinstance(phi, SplineKnots):
        arr = phi.knots.copy()
    else:
        arr = np.asarray(phi, dtype=float).copy()
    last = arr.shape[0] - 1
    if not (np.array_equal(arr[0], REFERENCE_ENDPOINT) and np.array_equal(arr[-1], TARGET_ENDPOINT)):
        raise ValueError("endpoints must be exactly (1, 0) and (0, 1)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("knot components must be finite")

    kept = [0]
    for i in range(1, last):
        cand = arr[i]
        if np.array_equal(cand, REFERENCE_ENDPOINT) or np.array_equal(cand, TARGET_ENDPOINT):
            continue
        prev = arr[kept[-1]]
        ok = (
            cand[0] <= prev[0]
            and cand[1] >= prev[1]
            and 0.0 <= cand[0]
            and cand[1] <= 1.0
        )
        if ok:
            kept.append(i)
    kept.append(last)

    out = arr.copy()
    for a, b in zip(kept[:-1], kept[1:]):
        for m in range(a + 1, b):
            frac = (m - a) / (b - a)
            out[m] = arr[a] + frac * (arr[b] - arr[a])
    # Interpolation can round one ulp past a neighbour; squeeze the interior
    # back to exact monotonicity without touching retained values.
    core = out[1:-1]
    if core.size:
        core[:, 0] = np.minimum.accumulate(np.clip(core[:, 0], 0.0, 1.0))
        core[:, 1] = np.maximum.accumulate(np.clip(core[:, 1], 0.0, 1.0))
    return SplineKnots(out)


class LinearPath:
    """The straight-line path eta(t) = (1-t, t)."""

    kind = "linear"

    def eta(self, t: float) -> np.ndarray:
        return eta_linear(t)

    def derivative(self, t: float) -> np.ndarray:
        _check_unit_interval(t)
        return np.array([-1.0, 1.0])

    def eta_grid(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.column_stack([1.0 - ts, ts])


class SplinePath:
    """Piecewise-linear path through validated monotone knots."""

    kind = "spline"

    def __init__(self, knots: SplineKnots):
        if not isinstance(knots, SplineKnots):
            knots = SplineKnots(np.asarray(knots, dtype=float))
        self.knots = knots

    def eta(self, t: float) -> np.ndarray:
        _check_unit_interval(t)
        return _eta_spline_raw(self.knots.knots, self.knots.segments, t)

    def derivative(self, t: float) -> np.ndarray:
        # Right-segment convention at knots; the last segment owns t = 1.
        _check_unit_interval(t)
        K = self.knots.segments
        k = min(int(math.floor(K * t)) + 1, K)
        arr = self.knots.knots
        return K * (arr[k] - arr[k - 1])

    def eta_grid(self, ts) -> np.ndarray:
        return np.stack([self.eta(float(t)) for t in np.asarray(ts, dtype=float)])


class CustomPath:
    """Path defined by a user function t -> (eta0, eta1).

    The target endpoint eta(1) = (0, 1) must hold exactly. The derivative
    falls back to a central finite difference when no analytic form is
    given.
    """

    kind = "custom"

    def __init__(self, fn, derivative_fn=None, _h: float = 1e-6):
        end = np.asarray(fn(1.0), dtype=float)
        if not np.array_equal(end, TARGET_ENDPOINT):
            raise ValueError(f"custom path must satisfy eta(1) = (0, 1), got {end}")
        self._fn = fn
        self._dfn = derivative_fn
        self._h = _h

    def eta(self, t: float) -> np.ndarray:
        _check_unit_interval(t)
        out = np.asarray(self._fn(t), dtype=float)
        if out.shape != (2,) or not np.all(np.isfinite(out)):
            raise ValueError(f"custom path returned invalid coordinates {out!r} at t={t}")
        return out

    def derivative(self, t: float) -> np.ndarray:
        _check_unit_interval(t)
        if self._dfn is not None:
            return np.asarray(self._dfn(t), dtype=float)
        h = self._h
        lo, hi = max(0.0, t - h), min(1.0, t + h)
        return (self.eta(hi) - self.eta(lo)) / (hi - lo)

    def eta_grid(self, ts) -> np.ndarray:
        return np.stack([self.eta(float(t)) for t in np.asarray(ts, dtype=float)])


def log_density_unnormalized(path, t: float, w_pair) -> float:
    """eta(t) . (W0, W1) for one state's log-density pair."""
    w0, w1 = float(w_pair[0]), float(w_pair[1])
    if not (math.isfinite(w0) and math.isfinite(w1)):
        raise ValueError(f"non-finite log-density pair ({w0}, {w1})")
    e = path.eta(t)
    return float(e[0] * w0 + e[1] * w1)


def spline_best_approx_bound(curvature: float, segments: int) -> float:
    """Sup-norm guarantee M / (4 K^2) for approximating a path with bounded
    second derivative M by a K-segment linear spline."""
    if curvature <= 0:
        raise ValueError("curvature bound must be positive")
    if segments < 1:
        raise ValueError("need at least one segment")
    return curvature / (4.0 * segments * segments)
