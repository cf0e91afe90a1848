"""Symmetric-divergence tuning objective and its stochastic gradient.

The tuning objective is the sum over neighbouring chains of the symmetric
KL divergence of their tempered laws. Because the tempered log densities
are linear in the path coefficients, the whole sum collapses to
sum_n E[z_n . W(X_n)] with per-chain coefficient vectors z_n given by
second differences of eta along the schedule; expectations run over the
chains' stationary laws. The gradient of such an expectation is a
covariance term (from the sampling law's dependence on the knots) plus the
expectation of the integrand's derivative, both estimable from the same
per-chain sample batches. Updates use Adagrad on the log of the interior
knots, with the raw gradient scaled elementwise by |g| + knot value to
keep every component inside [-1, 1].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .paths import INTERIOR_FLOOR, SplineKnots, SplinePath, monotone_repair
from .schedule import Schedule

log = logging.getLogger(__name__)


def _as_path(path_or_knots):
    if isinstance(path_or_knots, SplineKnots):
        return SplinePath(path_or_knots)
    return path_or_knots


def skl_coefficients(path_or_knots, schedule: Schedule) -> np.ndarray:
    """Per-chain coefficient vectors z_n, shape (N+1, 2).

    z_0 = eta(t_0) - eta(t_1), z_N = eta(t_N) - eta(t_N-1), interior rows
    are second differences 2 eta(t_n) - eta(t_n+1) - eta(t_n-1). Rows
    telescope to zero.
    """
    eta = _as_path(path_or_knots).eta_grid(schedule.points)
    z = np.empty_like(eta)
    z[0] = eta[0] - eta[1]
    z[-1] = eta[-1] - eta[-2]
    if eta.shape[0] > 2:
        z[1:-1] = 2.0 * eta[1:-1] - eta[2:] - eta[:-2]
    return z


def _check_batches(batches, n_chains: int, min_size: int = 1):
    if len(batches) != n_chains:
        raise ValueError(f"expected {n_chains} per-chain batches, got {len(batches)}")
    out = []
    for n, b in enumerate(batches):
        b = np.asarray(b, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < min_size:
            raise ValueError(
                f"chain {n}: need a ({min_size}+, 2) batch of (W0, W1) samples, got {b.shape}"
            )
        out.append(b)
    return out


def estimate_skl(path_or_knots, schedule: Schedule, batches) -> float:
    """Monte Carlo estimate of the neighbour symmetric-KL sum.

    ``batches[n]`` holds (W0, W1) rows sampled with the chain-n tempered
    law; the estimate is unbiased at stationarity.
    """
    z = skl_coefficients(path_or_knots, schedule)
    batches = _check_batches(batches, z.shape[0])
    return float(sum(b.mean(axis=0) @ z[n] for n, b in enumerate(batches)))


def spline_weights(knots: SplineKnots, schedule: Schedule) -> np.ndarray:
    """Barycentric weight matrix U with eta(t_n) = sum_k U[n, k] knot_k."""
    K = knots.segments
    pts = schedule.points
    U = np.zeros((pts.size, K + 1))
    for n, t in enumerate(pts):
        k = min(max(int(np.ceil(K * t)), 1), K)
        a = k - K * t
        U[n, k - 1] += a
        U[n, k] += 1.0 - a
    return U


def _second_difference_matrix(n_chains: int) -> np.ndarray:
    D = np.zeros((n_chains, n_chains))
    D[0, 0], D[0, 1] = 1.0, -1.0
    D[-1, -1], D[-1, -2] = 1.0, -1.0
    for n in range(1, n_chains - 1):
        D[n, n] = 2.0
        D[n, n - 1] = -1.0
        D[n, n + 1] = -1.0
    return D


@dataclass
class SklGradientEstimate:
    value: float
    gradient: np.ndarray  # over log interior knots, length 2 (K - 1)
    sample_count: int


def estimate_skl_gradient(knots: SplineKnots, schedule: Schedule,
                          batches) -> SklGradientEstimate:
    """Stochastic gradient of the symmetric-KL sum over log interior knots.

    Per chain the gradient of E[z_n . W] splits into the covariance of the
    sampled (W0, W1) with z_n . W (the sampling law's knot dependence)
    plus the mean of W weighted by the coefficient derivative. Both chain
    through the barycentric spline weights to the two knots bracketing
    each t_n, then through the exp reparameterization of the interior
    knots. Batches need at least two samples for the covariance.
    """
    pts = schedule.points
    K = knots.segments
    batches = _check_batches(batches, pts.size, min_size=2)

    U = spline_weights(knots, schedule)
    Zc = _second_difference_matrix(pts.size) @ U   # z_n = sum_k Zc[n, k] knot_k
    z = Zc @ knots.knots

    value = 0.0
    grad_phi = np.zeros((K + 1, 2))
    count = 0
    for n, batch in enumerate(batches):
        mean = batch.mean(axis=0)
        cov = np.cov(batch, rowvar=False, ddof=1)
        value += float(mean @ z[n])
        grad_phi += np.outer(U[n], cov @ z[n]) + np.outer(Zc[n], mean)
        count += batch.shape[0]

    interior = np.maximum(knots.interior(), INTERIOR_FLOOR)
    grad_psi = (grad_phi[1:-1] * interior).ravel()
    return SklGradientEstimate(value=value, gradient=grad_psi, sample_count=count)


@dataclass
class AdagradState:
    """Accumulated squared (scaled) gradients plus the step-size settings."""

    learning_rate: float
    epsilon: float = 1e-8
    accumulator: np.ndarray | None = field(default=None)

    def _acc(self, dim: int) -> np.ndarray:
        if self.accumulator is None:
            return np.zeros(dim)
        return np.asarray(self.accumulator, dtype=float)


def adagrad_step(opt: AdagradState, psi: np.ndarray, grad: np.ndarray):
    """One Adagrad update in log-knot space; returns (new_state, new_psi).

    The raw gradient is first scaled elementwise to g / (|g| + exp(psi)),
    which bounds every component by 1 and prevents blow-ups from the log
    reparameterization. A non-finite gradient skips the step.
    """
    psi = np.asarray(psi, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if psi.shape != grad.shape:
        raise ValueError(f"psi shape {psi.shape} != gradient shape {grad.shape}")
    if not np.all(np.isfinite(grad)):
        log.warning("skipping optimizer step: non-finite gradient %s", grad)
        return opt, psi
    if psi.size == 0:
        return opt, psi

    knot_values = np.exp(psi)
    denom = np.abs(grad) + knot_values
    scaled = np.where(denom > 0.0, grad / denom, 0.0)
    acc = opt._acc(psi.size) + scaled * scaled
    step = opt.learning_rate * scaled / np.sqrt(acc + opt.epsilon)
    new_opt = AdagradState(opt.learning_rate, opt.epsilon, acc)
    return new_opt, psi - step


def apply_knot_update(knots: SplineKnots, psi: np.ndarray) -> SplineKnots:
    """Map log coordinates back to a valid knot matrix.

    Exponentiates psi into the interior knots, restores the pinned
    endpoints and repairs monotonicity.
    """
    psi = np.asarray(psi, dtype=float)
    if not np.all(np.isfinite(psi)):
        raise ValueError("log coordinates must be finite")
    K = knots.segments
    if psi.size != 2 * (K - 1):
        raise ValueError(f"expected {2 * (K - 1)} coordinates, got {psi.size}")
    if K == 1:
        return knots
    interior = np.exp(psi).reshape(K - 1, 2)
    raw = np.vstack([knots.knots[0], interior, knots.knots[-1]])
    return monotone_repair(raw)
