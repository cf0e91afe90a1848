"""Barrier estimators, closed-form oracles and estimator-quality probes.

The Gaussian pair admits closed forms for the communication barrier of the
straight-line path and for the Fisher length of the best Gaussian path,
which serve as oracles for the Monte Carlo estimators below. The module
also provides the instantaneous rejection-rate estimator, the secant
barrier (rejection rate of an infinitesimally refined straight segment)
and a signal-to-noise comparison of the two candidate tuning objectives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import predicted_round_trip_rate
from .models.base import IidModel
from .models.gaussian import GaussianPair
from .rng import stream

SQRT_PI = math.sqrt(math.pi)


def lambda_linear_gaussian(z: float) -> float:
    """Instantaneous rejection rate of the straight-line path between
    equal-variance Gaussians separated by z standard deviations. Constant
    in t, so it also equals the whole-path barrier."""
    if z <= 0:
        raise ValueError("z must be positive")
    return z / SQRT_PI


def fisher_length_gaussian(z: float) -> float:
    """Fisher-information length of the geodesic of Gaussian distributions
    between the endpoints; divided by sqrt(2) it upper-bounds the barrier
    of the best Gaussian path."""
    if z <= 0:
        raise ValueError("z must be positive")
    return math.sqrt(2.0) * math.log(1.0 + z * z / 4.0 + (z / 4.0) * math.sqrt(8.0 + z * z))


@dataclass
class BarrierReport:
    """Summary of one run's communication diagnostics."""

    rejection_sum: float        # estimates the whole-path barrier
    rejection_odds_sum: float   # sum r / (1 - r), the non-asymptotic objective
    predicted_rate: float       # rate implied by the measured rejections
    measured_rate: float
    round_trips: int
    sweeps: int

    @classmethod
    def from_run(cls, result) -> "BarrierReport":
        r = np.asarray(result.rejections, dtype=float)
        with np.errstate(divide="ignore"):
            odds = float(np.sum(np.where(r < 1.0, r / (1.0 - r), np.inf)))
        return cls(
            rejection_sum=float(r.sum()),
            rejection_odds_sum=odds,
            predicted_rate=predicted_round_trip_rate(np.clip(r, 0.0, 1.0)),
            measured_rate=result.round_trip_rate,
            round_trips=result.round_trips.completed_round_trips,
            sweeps=result.stats.sweeps,
        )

    def to_jsonable(self) -> dict:
        return {
            "rejection_sum": self.rejection_sum,
            "rejection_odds_sum": self.rejection_odds_sum,
            "predicted_rate": self.predicted_rate,
            "measured_rate": self.measured_rate,
            "round_trips": self.round_trips,
            "sweeps": self.sweeps,
        }


def _require_iid(model) -> IidModel:
    if not isinstance(model, IidModel):
        raise TypeError("estimator needs a model with exact tempered sampling")
    return model


def empirical_instantaneous_rate(path, t: float, model, samples: int,
                                 seed: int = 0, rng=None):
    """Monte Carlo estimate of the instantaneous rejection rate at t.

    Averages half the absolute difference of the path-derivative-weighted
    log densities over i.i.d. pairs from the tempered law at t. At spline
    knots the right-segment derivative is used. Returns (estimate,
    standard error).
    """
    model = _require_iid(model)
    if samples < 2:
        raise ValueError("need at least two sample pairs")
    rng = rng if rng is not None else stream(seed)
    eta = path.eta(t)
    deriv = path.derivative(t)
    x = model.sample_iid_many(eta, samples, rng)
    x_alt = model.sample_iid_many(eta, samples, rng)
    vals = 0.5 * np.abs((model.w_pair_many(x) - model.w_pair_many(x_alt)) @ deriv)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def secant_rejection(path, t_lo: float, t_hi: float, model, samples: int,
                     seed: int = 0, rng=None) -> float:
    """Brute-force swap rejection rate between the chains at t_lo and t_hi,
    from i.i.d. draws of both tempered laws."""
    model = _require_iid(model)
    rng = rng if rng is not None else stream(seed)
    d_eta = path.eta(t_hi) - path.eta(t_lo)
    x = model.sample_iid_many(path.eta(t_lo), samples, rng)
    x_hi = model.sample_iid_many(path.eta(t_hi), samples, rng)
    accept_log = (model.w_pair_many(x) - model.w_pair_many(x_hi)) @ d_eta
    return float(np.mean(1.0 - np.exp(np.minimum(0.0, accept_log))))


def secant_barrier(path, t_lo: float, t_hi: float, model, samples: int,
                   nodes: int = 64, seed: int = 0, rng=None) -> float:
    """Barrier of the straight segment between the laws at t_lo and t_hi.

    Trapezoid quadrature over the segment; each node's integrand is half
    the mean absolute log-density increment over i.i.d. pairs drawn from
    the node's law (coordinates interpolated between eta(t_lo) and
    eta(t_hi)).
    """
    model = _require_iid(model)
    rng = rng if rng is not None else stream(seed)
    e_lo, e_hi = path.eta(t_lo), path.eta(t_hi)
    d_eta = e_hi - e_lo
    s_nodes = np.linspace(0.0, 1.0, nodes)
    values = np.empty(nodes)
    for j, s in enumerate(s_nodes):
        xi = (1.0 - s) * e_lo + s * e_hi
        x = model.sample_iid_many(xi, samples, rng)
        x_alt = model.sample_iid_many(xi, samples, rng)
        values[j] = 0.5 * np.mean(
            np.abs((model.w_pair_many(x) - model.w_pair_many(x_alt)) @ d_eta)
        )
    return float(np.trapezoid(values, s_nodes))


def secant_error_curve(path, t: float, deltas, model, samples: int,
                       nodes: int = 64, seed: int = 0):
    """|rejection - secant barrier| at shrinking widths, with shared noise.

    For each width delta this evaluates the brute-force rejection
    r(t, t + delta) and the secant barrier on the same interval and
    returns rows (delta, rejection, barrier, error, error / delta^2).

    The two terms agree to third order in delta, so with independent
    draws the Monte Carlo noise floor would swamp the signal at small
    widths (noise decays like delta / sqrt(n), the signal like delta^3).
    All estimates therefore reuse one set of standard-normal pairs,
    antithetically extended, mapped through each law's location and scale.
    Estimates stay unbiased; only the error differences are smoothed.
    """
    if not isinstance(model, GaussianPair) or model.d != 1:
        raise TypeError("shared-noise curve needs the scalar Gaussian pair, whose "
                        "tempered family is location-scale")
    if samples % 2:
        samples += 1
    rng = stream(seed)
    half = samples // 2
    u = rng.standard_normal(half)
    v = rng.standard_normal(half)
    u = np.concatenate([u, -u])
    v = np.concatenate([v, -v])

    def w_rows(xi, base):
        mean, var = model.tempered_params(xi)
        return model.w_pair_many(mean + math.sqrt(var) * base)

    s_nodes = np.linspace(0.0, 1.0, nodes)
    rows = []
    for delta in deltas:
        e_lo, e_hi = path.eta(t), path.eta(t + delta)
        d_eta = e_hi - e_lo
        accept_log = (w_rows(e_lo, u) - w_rows(e_hi, v)) @ d_eta
        rejection = float(np.mean(1.0 - np.exp(np.minimum(0.0, accept_log))))
        node_vals = np.empty(nodes)
        for j, s in enumerate(s_nodes):
            xi = (1.0 - s) * e_lo + s * e_hi
            node_vals[j] = 0.5 * np.mean(np.abs((w_rows(xi, u) - w_rows(xi, v)) @ d_eta))
        barrier = float(np.trapezoid(node_vals, s_nodes))
        err = abs(rejection - barrier)
        rows.append({
            "delta": float(delta),
            "rejection": rejection,
            "barrier": barrier,
            "error": err,
            "ratio": err / float(delta) ** 2,
        })
    return rows


def _row_cov(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sample covariance (ddof=1) of paired rows, vectorized over axis 0."""
    n = a.shape[1]
    da = a - a.mean(axis=1, keepdims=True)
    db = b - b.mean(axis=1, keepdims=True)
    return (da * db).sum(axis=1) / (n - 1)


def snr_experiment(phi_grid, samples_per_estimate: int = 50,
                   replicates: int = 1000, seed: int = 0):
    """Signal-to-noise of the two objective-gradient estimators.

    Two chains: a standard Gaussian and a unit-variance Gaussian at mean
    phi. For each phi, both the swap-rejection derivative and the
    symmetric-KL derivative with respect to phi are estimated
    ``replicates`` times from ``samples_per_estimate`` i.i.d. pairs, and
    the ratio |mean / sd| over replicates is reported per objective.
    """
    if replicates < 2:
        raise ValueError("signal-to-noise needs at least two replicates")
    if samples_per_estimate < 2:
        raise ValueError("each estimate needs at least two samples")
    rng = stream(seed)
    rows = []
    n = samples_per_estimate
    for phi in phi_grid:
        phi = float(phi)
        x = rng.standard_normal((replicates, n))
        xp = phi + rng.standard_normal((replicates, n))

        # Difference of log densities at the two chains: phi * x - phi^2 / 2.
        a = phi * (x - xp)
        f = np.exp(np.minimum(0.0, a))
        mean_rejection = float(np.mean(1.0 - f))

        # d/dphi of the swap acceptance expectation: a covariance score term
        # for the phi-dependent sampling law plus the pathwise derivative.
        g_accept = _row_cov(xp - phi, f) + np.mean(f * (a < 0.0) * (x - xp), axis=1)
        g_rej = -g_accept

        # d/dphi of SKL(chain_a, chain_b) with only chain b moving with phi.
        j_b = phi * xp - 0.5 * phi * phi
        g_skl = (np.mean(-(x - phi), axis=1)
                 + _row_cov(xp - phi, j_b)
                 + np.mean(xp - phi, axis=1))

        for name, g in (("rejection", g_rej), ("skl", g_skl)):
            sd = float(np.std(g, ddof=1))
            snr = abs(float(np.mean(g))) / sd if sd > 0.0 else 0.0
            rows.append({
                "phi": phi,
                "objective": name,
                "snr": snr,
                "grad_mean": float(np.mean(g)),
                "grad_sd": sd,
                "mean_rejection": mean_rejection,
            })
    return rows
