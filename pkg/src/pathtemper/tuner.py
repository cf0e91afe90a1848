"""Outer tuning loop: alternate sampling, schedule moves and knot moves.

Each round runs the tempering engine for a fixed number of sweeps, refits
the cumulative barrier from the round's rejection estimates and
redistributes the schedule, then takes one Adagrad step on the log
interior knots using the symmetric-KL gradient estimated from the same
round's per-chain samples. The gradient is evaluated against the schedule
those samples were generated under; the refreshed schedule takes effect
from the next round, matching the update order of the alternating scheme.
Adaptation stops after the final round, so any continuation run is plain
(valid) MCMC.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import Ensemble, make_ensemble, run_nrpt
from .models.gaussian import GaussianPair
from .objective import (AdagradState, adagrad_step, apply_knot_update,
                        estimate_skl, estimate_skl_gradient)
from .paths import LinearPath, SplineKnots, SplinePath
from .rng import ReplicaStreams
from .schedule import Schedule, fit_cumulative_barrier, update_schedule


@dataclass
class TuningConfig:
    model: object
    n_intervals: int                   # chains sit at N+1 schedule points
    segments: int = 4                  # spline segment count K
    rounds: int = 150                  # tuning rounds S
    sweeps_per_round: int = 300        # engine sweeps per round M
    learning_rate: float = 0.2
    seed: int = 1
    path_kind: str = "spline"          # "spline" or "linear"
    reversible: bool = False
    adapt_schedule: bool = True

    def __post_init__(self):
        if self.path_kind not in ("spline", "linear"):
            raise ValueError(f"unknown path kind {self.path_kind!r}")
        if self.rounds < 1 or self.sweeps_per_round < 1 or self.n_intervals < 1:
            raise ValueError("rounds, sweeps and intervals must be positive")
        if self.path_kind == "spline" and self.segments < 1:
            raise ValueError("need at least one spline segment")


@dataclass
class RoundRecord:
    """Diagnostics of one tuning round, taken under the round's own
    schedule and knots (the updates apply from the next round)."""

    index: int
    schedule: np.ndarray
    knots: SplineKnots | None
    rejections: np.ndarray
    rejection_sum: float
    rejection_odds_sum: float
    skl_estimate: float
    gradient_norm: float
    round_trips: int                   # cumulative across rounds
    round_trip_rate: float             # this round only
    step_skipped: bool


@dataclass
class TuningTrace:
    config: TuningConfig
    rounds: list[RoundRecord] = field(default_factory=list)
    final_path: object = None
    final_schedule: Schedule | None = None
    final_ensemble: Ensemble | None = None
    exploration_steps: int = 0
    _per_sweep: list = field(default_factory=list)

    @property
    def cumulative_round_trips(self) -> np.ndarray:
        return np.array([r.round_trips for r in self.rounds])

    def per_sweep_round_trips(self) -> np.ndarray:
        return np.asarray(self._per_sweep, dtype=np.int64)


class TuningAborted(RuntimeError):
    """A sub-operation failed; the partial trace is preserved."""

    def __init__(self, trace: TuningTrace, cause: BaseException):
        super().__init__(f"tuning aborted in round {len(trace.rounds) + 1}: {cause}")
        self.trace = trace
        self.cause = cause


def _odds_sum(rejections: np.ndarray) -> float:
    r = np.asarray(rejections, dtype=float)
    with np.errstate(divide="ignore"):
        return float(np.sum(np.where(r < 1.0, r / (1.0 - r), np.inf)))


def path_opt_nrpt(config: TuningConfig) -> TuningTrace:
    """Run the full tuning loop and return its trace.

    The trace carries the final path, schedule and ensemble so sampling
    can continue with adaptation frozen.
    """
    model = config.model
    n_chains = config.n_intervals + 1
    streams = ReplicaStreams(config.seed, n_chains)
    ensemble = make_ensemble(model, n_chains, streams)
    schedule = Schedule.uniform(config.n_intervals)

    tune_knots = config.path_kind == "spline" and config.segments >= 2
    if config.path_kind == "spline":
        knots = SplineKnots.on_line(config.segments)
        path = SplinePath(knots)
        psi = knots.log_coords()
    else:
        knots = None
        path = LinearPath()
        psi = np.zeros(0)
    opt = AdagradState(config.learning_rate)

    trace = TuningTrace(config=config)
    total_trips = 0
    try:
        for s in range(1, config.rounds + 1):
            result = run_nrpt(
                ensemble, path, schedule, config.sweeps_per_round, model,
                streams=streams, reversible=config.reversible,
                record_chain_trace=False,
            )
            trace.exploration_steps += result.exploration_steps
            rejections = result.rejections
            round_trips = result.round_trips.completed_round_trips
            total_trips += round_trips
            trace._per_sweep.extend(
                int(c) + total_trips - round_trips for c in result.round_trips.per_scan
            )

            batches = [result.w_trace[:, n, :] for n in range(n_chains)]
            skl = estimate_skl(path, schedule, batches)

            grad_norm = 0.0
            skipped = False
            if tune_knots:
                est = estimate_skl_gradient(knots, schedule, batches)
                grad_norm = float(np.linalg.norm(est.gradient))
                if np.all(np.isfinite(est.gradient)):
                    opt, psi = adagrad_step(opt, psi, est.gradient)
                else:
                    skipped = True

            trace.rounds.append(RoundRecord(
                index=s,
                schedule=schedule.points.copy(),
                knots=knots,
                rejections=rejections,
                rejection_sum=float(rejections.sum()),
                rejection_odds_sum=_odds_sum(rejections),
                skl_estimate=skl,
                gradient_norm=grad_norm,
                round_trips=total_trips,
                round_trip_rate=round_trips / config.sweeps_per_round,
                step_skipped=skipped,
            ))

            if config.adapt_schedule:
                barrier = fit_cumulative_barrier(schedule, rejections)
                schedule = update_schedule(barrier, config.n_intervals)
            if tune_knots and not skipped:
                knots = apply_knot_update(knots, psi)
                psi = knots.log_coords()
                path = SplinePath(knots)
    except Exception as exc:  # pragma: no cover - exercised via tests
        trace.final_path = path
        trace.final_schedule = schedule
        trace.final_ensemble = ensemble
        raise TuningAborted(trace, exc) from exc

    trace.final_path = path
    trace.final_schedule = schedule
    trace.final_ensemble = ensemble
    return trace


COMPARATORS = ("nrpt-linear", "reversible-linear")


@dataclass
class BenchmarkResult:
    """Cumulative round-trip curves per method on a shared sweep axis."""

    curves: dict
    bound_rate: float | None
    total_sweeps: int

    def totals(self) -> dict:
        return {name: int(curve[-1]) for name, curve in self.curves.items()}


def run_benchmark(config: TuningConfig, comparators=COMPARATORS) -> BenchmarkResult:
    """Tuned spline run against linear-path baselines at equal budget.

    ``nrpt-linear`` spends the same budget adapting only the schedule on
    the straight-line path; ``reversible-linear`` runs classical reversible
    tempering (uniformly random parity each sweep) with no adaptation. The
    reference line is the straight-line path's asymptotic rate bound,
    computed in closed form for the Gaussian pair and from the measured
    rejection sum otherwise.
    """
    curves = {}

    spline_cfg = TuningConfig(
        model=config.model, n_intervals=config.n_intervals,
        segments=config.segments, rounds=config.rounds,
        sweeps_per_round=config.sweeps_per_round,
        learning_rate=config.learning_rate, seed=config.seed,
        path_kind="spline",
    )
    label = f"spline-k{config.segments}"
    spline_trace = path_opt_nrpt(spline_cfg)
    curves[label] = spline_trace.per_sweep_round_trips()

    linear_trace = None
    if "nrpt-linear" in comparators:
        linear_cfg = TuningConfig(
            model=config.model, n_intervals=config.n_intervals,
            rounds=config.rounds, sweeps_per_round=config.sweeps_per_round,
            learning_rate=config.learning_rate, seed=config.seed,
            path_kind="linear",
        )
        linear_trace = path_opt_nrpt(linear_cfg)
        curves["nrpt-linear"] = linear_trace.per_sweep_round_trips()

    total_sweeps = config.rounds * config.sweeps_per_round
    if "reversible-linear" in comparators:
        n_chains = config.n_intervals + 1
        streams = ReplicaStreams(config.seed, n_chains)
        ensemble = make_ensemble(config.model, n_chains, streams)
        result = run_nrpt(
            ensemble, LinearPath(), Schedule.uniform(config.n_intervals),
            total_sweeps, config.model, streams=streams, reversible=True,
            record_chain_trace=False,
        )
        curves["reversible-linear"] = np.asarray(result.round_trips.per_scan,
                                                 dtype=np.int64)

    bound = None
    if isinstance(config.model, GaussianPair):
        barrier = config.model.z / np.sqrt(np.pi)
        bound = float(1.0 / (2.0 + 2.0 * barrier))
    elif linear_trace is not None:
        barrier = linear_trace.rounds[-1].rejection_sum
        bound = float(1.0 / (2.0 + 2.0 * barrier))

    return BenchmarkResult(curves=curves, bound_rate=bound, total_sweeps=total_sweeps)
