"""Non-reversible parallel tempering with deterministic even-odd swaps.

Each sweep applies one local exploration move per chain (chains own
independent random streams and could run concurrently), then attempts
Metropolis swaps on alternating even/odd neighbour pairs. Swap acceptance
statistics are accumulated for every neighbour pair on every sweep, not
just the active parity class, which doubles the rejection-estimator data
at no extra cost. Replica labels ride along with the states so round
trips, reference-to-target-and-back journeys of a single replica, can be
counted exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .paths import log_density_unnormalized
from .rng import ReplicaStreams


@dataclass
class RejectionStats:
    """Per-neighbour accumulators of (1 - alpha) across sweeps."""

    sum_rejection: np.ndarray
    sweeps: int = 0

    @classmethod
    def zeros(cls, n_pairs: int) -> "RejectionStats":
        return cls(np.zeros(n_pairs))

    def mean_rejections(self) -> np.ndarray:
        if self.sweeps == 0:
            raise ValueError("no sweeps accumulated")
        return self.sum_rejection / self.sweeps


@dataclass
class RoundTripLog:
    completed_round_trips: int = 0
    per_scan: list = field(default_factory=list)  # cumulative count per sweep


class Ensemble:
    """Chain states plus the replica bookkeeping of one PT run.

    ``replica_of_chain[c]`` is the replica currently occupying chain c and
    is a permutation of 0..N. ``direction_up`` is indexed by replica id; a
    replica flips to down only at the top chain and back to up only at
    chain 0, where the flip also completes one round trip.
    """

    def __init__(self, states, sweeps_done: int = 0):
        self.states = list(states)
        n = len(self.states)
        if n < 2:
            raise ValueError("need at least two chains")
        self.replica_of_chain = np.arange(n, dtype=np.int64)
        self.direction_up = np.ones(n, dtype=bool)
        self.sweeps_done = int(sweeps_done)

    @property
    def n_chains(self) -> int:
        return len(self.states)

    def validate(self) -> None:
        occupied = np.bincount(self.replica_of_chain, minlength=self.n_chains)
        if not np.all(occupied == 1):
            raise AssertionError("replica_of_chain is not a permutation")


def make_ensemble(model, n_chains: int, streams: ReplicaStreams) -> Ensemble:
    return Ensemble([model.init_state(streams.init) for _ in range(n_chains)])


def swap_log_accept(path, t_lo: float, t_hi: float, w_lo, w_hi) -> float:
    """Log acceptance probability of exchanging the states at t_lo, t_hi.

    Equals min(0, [eta(t_lo).W_hi + eta(t_hi).W_lo] -
                  [eta(t_lo).W_lo + eta(t_hi).W_hi]).
    """
    if t_lo > t_hi:
        raise ValueError("t_lo must not exceed t_hi")
    crossed = (log_density_unnormalized(path, t_lo, w_hi)
               + log_density_unnormalized(path, t_hi, w_lo))
    current = (log_density_unnormalized(path, t_lo, w_lo)
               + log_density_unnormalized(path, t_hi, w_hi))
    return min(0.0, crossed - current)


def _sweep(ensemble: Ensemble, eta_grid: np.ndarray, model, streams: ReplicaStreams,
           w_values: np.ndarray, stats: RejectionStats, trips: RoundTripLog,
           reversible: bool = False) -> np.ndarray:
    """One exploration-plus-communication sweep; returns all neighbour alphas.

    Mutates ensemble, w_values (per-chain (W0, W1) rows), stats and trips.
    """
    states = ensemble.states
    n_chains = len(states)
    m = ensemble.sweeps_done + 1

    for c in range(n_chains):
        s = model.explore(eta_grid[c], states[c], streams.explore[c])
        states[c] = s
        w_values[c, 0], w_values[c, 1] = model.w_pair(s)

    lo, hi = eta_grid[:-1], eta_grid[1:]
    w_lo, w_hi = w_values[:-1], w_values[1:]
    delta = ((lo * w_hi).sum(axis=1) + (hi * w_lo).sum(axis=1)
             - (lo * w_lo).sum(axis=1) - (hi * w_hi).sum(axis=1))
    alphas = np.exp(np.minimum(0.0, delta))

    stats.sum_rejection += 1.0 - alphas
    stats.sweeps += 1

    # Uniform per pair every sweep keeps stream consumption fixed whether or
    # not the pair is in the active parity class.
    uniforms = streams.swap.random(n_chains - 1)
    if reversible:
        start = int(streams.swap.integers(2))
    else:
        start = 0 if m % 2 == 0 else 1
    rep = ensemble.replica_of_chain
    for n in range(start, n_chains - 1, 2):
        if uniforms[n] <= alphas[n]:
            states[n], states[n + 1] = states[n + 1], states[n]
            w_values[[n, n + 1]] = w_values[[n + 1, n]]
            rep[n], rep[n + 1] = rep[n + 1], rep[n]

    ensemble.sweeps_done = m
    if __debug__:
        ensemble.validate()

    top = rep[-1]
    if ensemble.direction_up[top]:
        ensemble.direction_up[top] = False
    bottom = rep[0]
    if not ensemble.direction_up[bottom]:
        ensemble.direction_up[bottom] = True
        trips.completed_round_trips += 1
    trips.per_scan.append(trips.completed_round_trips)
    return alphas


def deo_sweep(ensemble: Ensemble, schedule, path, model, streams: ReplicaStreams,
              *, stats: RejectionStats | None = None,
              trips: RoundTripLog | None = None,
              eta_grid: np.ndarray | None = None,
              reversible: bool = False):
    """Public single-sweep entry point; returns (ensemble, alphas)."""
    points = np.asarray(getattr(schedule, "points", schedule), dtype=float)
    if eta_grid is None:
        eta_grid = path.eta_grid(points)
    if stats is None:
        stats = RejectionStats.zeros(len(points) - 1)
    if trips is None:
        trips = RoundTripLog()
    w_values = np.empty((len(points), 2))
    for c, s in enumerate(ensemble.states):
        w_values[c, 0], w_values[c, 1] = model.w_pair(s)
    alphas = _sweep(ensemble, eta_grid, model, streams, w_values, stats, trips,
                    reversible=reversible)
    return ensemble, alphas


@dataclass
class NrptResult:
    rejections: np.ndarray        # per-neighbour mean rejection over the run
    stats: RejectionStats
    round_trips: RoundTripLog
    w_trace: np.ndarray           # (sweeps, chains, 2) post-swap (W0, W1)
    alpha_trace: np.ndarray       # (sweeps, chains - 1) acceptance probabilities
    chain_trace: list             # top-chain snapshots, one per sweep
    replica_log: np.ndarray       # (sweeps, chains) replica_of_chain
    ensemble: Ensemble
    exploration_steps: int

    @property
    def round_trip_rate(self) -> float:
        return self.round_trips.completed_round_trips / self.stats.sweeps


def run_nrpt(ensemble: Ensemble, path, schedule, sweeps: int, model,
             streams: ReplicaStreams | None = None, seed: int | None = None,
             *, reversible: bool = False, record_chain_trace: bool = True) -> NrptResult:
    """Run ``sweeps`` exploration/communication rounds.

    Either an existing stream bundle or a seed must be given. The ensemble
    is advanced in place (and also returned), so tuning loops can warm-start
    the next run from the final state.
    """
    if sweeps < 1:
        raise ValueError("need at least one sweep")
    points = np.asarray(getattr(schedule, "points", schedule), dtype=float)
    n_chains = len(points)
    if n_chains != ensemble.n_chains:
        raise ValueError(
            f"schedule has {n_chains} points but ensemble has {ensemble.n_chains} chains"
        )
    if streams is None:
        if seed is None:
            raise ValueError("pass streams or a seed")
        streams = ReplicaStreams(seed, n_chains)

    eta_grid = path.eta_grid(points)
    for eta in eta_grid:
        model.check_coordinates(eta)

    stats = RejectionStats.zeros(n_chains - 1)
    trips = RoundTripLog()
    w_values = np.empty((n_chains, 2))
    for c, s in enumerate(ensemble.states):
        w_values[c, 0], w_values[c, 1] = model.w_pair(s)

    w_trace = np.empty((sweeps, n_chains, 2))
    alpha_trace = np.empty((sweeps, n_chains - 1))
    replica_log = np.empty((sweeps, n_chains), dtype=np.int64)
    chain_trace = [] if record_chain_trace else None

    for m in range(sweeps):
        alpha_trace[m] = _sweep(ensemble, eta_grid, model, streams, w_values,
                                stats, trips, reversible=reversible)
        w_trace[m] = w_values
        replica_log[m] = ensemble.replica_of_chain
        if record_chain_trace:
            chain_trace.append(model.snapshot(ensemble.states[-1]))

    return NrptResult(
        rejections=stats.mean_rejections(),
        stats=stats,
        round_trips=trips,
        w_trace=w_trace,
        alpha_trace=alpha_trace,
        chain_trace=chain_trace if record_chain_trace else [],
        replica_log=replica_log,
        ensemble=ensemble,
        exploration_steps=sweeps * n_chains,
    )


def predicted_round_trip_rate(rejections) -> float:
    """Round-trip rate implied by per-neighbour rejections: the reciprocal
    of 2 + 2 * sum r / (1 - r). A rejection of one collapses the rate to 0."""
    r = np.asarray(rejections, dtype=float)
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise ValueError("rejections must lie in [0, 1]")
    if np.any(r == 1.0):
        return 0.0
    return float(1.0 / (2.0 + 2.0 * np.sum(r / (1.0 - r))))


def recount_round_trips(replica_log: np.ndarray) -> int:
    """Recount completed round trips from a replica trajectory log.

    Walks each replica's chain trajectory and counts every visit to chain 0
    that follows a visit to the top chain. Independent of the engine's
    incremental bookkeeping; used to audit it.
    """
    replica_log = np.asarray(replica_log)
    sweeps, n_chains = replica_log.shape
    top = n_chains - 1
    # chain_of[m, r] = chain occupied by replica r after sweep m
    chain_of = np.argsort(replica_log, axis=1)
    done = 0
    for r in range(n_chains):
        seen_top = False
        for c in chain_of[:, r]:
            if c == top:
                seen_top = True
            elif c == 0 and seen_top:
                done += 1
                seen_top = False
    return done
