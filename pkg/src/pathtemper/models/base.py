"""Common model interface: log-density pairs plus exploration kernels.

A model bundles the reference/target log densities W(x) = (W0(x), W1(x)),
both up to additive constants, with a local exploration kernel whose
invariant law at coordinates eta is proportional to exp(eta . W). Models
with closed-form tempered laws expose i.i.d. kernels; the rest compose
MCMC conditional updates.
"""
from __future__ import annotations

import numpy as np


class NonNormalizableError(ValueError):
    """Coordinates eta outside the model's normalizable region."""


class Model:
    kernel_kind = "iid-closed-form"

    def w_pair(self, state):
        """(W0(state), W1(state)) as floats."""
        raise NotImplementedError

    def check_coordinates(self, eta) -> None:
        """Raise NonNormalizableError if exp(eta . W) is not integrable."""
        raise NotImplementedError

    def explore(self, eta, state, rng: np.random.Generator):
        """One kernel application at eta; returns a new state."""
        raise NotImplementedError

    def init_state(self, rng: np.random.Generator):
        raise NotImplementedError

    def snapshot(self, state):
        """Trace-friendly copy of a state; override for composite states."""
        return state


class IidModel(Model):
    """Kernel draws fresh exact samples; output ignores the input state."""

    kernel_kind = "iid-closed-form"

    def sample_iid(self, eta, rng: np.random.Generator):
        raise NotImplementedError

    def explore(self, eta, state, rng: np.random.Generator):
        return self.sample_iid(eta, rng)

    def sample_iid_many(self, eta, size: int, rng: np.random.Generator):
        """Batch of exact draws; override with a vectorized form."""
        return np.array([self.sample_iid(eta, rng) for _ in range(size)])

    def w_pair_many(self, states) -> np.ndarray:
        """(W0, W1) rows for a batch of states; override with a vectorized form."""
        return np.array([self.w_pair(s) for s in states])
