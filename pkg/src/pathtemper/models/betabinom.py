"""Conjugate beta-binomial pair with closed-form tempering.

The reference is the prior Beta(a0, b0) and the target the posterior after
observing ``successes`` out of ``trials``:

    W0(p) = (a0 - 1) log p + (b0 - 1) log(1 - p)
    W1(p) = (a0 + S - 1) log p + (b0 + R - S - 1) log(1 - p)

so eta0 W0 + eta1 W1 is again a Beta log density. The tempered shape
parameters are affine in eta:

    alpha(eta) = (a0 - 1) eta0 + (a0 + S - 1) eta1 + 1
    beta(eta)  = (b0 - 1) eta0 + (b0 + R - S - 1) eta1 + 1
"""
from __future__ import annotations

import math

import numpy as np

from .base import IidModel, NonNormalizableError


class BetaBinomialPair(IidModel):
    def __init__(self, a0: float, b0: float, successes: int, trials: int):
        if a0 <= 0 or b0 <= 0:
            raise ValueError("prior shape parameters must be positive")
        if not 0 <= successes <= trials:
            raise ValueError("need 0 <= successes <= trials")
        self.a0 = float(a0)
        self.b0 = float(b0)
        self.successes = int(successes)
        self.trials = int(trials)

    def w_pair(self, state):
        p = float(state)
        if not 0.0 < p < 1.0:
            raise ValueError(f"state p={p} outside (0, 1)")
        lp = math.log(p)
        lq = math.log1p(-p)
        w0 = (self.a0 - 1.0) * lp + (self.b0 - 1.0) * lq
        w1 = (self.a0 + self.successes - 1.0) * lp + (
            self.b0 + self.trials - self.successes - 1.0
        ) * lq
        return (w0, w1)

    def tempered_params(self, eta):
        """Shape parameters (alpha, beta) of the tempered Beta law."""
        a = (self.a0 - 1.0) * eta[0] + (self.a0 + self.successes - 1.0) * eta[1] + 1.0
        b = (self.b0 - 1.0) * eta[0] + (
            self.b0 + self.trials - self.successes - 1.0
        ) * eta[1] + 1.0
        if a <= 0.0 or b <= 0.0:
            raise NonNormalizableError(f"tempered Beta({a}, {b}) is not normalizable")
        return float(a), float(b)

    def check_coordinates(self, eta) -> None:
        self.tempered_params(eta)

    def sample_iid(self, eta, rng):
        a, b = self.tempered_params(eta)
        return float(rng.beta(a, b))

    def sample_iid_many(self, eta, size, rng):
        a, b = self.tempered_params(eta)
        return rng.beta(a, b, size)

    def w_pair_many(self, states):
        p = np.asarray(states, dtype=float)
        lp = np.log(p)
        lq = np.log1p(-p)
        w0 = (self.a0 - 1.0) * lp + (self.b0 - 1.0) * lq
        w1 = (self.a0 + self.successes - 1.0) * lp + (
            self.b0 + self.trials - self.successes - 1.0
        ) * lq
        return np.column_stack([w0, w1])

    def init_state(self, rng):
        return 0.5


def beta_binomial_pair(a0: float, b0: float, successes: int, trials: int) -> BetaBinomialPair:
    return BetaBinomialPair(a0, b0, successes, trials)
