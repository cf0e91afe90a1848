"""Isotropic Gaussian reference/target pair with closed-form tempering.

W_i(x) = -||x - mu_i 1||^2 / (2 sigma^2). For coordinates eta with
eta0 + eta1 > 0 the tempered law is Gaussian with

    mean(eta) = (eta0 mu0 + eta1 mu1) / (eta0 + eta1)
    var(eta)  = sigma^2 / (eta0 + eta1)      (per dimension)

which follows from completing the square in eta0 W0 + eta1 W1. States are
floats in one dimension and (d,) arrays otherwise.
"""
from __future__ import annotations

import math

import numpy as np

from .base import IidModel, NonNormalizableError


class GaussianPair(IidModel):
    def __init__(self, mu0: float, mu1: float, sigma: float, d: int = 1):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.mu0 = float(mu0)
        self.mu1 = float(mu1)
        self.sigma = float(sigma)
        self.d = int(d)
        self._half_prec = 0.5 / (sigma * sigma)

    @property
    def z(self) -> float:
        """Separation-to-scale ratio |mu1 - mu0| / sigma."""
        return abs(self.mu1 - self.mu0) / self.sigma

    def w_pair(self, state):
        if self.d == 1:
            d0 = state - self.mu0
            d1 = state - self.mu1
            return (-d0 * d0 * self._half_prec, -d1 * d1 * self._half_prec)
        d0 = state - self.mu0
        d1 = state - self.mu1
        return (-float(d0 @ d0) * self._half_prec, -float(d1 @ d1) * self._half_prec)

    def tempered_params(self, eta):
        """(mean, variance) of the tempered Gaussian at eta."""
        s = eta[0] + eta[1]
        if s <= 0.0:
            raise NonNormalizableError(f"eta0 + eta1 = {s} <= 0 is not normalizable")
        mean = (eta[0] * self.mu0 + eta[1] * self.mu1) / s
        return float(mean), float(self.sigma * self.sigma / s)

    def check_coordinates(self, eta) -> None:
        self.tempered_params(eta)

    def sample_iid(self, eta, rng):
        mean, var = self.tempered_params(eta)
        sd = math.sqrt(var)
        if self.d == 1:
            return mean + sd * rng.standard_normal()
        return mean + sd * rng.standard_normal(self.d)

    def sample_iid_many(self, eta, size, rng):
        mean, var = self.tempered_params(eta)
        sd = math.sqrt(var)
        if self.d == 1:
            return mean + sd * rng.standard_normal(size)
        return mean + sd * rng.standard_normal((size, self.d))

    def w_pair_many(self, states):
        x = np.asarray(states, dtype=float)
        if self.d == 1:
            d0 = x - self.mu0
            d1 = x - self.mu1
            return np.column_stack([-d0 * d0, -d1 * d1]) * self._half_prec
        d0 = ((x - self.mu0) ** 2).sum(axis=1)
        d1 = ((x - self.mu1) ** 2).sum(axis=1)
        return np.column_stack([-d0, -d1]) * self._half_prec

    def init_state(self, rng):
        if self.d == 1:
            return rng.standard_normal()
        return rng.standard_normal(self.d)

    def snapshot(self, state):
        if self.d == 1:
            return state
        return np.array(state)


def gaussian_pair(mu0: float, mu1: float, sigma: float, d: int = 1) -> GaussianPair:
    return GaussianPair(mu0, mu1, sigma, d)
