"""Bayesian Gaussian mixture with unmarginalized labels.

State: mixture proportions w on the simplex, component means mu, and one
cluster label per observation. The reference log density W0 is the prior
(flat Dirichlet on w, independent normals on mu, labels uniform); the
target W1 adds the label-complete likelihood. Tempering raises the prior
to eta0 + eta1 and the likelihood to eta1, and every conditional below is
exact for that tempered law, so one scan leaves it invariant.

The kernel is Gibbs for means, labels and proportions, plus a
Metropolis-Hastings proportion move proposed from the Dirichlet fit to the
label-marginalized responsibilities at the current means, which mixes the
proportions across modes faster than the label-conditional draw alone.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .base import Model, NonNormalizableError


class MixtureState:
    __slots__ = ("w", "mu", "z")

    def __init__(self, w, mu, z):
        self.w = np.asarray(w, dtype=float)
        self.mu = np.asarray(mu, dtype=float)
        self.z = np.asarray(z, dtype=np.int64)

    def copy(self) -> "MixtureState":
        return MixtureState(self.w.copy(), self.mu.copy(), self.z.copy())


def _log_dirichlet(w, alpha):
    return float(
        np.sum((alpha - 1.0) * np.log(w)) + gammaln(np.sum(alpha)) - np.sum(gammaln(alpha))
    )


class GaussianMixtureModel(Model):
    kernel_kind = "gibbs-composite"

    def __init__(self, data, components: int, prior_mean: float,
                 component_sd: float, prior_sd: float = 1.0):
        data = np.asarray(data, dtype=float).ravel()
        if data.size == 0:
            raise ValueError("data must be non-empty")
        if components < 2:
            raise ValueError("need at least two mixture components")
        if component_sd <= 0 or prior_sd <= 0:
            raise ValueError("scales must be positive")
        self.data = data
        self.n = data.size
        self.components = int(components)
        self.prior_mean = float(prior_mean)
        self.prior_var = float(prior_sd) ** 2
        self.component_var = float(component_sd) ** 2

    # -- log densities -------------------------------------------------

    def _log_prior(self, state) -> float:
        dm = state.mu - self.prior_mean
        # Flat Dirichlet contributes a constant; dropped like all constants.
        return float(-0.5 * (dm @ dm) / self.prior_var)

    def _log_lik(self, state) -> float:
        mu_z = state.mu[state.z]
        w_z = state.w[state.z]
        resid = self.data - mu_z
        return float(np.sum(np.log(w_z)) - 0.5 * (resid @ resid) / self.component_var)

    def w_pair(self, state):
        lp = self._log_prior(state)
        return (lp, lp + self._log_lik(state))

    def check_coordinates(self, eta) -> None:
        if eta[0] + eta[1] <= 0.0 or eta[1] < 0.0:
            raise NonNormalizableError(
                f"mixture tempering needs eta0 + eta1 > 0 and eta1 >= 0, got {tuple(eta)}"
            )

    # -- conditional updates --------------------------------------------

    def _counts_sums(self, z):
        counts = np.bincount(z, minlength=self.components).astype(float)
        sums = np.bincount(z, weights=self.data, minlength=self.components)
        return counts, sums

    def _loglik_matrix(self, mu):
        d = self.data[:, None] - mu[None, :]
        return -0.5 * d * d / self.component_var

    def _update_means(self, state, prior_w, lik_w, rng):
        counts, sums = self._counts_sums(state.z)
        prec = prior_w / self.prior_var + lik_w * counts / self.component_var
        mean = (prior_w * self.prior_mean / self.prior_var
                + lik_w * sums / self.component_var) / prec
        state.mu = mean + rng.standard_normal(self.components) / np.sqrt(prec)

    def _update_labels(self, state, lik_w, rng):
        if lik_w == 0.0:
            state.z = rng.integers(self.components, size=self.n)
            return
        logits = lik_w * (np.log(np.maximum(state.w, 1e-300))[None, :]
                          + self._loglik_matrix(state.mu))
        gumbel = rng.gumbel(size=(self.n, self.components))
        state.z = np.argmax(logits + gumbel, axis=1)

    def _update_weights_gibbs(self, state, lik_w, rng):
        counts, _ = self._counts_sums(state.z)
        state.w = rng.dirichlet(1.0 + lik_w * counts)

    def _marginal_counts(self, w, mu, lik_w):
        logits = lik_w * (np.log(np.maximum(w, 1e-300))[None, :] + self._loglik_matrix(mu))
        logits -= logits.max(axis=1, keepdims=True)
        resp = np.exp(logits)
        resp /= resp.sum(axis=1, keepdims=True)
        return resp.sum(axis=0)

    def _update_weights_mh(self, state, lik_w, rng):
        counts, _ = self._counts_sums(state.z)
        fwd_alpha = 1.0 + lik_w * self._marginal_counts(state.w, state.mu, lik_w)
        proposal = rng.dirichlet(fwd_alpha)
        rev_alpha = 1.0 + lik_w * self._marginal_counts(proposal, state.mu, lik_w)
        target_exp = lik_w * counts
        log_ratio = (
            float(target_exp @ (np.log(np.maximum(proposal, 1e-300))
                                - np.log(np.maximum(state.w, 1e-300))))
            + _log_dirichlet(state.w, rev_alpha)
            - _log_dirichlet(proposal, fwd_alpha)
        )
        if np.log(rng.random()) <= min(0.0, log_ratio):
            state.w = proposal

    def explore(self, eta, state, rng):
        self.check_coordinates(eta)
        prior_w = float(eta[0] + eta[1])
        lik_w = float(eta[1])
        new = state.copy()
        self._update_means(new, prior_w, lik_w, rng)
        self._update_labels(new, lik_w, rng)
        self._update_weights_gibbs(new, lik_w, rng)
        self._update_weights_mh(new, lik_w, rng)
        return new

    def init_state(self, rng):
        return MixtureState(
            np.full(self.components, 1.0 / self.components),
            np.zeros(self.components),
            np.zeros(self.n, dtype=np.int64),
        )

    def snapshot(self, state):
        return {"w": state.w.copy(), "mu": state.mu.copy()}


def gmm_pair(data, components: int, prior_mean: float, component_sd: float,
             prior_sd: float = 1.0) -> GaussianMixtureModel:
    return GaussianMixtureModel(data, components, prior_mean, component_sd, prior_sd)
