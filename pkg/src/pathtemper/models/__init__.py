from .base import IidModel, Model, NonNormalizableError
from .betabinom import BetaBinomialPair, beta_binomial_pair
from .datasets import load_csv, load_dataset
from .gaussian import GaussianPair, gaussian_pair
from .mixture import GaussianMixtureModel, MixtureState, gmm_pair

__all__ = [
    "BetaBinomialPair",
    "GaussianMixtureModel",
    "GaussianPair",
    "IidModel",
    "MixtureState",
    "Model",
    "NonNormalizableError",
    "beta_binomial_pair",
    "gaussian_pair",
    "gmm_pair",
    "load_csv",
    "load_dataset",
]
