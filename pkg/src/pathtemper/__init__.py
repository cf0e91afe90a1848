"""Non-reversible parallel tempering on tunable annealing paths.

Core pieces: annealing paths over the exponential-family coefficient plane
(`paths`), target models with tempered exploration kernels (`models`), the
even-odd swap engine (`engine`), barrier-equalizing schedule adaptation
(`schedule`), the symmetric-KL tuning objective and optimizer
(`objective`), the outer tuning loop and benchmark harness (`tuner`), and
closed-form plus Monte Carlo diagnostics (`diagnostics`).
"""

from .diagnostics import (BarrierReport, empirical_instantaneous_rate,
                          fisher_length_gaussian, lambda_linear_gaussian,
                          secant_barrier, secant_rejection, snr_experiment)
from .engine import (Ensemble, NrptResult, RejectionStats, RoundTripLog,
                     deo_sweep, make_ensemble, predicted_round_trip_rate,
                     recount_round_trips, run_nrpt, swap_log_accept)
from .models import (BetaBinomialPair, GaussianMixtureModel, GaussianPair,
                     NonNormalizableError, beta_binomial_pair, gaussian_pair,
                     gmm_pair)
from .objective import (AdagradState, SklGradientEstimate, adagrad_step,
                        apply_knot_update, estimate_skl, estimate_skl_gradient,
                        skl_coefficients)
from .paths import (CustomPath, LinearPath, SplineKnots, SplinePath, eta_linear,
                    eta_spline, log_density_unnormalized, monotone_repair,
                    spline_best_approx_bound)
from .rng import ReplicaStreams, stream
from .schedule import (BarrierInterpolant, Schedule, fit_cumulative_barrier,
                       update_schedule)
from .tuner import (BenchmarkResult, TuningAborted, TuningConfig, TuningTrace,
                    path_opt_nrpt, run_benchmark)

__version__ = "0.1.0"
