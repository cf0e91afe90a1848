import math

import numpy as np
import pytest
from scipy import stats

from pathtemper.diagnostics import (BarrierReport, empirical_instantaneous_rate,
                                    fisher_length_gaussian,
                                    lambda_linear_gaussian, secant_barrier,
                                    secant_rejection, snr_experiment)
from pathtemper.engine import make_ensemble, run_nrpt
from pathtemper.models import gaussian_pair, gmm_pair
from pathtemper.paths import LinearPath, SplineKnots, SplinePath
from pathtemper.rng import ReplicaStreams
from pathtemper.schedule import Schedule

Z10 = 10.0 / math.sqrt(math.pi)


class TestClosedForms:
    def test_lambda_unit(self):
        assert lambda_linear_gaussian(math.sqrt(math.pi)) == pytest.approx(1.0)

    def test_lambda_values(self):
        assert lambda_linear_gaussian(10.0) == pytest.approx(5.6419, abs=1e-4)
        assert lambda_linear_gaussian(200.0) == pytest.approx(112.8379, abs=1e-4)

    def test_lambda_domain(self):
        with pytest.raises(ValueError):
            lambda_linear_gaussian(0.0)

    def test_fisher_length_vanishes_at_zero_separation(self):
        assert fisher_length_gaussian(1e-9) == pytest.approx(0.0, abs=1e-6)

    def test_fisher_length_value(self):
        expected = math.sqrt(2.0) * math.log(1.0 + 25.0 + 2.5 * math.sqrt(108.0))
        assert fisher_length_gaussian(10.0) == pytest.approx(expected)
        assert expected == pytest.approx(5.587, abs=1e-3)

    @pytest.mark.parametrize("z", [10.0, 20.0, 50.0, 100.0, 200.0])
    def test_geodesic_beats_linear(self, z):
        assert fisher_length_gaussian(z) / math.sqrt(2.0) < lambda_linear_gaussian(z)


class TestInstantaneousRate:
    @pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
    def test_gaussian_linear_matches_oracle(self, t):
        m = gaussian_pair(-1.0, 1.0, 0.2)
        est, se = empirical_instantaneous_rate(LinearPath(), t, m, 200_000, seed=3)
        assert abs(est - Z10) < 3 * se

    def test_identical_endpoints_zero(self):
        m = gaussian_pair(0.2, 0.2, 0.5)
        est, se = empirical_instantaneous_rate(LinearPath(), 0.4, m, 1000, seed=4)
        assert est == 0.0

    def test_spline_uses_right_segment_at_knot(self):
        m = gaussian_pair(-1.0, 1.0, 0.5)
        knots = SplineKnots(np.array([[1, 0], [0.5, 0.5], [0, 1]], dtype=float))
        path = SplinePath(knots)
        est_at_knot, _ = empirical_instantaneous_rate(path, 0.5, m, 50_000, seed=5)
        est_right, _ = empirical_instantaneous_rate(path, 0.5001, m, 50_000, seed=5)
        assert est_at_knot == pytest.approx(est_right, rel=0.05)

    def test_requires_exact_sampler(self):
        m = gmm_pair(np.array([0.0, 1.0, 2.0]), 2, 0.5, 1.0)
        with pytest.raises(TypeError):
            empirical_instantaneous_rate(LinearPath(), 0.5, m, 100)


class TestSecantDiagnostics:
    def test_rejection_slope_converges_to_rate(self):
        # r(t, t + delta) / delta approaches the instantaneous rate from
        # below as the width shrinks.
        m = gaussian_pair(-1.0, 1.0, 0.2)
        t = 0.45
        gaps = []
        for delta in (0.1, 0.05, 0.025):
            r = secant_rejection(LinearPath(), t, t + delta, m, 1_000_000, seed=6)
            gaps.append(abs(r / delta - Z10))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_barrier_matches_closed_form_segment(self):
        # Along the straight line the segment barrier is delta * z / sqrt(pi).
        m = gaussian_pair(-1.0, 1.0, 0.2)
        est = secant_barrier(LinearPath(), 0.3, 0.5, m, 50_000, nodes=16, seed=7)
        assert est == pytest.approx(0.2 * Z10, rel=0.02)

    def test_error_curve_requires_scalar_gaussian(self):
        from pathtemper.diagnostics import secant_error_curve
        from pathtemper.models import beta_binomial_pair

        with pytest.raises(TypeError):
            secant_error_curve(LinearPath(), 0.5, [0.1],
                               beta_binomial_pair(2, 2, 5, 10), 100)


class TestBarrierReport:
    def test_fields_and_ordering(self):
        m = gaussian_pair(-1.0, 1.0, 0.4)
        streams = ReplicaStreams(8, 9)
        ens = make_ensemble(m, 9, streams)
        result = run_nrpt(ens, LinearPath(), Schedule.uniform(8), 3000, m,
                          streams=streams, record_chain_trace=False)
        report = BarrierReport.from_run(result)
        assert report.rejection_odds_sum >= report.rejection_sum >= 0.0
        assert report.sweeps == 3000
        payload = report.to_jsonable()
        assert set(payload) == {
            "rejection_sum", "rejection_odds_sum", "predicted_rate",
            "measured_rate", "round_trips", "sweeps",
        }


class TestSnrExperiment:
    def test_row_schema(self):
        rows = snr_experiment([0.0, 0.4], 50, 50, seed=1)
        assert len(rows) == 4
        objectives = {(r["phi"], r["objective"]) for r in rows}
        assert objectives == {(0.0, "rejection"), (0.0, "skl"),
                              (0.4, "rejection"), (0.4, "skl")}

    def test_zero_separation_zero_signal(self):
        rows = snr_experiment([0.0], 50, 200, seed=2)
        for r in rows:
            assert r["snr"] < 0.5

    def test_replicates_validation(self):
        with pytest.raises(ValueError):
            snr_experiment([0.5], 50, 1)

    def test_skl_gradient_mean_matches_truth(self):
        # d/dphi SKL(N(0,1), N(phi,1)) = 2 phi.
        rows = snr_experiment([0.8], 200, 400, seed=3)
        skl_row = next(r for r in rows if r["objective"] == "skl")
        se = skl_row["grad_sd"] / math.sqrt(400)
        assert abs(skl_row["grad_mean"] - 1.6) < 4 * se

    def test_rejection_gradient_mean_matches_closed_form(self):
        # For N(0,1) vs N(phi,1) the swap log ratio is Gaussian with mean
        # -phi^2 and variance 2 phi^2, giving the rejection curve
        # r(phi) = 1 - 2 Phi(-phi / sqrt(2)) and hence the derivative
        # sqrt(2) * pdf(phi / sqrt(2)).
        phi = 0.8
        truth = math.sqrt(2.0) * math.exp(-phi * phi / 4.0) / math.sqrt(2 * math.pi)
        rows = snr_experiment([phi], 500, 2000, seed=5)
        rej = next(r for r in rows if r["objective"] == "rejection")
        se = rej["grad_sd"] / math.sqrt(2000)
        assert abs(rej["grad_mean"] - truth) < 4 * se
        # and the rejection estimate itself matches the curve
        r_true = 1.0 - 2.0 * stats.norm.cdf(-phi / math.sqrt(2.0))
        assert rej["mean_rejection"] == pytest.approx(r_true, abs=0.01)
