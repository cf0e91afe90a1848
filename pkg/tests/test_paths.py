import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathtemper.paths import (CustomPath, LinearPath, SplineKnots, SplinePath,
                              eta_linear, eta_spline, log_density_unnormalized,
                              monotone_repair, spline_best_approx_bound)


def knots_k2():
    return SplineKnots(np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]))


class TestEtaLinear:
    def test_endpoints(self):
        assert np.array_equal(eta_linear(0.0), [1.0, 0.0])
        assert np.array_equal(eta_linear(1.0), [0.0, 1.0])

    def test_interpolation(self):
        assert np.allclose(eta_linear(0.25), [0.75, 0.25])

    @pytest.mark.parametrize("t", [-0.1, 1.1, 5.0])
    def test_domain_error(self, t):
        with pytest.raises(ValueError):
            eta_linear(t)


class TestEtaSpline:
    def test_endpoints(self):
        phi = knots_k2()
        assert np.array_equal(eta_spline(phi, 0.0), [1.0, 0.0])
        assert np.array_equal(eta_spline(phi, 1.0), [0.0, 1.0])

    def test_segment_interpolation(self):
        # k=1 bracketing (1,0) and (0.5,0.5) with equal weights
        assert np.allclose(eta_spline(knots_k2(), 0.25), [0.75, 0.25])

    def test_knot_hit(self):
        assert np.allclose(eta_spline(knots_k2(), 0.5), [0.5, 0.5])

    def test_invalid_knots_rejected(self):
        with pytest.raises(ValueError):
            eta_spline(np.array([[1.0, 0.0], [0.9, -0.1], [0.0, 1.0]]), 0.3)
        with pytest.raises(ValueError):
            SplineKnots(np.array([[1.0, 0.0], [0.2, 0.1], [0.6, 1.0], [0.0, 1.0]]))

    def test_continuity_at_segment_boundaries(self):
        phi = SplineKnots(np.array([[1, 0], [0.7, 0.2], [0.3, 0.6], [0.0, 1.0]], dtype=float))
        path = SplinePath(phi)
        for k in range(1, phi.segments):
            t = k / phi.segments
            below = path.eta(t - 1e-12)
            at = path.eta(t)
            assert np.allclose(below, at, atol=1e-9)
            assert np.allclose(at, phi.knots[k])


@st.composite
def monotone_knots(draw, max_segments=6):
    k = draw(st.integers(min_value=2, max_value=max_segments))
    u0 = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=k - 1, max_size=k - 1)),
                reverse=True)
    u1 = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=k - 1, max_size=k - 1)))
    interior = np.column_stack([u0, u1])
    return SplineKnots.on_line(k).with_interior(interior)


class TestSplineProperties:
    @given(monotone_knots(), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_convexity_containment(self, phi, t):
        out = eta_spline(phi, t)
        k = min(max(int(np.ceil(phi.segments * t)), 1), phi.segments)
        pair = phi.knots[k - 1: k + 1]
        assert np.all(out >= pair.min(axis=0) - 1e-12)
        assert np.all(out <= pair.max(axis=0) + 1e-12)

    @given(monotone_knots())
    @settings(max_examples=100, deadline=None)
    def test_monotone_flow(self, phi):
        grid = SplinePath(phi).eta_grid(np.linspace(0, 1, 257))
        assert np.all(np.diff(grid[:, 0]) <= 1e-12)
        assert np.all(np.diff(grid[:, 1]) >= -1e-12)


class TestMonotoneRepair:
    def test_monotone_input_unchanged(self):
        phi = SplineKnots(np.array([[1, 0], [0.6, 0.3], [0.2, 0.9], [0, 1]], dtype=float))
        out = monotone_repair(phi)
        assert np.array_equal(out.knots, phi.knots)

    def test_greedy_drop_and_refill(self):
        # Second interior knot breaks monotonicity against the first; the
        # greedy scan keeps ((1,0),(0.4,0.6),(0,1)) and refills the dropped
        # slot halfway between its retained neighbours.
        raw = np.array([[1, 0], [0.4, 0.6], [0.7, 0.3], [0, 1]], dtype=float)
        out = monotone_repair(raw)
        expected = np.array([[1, 0], [0.4, 0.6], [0.2, 0.8], [0, 1]], dtype=float)
        assert np.allclose(out.knots, expected)

    @pytest.mark.parametrize("endpoint", [(1.0, 0.0), (0.0, 1.0)])
    def test_interior_equal_to_endpoint_refilled_evenly(self, endpoint):
        raw = np.array([[1, 0], list(endpoint), list(endpoint), [0, 1]], dtype=float)
        out = monotone_repair(raw)
        line = SplineKnots.on_line(3)
        assert np.allclose(out.knots, line.knots)

    def test_out_of_square_knot_dropped(self):
        raw = np.array([[1, 0], [0.5, 1.4], [0, 1]], dtype=float)
        out = monotone_repair(raw)
        assert np.allclose(out.knots, SplineKnots.on_line(2).knots)

    @given(st.integers(2, 6), st.data())
    @settings(max_examples=150, deadline=None)
    def test_idempotent_and_valid(self, k, data):
        interior = np.array([
            [data.draw(st.floats(-0.5, 1.5)), data.draw(st.floats(-0.5, 1.5))]
            for _ in range(k - 1)
        ])
        raw = np.vstack([[1.0, 0.0], interior, [0.0, 1.0]])
        once = monotone_repair(raw)
        twice = monotone_repair(once)
        assert np.array_equal(once.knots, twice.knots)
        # output satisfies the knot invariants by construction
        assert np.all(np.diff(once.knots[:, 0]) <= 0)
        assert np.all(np.diff(once.knots[:, 1]) >= 0)


class TestPathDescriptors:
    def test_custom_path_endpoint_enforced(self):
        with pytest.raises(ValueError):
            CustomPath(lambda t: np.array([1.0 - t, 0.5 * t]))

    def test_custom_path_evaluates(self):
        path = CustomPath(lambda t: np.array([(1 - t) ** 2, 1 - (1 - t) ** 2]))
        assert np.allclose(path.eta(0.5), [0.25, 0.75])
        assert np.allclose(path.derivative(0.5), [-1.0, 1.0], atol=1e-5)

    def test_spline_derivative_right_segment_convention(self):
        path = SplinePath(knots_k2())
        # at the interior knot t=0.5 the right segment (0.5,0.5)->(0,1) rules
        assert np.allclose(path.derivative(0.5), [-1.0, 1.0])
        assert np.allclose(path.derivative(0.25), [-1.0, 1.0])
        assert np.allclose(path.derivative(1.0), [-1.0, 1.0])


class TestLogDensity:
    def test_target_endpoint(self):
        assert log_density_unnormalized(LinearPath(), 1.0, (-3.2, -0.7)) == pytest.approx(-0.7)

    def test_midpoint_average(self):
        assert log_density_unnormalized(LinearPath(), 0.5, (-2.0, -4.0)) == pytest.approx(-3.0)

    def test_spline_combination(self):
        path = SplinePath(knots_k2())
        assert log_density_unnormalized(path, 0.25, (-2.0, -4.0)) == pytest.approx(-2.5)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            log_density_unnormalized(LinearPath(), 0.5, (np.inf, 0.0))


class TestApproximationBound:
    @pytest.mark.parametrize("m,k,expected", [(1.0, 1, 0.25), (4.0, 2, 0.25), (1.0, 10, 0.0025)])
    def test_values(self, m, k, expected):
        assert spline_best_approx_bound(m, k) == pytest.approx(expected)

    def test_validation(self):
        with pytest.raises(ValueError):
            spline_best_approx_bound(-1.0, 2)
        with pytest.raises(ValueError):
            spline_best_approx_bound(1.0, 0)

    @pytest.mark.parametrize("k", [1, 2, 4, 8])
    def test_quadratic_target_within_bound(self, k):
        # eta(t) = ((1-t)^2, 1-(1-t)^2) has second derivative bounded by 2;
        # the spline through its values at the segment ends must achieve the
        # guaranteed sup-norm error.
        target = lambda t: np.column_stack([(1 - t) ** 2, 1 - (1 - t) ** 2])
        nodes = np.linspace(0.0, 1.0, k + 1)
        phi = SplineKnots(target(nodes))
        path = SplinePath(phi)
        grid = np.linspace(0.0, 1.0, 2001)
        err = np.abs(path.eta_grid(grid) - target(grid)).max()
        assert err <= spline_best_approx_bound(2.0, k) + 1e-12


class TestSerialization:
    def test_json_round_trip(self):
        phi = knots_k2()
        again = SplineKnots.from_jsonable(phi.to_jsonable())
        assert np.array_equal(phi.knots, again.knots)

    def test_log_coords_floor(self):
        phi = SplineKnots(np.array([[1, 0], [0.5, 0.0], [0, 1]], dtype=float))
        psi = phi.log_coords()
        assert np.isfinite(psi).all()
        assert psi[1] == pytest.approx(np.log(1e-6))
