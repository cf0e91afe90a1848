import numpy as np
import pytest

from pathtemper.rng import stream
from pathtemper.schedule import (BarrierInterpolant, Schedule,
                                 fit_cumulative_barrier, update_schedule)


class TestSchedule:
    def test_uniform(self):
        s = Schedule.uniform(4)
        assert np.allclose(s.points, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            Schedule(np.array([0.0, 0.7, 0.4, 1.0]))
        with pytest.raises(ValueError):
            Schedule(np.array([0.1, 0.5, 1.0]))

    def test_duplicates_allowed(self):
        s = Schedule(np.array([0.0, 0.5, 0.5, 1.0]))
        assert s.n_intervals == 3


class TestBarrierInterpolant:
    def test_constant_rejections_give_exact_line(self):
        sched = Schedule.uniform(5)
        interp = fit_cumulative_barrier(sched, np.full(5, 0.3))
        grid = np.linspace(0, 1, 401)
        assert np.allclose(interp(grid), 0.3 * 5 * grid, atol=1e-12)

    def test_fit_knots_and_monotonicity(self):
        sched = Schedule(np.array([0.0, 0.5, 1.0]))
        interp = fit_cumulative_barrier(sched, np.array([0.3, 0.1]))
        assert interp(0.0) == pytest.approx(0.0)
        assert interp(0.5) == pytest.approx(0.3)
        assert interp(1.0) == pytest.approx(0.4)
        grid = np.linspace(0, 1, 801)
        assert np.all(np.diff(interp(grid)) >= -1e-12)

    def test_single_interval_is_linear(self):
        interp = fit_cumulative_barrier(Schedule.uniform(1), np.array([0.7]))
        grid = np.linspace(0, 1, 101)
        assert np.allclose(interp(grid), 0.7 * grid, atol=1e-12)

    def test_duplicate_points_merged(self):
        sched = Schedule(np.array([0.0, 0.5, 0.5, 1.0]))
        interp = fit_cumulative_barrier(sched, np.array([0.2, 0.0, 0.3]))
        assert interp.x.size == 3
        assert interp(0.5) == pytest.approx(0.2)
        assert interp(1.0) == pytest.approx(0.5)

    def test_rejects_decreasing_ordinates(self):
        with pytest.raises(ValueError):
            BarrierInterpolant([0.0, 0.5, 1.0], [0.0, 0.4, 0.2])

    def test_rejects_negative_rejections(self):
        with pytest.raises(ValueError):
            fit_cumulative_barrier(Schedule.uniform(2), np.array([0.1, -0.2]))


class TestUpdateSchedule:
    def test_linear_barrier_gives_uniform(self):
        interp = fit_cumulative_barrier(Schedule.uniform(4), np.full(4, 0.25))
        out = update_schedule(interp, 4)
        assert np.allclose(out.points, Schedule.uniform(4).points, atol=1e-9)

    def test_piecewise_example(self):
        # The exact piecewise-linear inverse puts t_1 where the cumulative
        # reaches 0.2, i.e. t_1 = 1/3; the cubic fit must land nearby.
        sched = Schedule(np.array([0.0, 0.5, 1.0]))
        interp = fit_cumulative_barrier(sched, np.array([0.3, 0.1]))
        out = update_schedule(interp, 2)
        assert abs(out.points[1] - 1.0 / 3.0) < 0.05

    def test_flat_barrier_fallback(self):
        interp = fit_cumulative_barrier(Schedule.uniform(2), np.zeros(2))
        out = update_schedule(interp, 2)
        assert np.allclose(out.points, [0.0, 0.5, 1.0])

    def test_endpoints_pinned_and_sorted(self):
        rng = stream(55)
        for _ in range(25):
            x = np.sort(rng.random(5))
            x = np.concatenate([[0.0], x, [1.0]])
            y = np.concatenate([[0.0], np.cumsum(rng.random(6))])
            interp = BarrierInterpolant(x, y)
            out = update_schedule(interp, 7)
            assert out.points[0] == 0.0 and out.points[-1] == 1.0
            assert np.all(np.diff(out.points) >= 0.0)

    def test_inverse_consistency(self):
        # barrier(t_n) must hit the equal-share targets to bisection
        # accuracy for random monotone interpolants. Knot gaps are bounded
        # below so the interpolant slope stays within what the stated
        # bisection tolerance in t can resolve in barrier values.
        rng = stream(77)
        lattice = np.arange(1, 20) * 0.05
        for _ in range(100):
            k = int(rng.integers(2, 8))
            interior = rng.choice(lattice, size=k, replace=False)
            x = np.concatenate([[0.0], np.sort(interior), [1.0]])
            increments = rng.random(x.size - 1) * 3.0
            y = np.concatenate([[0.0], np.cumsum(increments)])
            interp = BarrierInterpolant(x, y)
            n = int(rng.integers(2, 12))
            out = update_schedule(interp, n)
            total = interp.total
            for i, t in enumerate(out.points):
                assert abs(interp(t) - total * i / n) < 1e-8
