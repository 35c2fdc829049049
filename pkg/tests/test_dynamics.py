import itertools
import math

import numpy as np
import pytest
from scipy.special import expit

from tree_quench.config import MAX_SIMULATION_DEPTH
from tree_quench.dynamics import (
    CouplingDriver,
    cap_depth,
    coupled_simulate,
    estimate_rho,
    heat_bath_plus_probability,
    rows_ordered,
    sandwich_simulate,
    simulate,
    truncation_depth_for_time,
    truncation_doubling_check,
)
from tree_quench.gibbs import ModelParams
from tree_quench.spectral import build_ising_generator, transition_law
from tree_quench.tree import Fixed, Free, Minus, ObstacleEnv, Plus, SpinConfig, TreeShape, sample_bernoulli_spins


class TestCouplingDriver:
    @staticmethod
    def test_events_are_reproducible(seed):
        first = CouplingDriver(seed, 31, 5.0, replica=3)
        second = CouplingDriver(seed, 31, 5.0, replica=3)
        np.testing.assert_array_equal(first.times, second.times)
        np.testing.assert_array_equal(first.vertices, second.vertices)
        np.testing.assert_array_equal(first.marks, second.marks)

    @staticmethod
    def test_replicas_differ(seed):
        first = CouplingDriver(seed, 31, 5.0, replica=0)
        second = CouplingDriver(seed, 31, 5.0, replica=1)
        assert len(first) != len(second) or not np.array_equal(first.times, second.times)

    @staticmethod
    def test_events_are_time_ordered(seed):
        driver = CouplingDriver(seed, 63, 4.0)
        assert np.all(np.diff(driver.times) >= 0)
        assert np.all((driver.times >= 0) & (driver.times <= 4.0))
        assert np.all((driver.marks >= 0) & (driver.marks < 1))
        times, _ = driver.vertex_events(5)
        assert np.all(np.diff(times) >= 0)

    @staticmethod
    @pytest.mark.parametrize("v", [0, 5, 1030])
    def test_vertex_stream_ignores_tree_size(seed, v):
        small = CouplingDriver(seed, 1031, 5.0).vertex_events(v)
        large = CouplingDriver(seed, 4095, 5.0).vertex_events(v)
        np.testing.assert_array_equal(small[0], large[0])
        np.testing.assert_array_equal(small[1], large[1])

    @staticmethod
    def test_longer_horizon_extends_the_stream(seed):
        short_times, short_marks = CouplingDriver(seed, 31, 5.0).vertex_events(3)
        long_times, long_marks = CouplingDriver(seed, 31, 8.5).vertex_events(3)
        prefix = long_times < 5.0
        np.testing.assert_array_equal(long_times[prefix], short_times)
        np.testing.assert_array_equal(long_marks[prefix], short_marks)
        assert len(long_times) >= len(short_times)

    @staticmethod
    def test_unit_rate(seed):
        driver = CouplingDriver(seed, 2048, 3.0)
        assert abs(len(driver) - 6144) <= 5 * math.sqrt(6144)
        assert np.all(driver.vertices < 2048)
        assert len(CouplingDriver(seed, 31, 0.0)) == 0

    @staticmethod
    def test_negative_horizon(seed):
        with pytest.raises(ValueError):
            CouplingDriver(seed, 7, -1.0)


class TestHeatBath:
    @staticmethod
    def test_plus_probabilities():
        params = ModelParams(1.0, 0.0, 2)
        shape = TreeShape(2, 1)
        config = SpinConfig.constant(shape, 1, Plus())
        assert heat_bath_plus_probability(params, config, 0) == pytest.approx(expit(4.0))
        assert heat_bath_plus_probability(params, config, 1) == pytest.approx(expit(6.0))

    @staticmethod
    def test_free_boundary_ignores_missing_neighbours():
        params = ModelParams(0.5, 0.4, 2)
        config = SpinConfig.constant(TreeShape(2, 0), -1, Free())
        assert heat_bath_plus_probability(params, config, 0) == pytest.approx(expit(0.4))

    @staticmethod
    @pytest.mark.parametrize("beta, h", [(0.3, -0.8), (1.0, 0.0), (2.5, 0.6)])
    @pytest.mark.parametrize(
        "x, interior, below", [(0, [1, 2], []), (1, [0, 3, 4], []), (3, [1], [0, 1]), (6, [2], [6, 7])]
    )
    def test_mark_rule_is_monotone_on_all_neighbour_patterns(beta, h, x, interior, below):
        params = ModelParams(beta, h, 2)
        shape = TreeShape(2, 2)
        slots = [("interior", v) for v in interior] + [("below", k) for k in below]

        def plus_probability(pattern: tuple[int, ...]) -> float:
            values = np.full(shape.n_vertices, -1, dtype=np.int8)
            boundary = np.full(2 ** (shape.depth + 1), 1, dtype=np.int8)
            for (kind, index), spin in zip(slots, pattern):
                if kind == "interior":
                    values[index] = spin
                else:
                    boundary[index] = spin
            return heat_bath_plus_probability(params, SpinConfig(shape, values, Fixed(boundary)), x)

        patterns = list(itertools.product([-1, 1], repeat=len(slots)))
        probabilities = {pattern: plus_probability(pattern) for pattern in patterns}
        for pattern in patterns:
            for k, spin in enumerate(pattern):
                if spin == -1:
                    raised = (*pattern[:k], 1, *pattern[k + 1 :])
                    assert probabilities[raised] > probabilities[pattern]
            assert probabilities[pattern] == pytest.approx(expit(2 * beta * (sum(pattern) + h)))

    @staticmethod
    def test_frozen_vertex(ising_params):
        shape = TreeShape(2, 2)
        free = np.ones(shape.n_vertices, dtype=bool)
        free[1] = False
        config = SpinConfig.constant(shape, 1, Plus(), ObstacleEnv(shape, free))
        with pytest.raises(ValueError):
            heat_bath_plus_probability(ising_params, config, 1)
        with pytest.raises(ValueError):
            heat_bath_plus_probability(ising_params, config, 3)


class TestSimulate:
    @staticmethod
    def test_first_checkpoint_is_the_initial_state(ising_params, seed):
        shape = TreeShape(2, 4)
        initial = sample_bernoulli_spins(shape, 0.5, seed, Plus())
        driver = CouplingDriver(seed, shape.n_vertices, 2.0)
        trajectory = simulate(ising_params, initial, driver, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(trajectory.snapshots[0], initial.values)
        assert trajectory.snapshots.shape == (3, shape.n_vertices)

    @staticmethod
    def test_record_replays_to_final_state(ising_params, seed):
        shape = TreeShape(2, 3)
        initial = SpinConfig.constant(shape, -1, Plus())
        driver = CouplingDriver(seed, shape.n_vertices, 3.0)
        trajectory = simulate(ising_params, initial, driver, [3.0], record=True)
        assert len(trajectory) == len(driver)
        assert np.all(np.diff(trajectory.update_times) >= 0)
        replayed = initial.values.copy()
        for v, value in zip(trajectory.update_vertices, trajectory.update_values):
            replayed[v] = value
        np.testing.assert_array_equal(replayed, trajectory.final())

    @staticmethod
    def test_obstacles_never_move(ising_params, seed):
        shape = TreeShape(2, 4)
        free = np.random.default_rng(seed).random(shape.n_vertices) < 0.7
        free[0] = True
        env = ObstacleEnv(shape, free)
        initial = SpinConfig.constant(shape, 1, Plus(), env)
        driver = CouplingDriver(seed, shape.n_vertices, 3.0)
        trajectory = simulate(ising_params, initial, driver, [1.0, 3.0])
        assert np.all(trajectory.snapshots[:, ~env.free] == -1)

    @staticmethod
    def test_checkpoint_beyond_horizon(ising_params, seed):
        shape = TreeShape(2, 2)
        driver = CouplingDriver(seed, shape.n_vertices, 1.0)
        with pytest.raises(ValueError):
            simulate(ising_params, SpinConfig.constant(shape, 1), driver, [0.5, 2.0])

    @staticmethod
    def test_decreasing_checkpoints(ising_params, seed):
        shape = TreeShape(2, 2)
        driver = CouplingDriver(seed, shape.n_vertices, 1.0)
        with pytest.raises(ValueError):
            simulate(ising_params, SpinConfig.constant(shape, 1), driver, [0.5, 0.2])

    @staticmethod
    def test_law_matches_generator(seed):
        params = ModelParams(1.0, 0.2, 2)
        shape = TreeShape(2, 1)
        initial = SpinConfig.constant(shape, -1, Plus())
        generator = build_ising_generator(params, shape, boundary=Plus())
        exact = transition_law(generator, initial.values, 1.0)

        n_samples = 4000
        finals = np.array(
            [
                simulate(params, initial, CouplingDriver(seed, shape.n_vertices, 1.0, replica=i), [1.0]).final()
                for i in range(n_samples)
            ]
        )
        counts = np.bincount(generator.space.index_of(finals), minlength=len(generator))
        total_variation = 0.5 * np.abs(counts / n_samples - exact).sum()
        assert total_variation < 0.05


class TestCoupling:
    @staticmethod
    @pytest.mark.parametrize("beta, h", [(0.3, 0.0), (1.0, 0.2), (3.0, -0.5)])
    def test_monotone_triple_stays_ordered(beta, h, seed):
        params = ModelParams(beta, h, 2)
        shape = TreeShape(2, 6)
        initials = [
            SpinConfig.constant(shape, -1, Minus()),
            sample_bernoulli_spins(shape, 0.5, seed, Free()),
            SpinConfig.constant(shape, 1, Plus()),
        ]
        checkpoints = [0.0, 1.0, 2.5, 5.0]
        for replica in range(5):
            driver = CouplingDriver(seed, shape.n_vertices, 5.0, replica=replica)
            run = coupled_simulate(params, initials, driver, checkpoints)
            assert run.violations == 0
            assert run.ordered
            signs = np.ones(shape.n_vertices, dtype=np.int8)
            for k in range(len(checkpoints)):
                assert rows_ordered(np.stack([t.snapshots[k] for t in run.trajectories]), signs)

    @staticmethod
    def test_mismatched_copies(ising_params):
        with pytest.raises(ValueError):
            coupled_simulate(
                ising_params,
                [SpinConfig.constant(TreeShape(2, 2), 1), SpinConfig.constant(TreeShape(2, 3), 1)],
                CouplingDriver(0, 15, 1.0),
                [1.0],
            )

    @staticmethod
    def test_sandwich(cold_params, seed):
        shape = TreeShape(2, 6)
        outer = sample_bernoulli_spins(shape, 0.6, seed, Free())
        driver = CouplingDriver(seed, shape.n_vertices, 4.0)
        run = sandwich_simulate(cold_params, 3, outer, driver, [0.0, 2.0, 4.0])
        assert run.violations == 0
        lower, middle, upper = (t.snapshots[:, 0] for t in run.trajectories)
        assert np.all(lower <= middle)
        assert np.all(middle <= upper)

    @staticmethod
    def test_identical_copies_agree(ising_params, seed):
        shape = TreeShape(2, 4)
        start = sample_bernoulli_spins(shape, 0.3, seed, Plus())
        driver = CouplingDriver(seed, shape.n_vertices, 2.0)
        run = coupled_simulate(ising_params, [start, start], driver, [2.0], watch_limit=shape.n_vertices)
        np.testing.assert_array_equal(run.trajectories[0].final(), run.trajectories[1].final())
        assert run.watch_time is None


class TestEstimates:
    @staticmethod
    def test_rho_at_time_zero(ising_params):
        initial = SpinConfig.constant(TreeShape(2, 3), -1, Plus())
        estimate = estimate_rho(ising_params, initial, 0.0, 10, 0)
        assert estimate.value == -1.0
        assert estimate.stderr == 0.0

    @staticmethod
    def test_rho_needs_two_samples(ising_params):
        with pytest.raises(ValueError):
            estimate_rho(ising_params, SpinConfig.constant(TreeShape(2, 3), 1), 1.0, 1, 0)

    @staticmethod
    def test_infinite_temperature_relaxation(seed):
        params = ModelParams(0.0, 0.0, 2)
        initial = SpinConfig.constant(TreeShape(2, 2), 1, Plus())
        estimate = estimate_rho(params, initial, 1.0, 2000, seed, workers=1)
        assert abs(estimate.value - math.exp(-1.0)) <= 4 * estimate.stderr

    @staticmethod
    def test_truncation_depth():
        assert truncation_depth_for_time(0.5) == 4
        assert truncation_depth_for_time(10.0) == 40
        assert cap_depth(40) == MAX_SIMULATION_DEPTH
        assert cap_depth(5) == 5
        with pytest.raises(ValueError):
            truncation_depth_for_time(-1.0)

    @staticmethod
    def test_doubling_check_at_infinite_temperature(seed):
        check = truncation_doubling_check(ModelParams(0.0, 0.0, 2), 0.5, 400, seed, depth=2, workers=1)
        assert (check.depth, check.doubled_depth) == (2, 4)
        assert not check.reduced
        for estimate in (check.estimate, check.doubled_estimate):
            assert abs(estimate.value - math.exp(-0.5)) <= 5 * estimate.stderr
        assert check.combined_stderr == pytest.approx(math.hypot(check.estimate.stderr, check.doubled_estimate.stderr))

    @staticmethod
    def test_doubling_check_stays_informative_at_long_times(seed):
        check = truncation_doubling_check(ModelParams(1.0, 0.0, 2), 10.0, 2, seed, workers=1)
        assert check.requested_depth == 40
        assert (check.depth, check.doubled_depth) == (MAX_SIMULATION_DEPTH // 2, MAX_SIMULATION_DEPTH)
        assert check.reduced
        with pytest.raises(ValueError):
            truncation_doubling_check(ModelParams(1.0, 0.0, 2), 1.0, 2, seed, depth=0)
