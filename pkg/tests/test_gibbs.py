import itertools
import math

import numpy as np
import pytest

from tree_quench.gibbs import (
    ModelParams,
    bound_stays_below_fixed_point,
    brute_force_gibbs,
    coexistence,
    critical_beta0,
    critical_beta1,
    critical_field,
    exact_level_one_weight_moment,
    f_beta,
    get_classifier_by_name,
    homogeneous_fixed_point,
    k_beta,
    k_from_log,
    modified_weight_moment,
    mu_minus_root,
    mu_plus_root,
    path_weight,
    r_recursion,
    r_tail_bound_recursion,
    r_tail_monte_carlo,
    root_path_weight,
    sample_gibbs,
    single_site_marginals,
)
from tree_quench.tree import Fixed, Free, Minus, ObstacleEnv, Plus, SpinConfig, TreeShape, obstacles_from_quench, sample_obstacles_iid


class TestModelParams:
    @staticmethod
    def test_derived_quantities():
        params = ModelParams(0.5, 0.25, 2)
        assert params.eps == pytest.approx(math.exp(-1.0))
        assert params.log_field == pytest.approx(-0.25)

    @staticmethod
    @pytest.mark.parametrize("beta", [-0.1, math.inf, math.nan])
    def test_invalid_beta(beta):
        with pytest.raises(ValueError):
            ModelParams(beta)

    @staticmethod
    def test_infinite_temperature_is_allowed():
        assert ModelParams(0.0).eps == 1.0


class TestCoupling:
    @staticmethod
    @pytest.mark.parametrize("beta", [0.1, 1.0, 3.0])
    def test_limits_of_f(beta):
        params = ModelParams(beta)
        assert f_beta(params, 0.0) == pytest.approx(params.eps)
        assert f_beta(params, math.inf) == pytest.approx(1 / params.eps)
        assert f_beta(params, 1.0) == pytest.approx(1.0)

    @staticmethod
    @pytest.mark.parametrize("beta", [0.2, 0.8, 2.5])
    def test_k_peaks_at_tanh(beta):
        params = ModelParams(beta)
        assert k_from_log(params, 0.0) == pytest.approx(math.tanh(beta), abs=1e-12)
        grid = np.linspace(-20, 20, 4001)
        assert np.max(k_from_log(params, grid)) <= math.tanh(beta) + 1e-12
        assert k_beta(params, math.inf) == pytest.approx(0.0, abs=1e-300)

    @staticmethod
    def test_negative_ratio():
        with pytest.raises(ValueError):
            f_beta(ModelParams(1.0), -1.0)


class TestRecursion:
    @staticmethod
    @pytest.mark.parametrize("boundary", [Plus(), Minus(), Free()])
    @pytest.mark.parametrize("beta, h", [(0.4, 0.0), (1.0, 0.2), (2.0, -0.5)])
    def test_marginals_match_enumeration(boundary, beta, h, small_tree):
        params = ModelParams(beta, h, 2)
        exact = brute_force_gibbs(params, small_tree, boundary=boundary).marginals()
        np.testing.assert_allclose(single_site_marginals(params, small_tree, boundary=boundary), exact, atol=1e-10)

    @staticmethod
    def test_marginals_match_enumeration_with_obstacles(ising_params):
        shape = TreeShape(2, 3)
        eta = np.ones(shape.n_vertices, dtype=np.int8)
        eta[[2, 7, 10]] = -1
        env = obstacles_from_quench(SpinConfig(shape, eta), 0)
        exact = brute_force_gibbs(ising_params, shape, env, Plus()).marginals()
        recursion = single_site_marginals(ising_params, shape, env, Plus())
        np.testing.assert_allclose(recursion, exact, atol=1e-10)
        assert np.all(recursion[~env.component] == 0.0)

    @staticmethod
    @pytest.mark.parametrize("depth", range(7))
    def test_plus_root_matches_recursion(depth, ising_params):
        field = r_recursion(ising_params, TreeShape(2, depth), boundary=Plus())
        assert field.root_magnetization() == pytest.approx(mu_plus_root(ising_params, depth), abs=1e-12)

    @staticmethod
    def test_branching_mismatch():
        with pytest.raises(ValueError):
            r_recursion(ModelParams(1.0, 0.0, 3), TreeShape(2, 2))

    @staticmethod
    def test_path_weights_measure_conditional_disagreement(small_tree):
        params = ModelParams(0.7, 0.3, 2)
        field = r_recursion(params, small_tree, boundary=Plus())
        table = brute_force_gibbs(params, small_tree, boundary=Plus())
        for x in (1, 3, 6):
            disagreement = table.clamp(0, 1).plus_probability(x) - table.clamp(0, -1).plus_probability(x)
            assert root_path_weight(field, 0, x) == pytest.approx(disagreement, abs=1e-10)
        assert path_weight(field, []) == 1.0


class TestFixedPoints:
    @staticmethod
    def test_critical_temperatures():
        assert critical_beta0(2) == pytest.approx(0.5 * math.log(3.0), abs=1e-12)
        assert critical_beta1(2) == pytest.approx(0.8813736, abs=1e-6)

    @staticmethod
    def test_plus_and_minus_phases_are_symmetric_at_zero_field():
        params = ModelParams(1.0, 0.0, 2)
        plus = mu_plus_root(params)
        assert plus > 0.1
        assert mu_minus_root(params) == pytest.approx(-plus, abs=1e-10)

    @staticmethod
    @pytest.mark.parametrize("beta, expected", [(0.3, False), (0.5, False), (1.0, True), (3.0, True)])
    def test_coexistence(beta, expected):
        assert coexistence(ModelParams(beta, 0.0, 2)) == expected

    @staticmethod
    def test_fixed_point_is_stationary(cold_params):
        point = homogeneous_fixed_point(cold_params, -math.inf)
        assert point.converged
        updated = cold_params.log_field + 2 * math.log(f_beta(cold_params, math.exp(point.log_ratio)))
        assert updated == pytest.approx(point.log_ratio, abs=1e-9)

    @staticmethod
    def test_critical_field_vanishes_in_uniqueness():
        critical = critical_field(ModelParams(0.3, 0.0, 2))
        assert critical.value == 0.0
        assert critical.uniqueness

    @staticmethod
    def test_critical_field_at_low_temperature():
        critical = critical_field(ModelParams(5.0, 0.0, 2))
        assert not critical.uniqueness
        assert critical.value == pytest.approx(1.0 - math.log(2.0) / 5.0, abs=1e-3)


class TestSampling:
    @staticmethod
    def test_root_frequency_matches_marginal(ising_params, small_tree, seed):
        states = sample_gibbs(ising_params, small_tree, seed, boundary=Plus(), size=20_000)
        expected = single_site_marginals(ising_params, small_tree, boundary=Plus())
        observed = np.mean(states == 1, axis=0)
        tolerance = 4 * np.sqrt(expected * (1 - expected) / len(states)) + 1e-3
        assert np.all(np.abs(observed - expected) <= tolerance)

    @staticmethod
    def test_obstacles_are_minus(ising_params, seed):
        shape = TreeShape(2, 3)
        eta = np.ones(shape.n_vertices, dtype=np.int8)
        eta[1] = -1
        env = obstacles_from_quench(SpinConfig(shape, eta), 0)
        states = sample_gibbs(ising_params, shape, seed, env, Plus(), size=50)
        assert np.all(states[:, ~env.component] == -1)


class TestTails:
    @staticmethod
    def test_contracting_tail_bound():
        p = 1 - 2.0**-11
        bound = r_tail_bound_recursion(1.0, p)
        assert bound.k0 == 3
        assert not bound.diverged
        assert bound.fixed_point == pytest.approx(1 / 32)
        assert np.all(bound.values <= bound.fixed_point + 1e-15)
        assert bound_stays_below_fixed_point(1.0, p)

    @staticmethod
    def test_vacuous_tail_bound():
        bound = r_tail_bound_recursion(1.0, 0.99)
        assert bound.diverged
        assert bound.fixed_point is None
        assert not bound_stays_below_fixed_point(1.0, 0.99)

    @staticmethod
    @pytest.mark.parametrize("a, p, b", [(1.0, 0.9, 3), (0.0, 0.9, 2), (1.0, 1.0, 2)])
    def test_invalid_tail_arguments(a, p, b):
        with pytest.raises(ValueError):
            r_tail_bound_recursion(a, p, b)

    @staticmethod
    def test_no_obstacles_no_tail(cold_params, seed):
        estimate = r_tail_monte_carlo(cold_params, 1.0, 6, 10, seed, workers=1)
        assert estimate.value == 0.0

    @staticmethod
    def test_empty_tail_sample(cold_params, seed):
        with pytest.raises(ValueError):
            r_tail_monte_carlo(cold_params, 0.9, 4, 0, seed)


class TestWeights:
    @staticmethod
    def test_zero_moment_parameter(ising_params, seed):
        moment = modified_weight_moment(ising_params, 0.8, 3, 0.0, 0.25, 20, seed, workers=1)
        assert moment.moment.value == 1.0
        assert moment.modified_moment.value == 1.0

    @staticmethod
    def test_level_one_moment_matches_closed_form(seed):
        params = ModelParams(1.0, 0.0, 2)
        moment = modified_weight_moment(params, 0.7, 1, 2.0, 0.25, 2000, seed, ratio_depth=0, workers=1)
        exact = exact_level_one_weight_moment(params, 0.7, 2.0)
        assert abs(moment.moment.value - exact) <= 4 * moment.moment.stderr + 1e-12

    @staticmethod
    @pytest.mark.parametrize("t, level, n", [(-1.0, 2, 10), (1.0, 0, 10), (1.0, 2, 0)])
    def test_invalid_moment_arguments(t, level, n, ising_params, seed):
        with pytest.raises(ValueError):
            modified_weight_moment(ising_params, 0.8, level, t, 0.25, n, seed)

    @staticmethod
    def test_classifier_by_name():
        assert get_classifier_by_name("a", 1.0).k0 == 4
        with pytest.raises(ValueError):
            get_classifier_by_name("z", 1.0)
        with pytest.raises(ValueError):
            get_classifier_by_name("a", 0.0)

    @staticmethod
    @pytest.mark.parametrize("name, bad_margin", [("b", 0.5), ("b", 1.0), ("c", 1.0), ("c", -0.1)])
    def test_margin_ranges(name, bad_margin):
        with pytest.raises(ValueError):
            get_classifier_by_name(name, bad_margin)

    @staticmethod
    def test_default_margins_admit_obstacles():
        assert get_classifier_by_name("b").max_obstacles(4) == pytest.approx(1.0)
        assert get_classifier_by_name("c").max_obstacles(2) == pytest.approx(1.0)
        assert get_classifier_by_name("c", 0.9).max_obstacles(2) == pytest.approx(0.2)

    @staticmethod
    @pytest.mark.parametrize("name", ["b", "c"])
    def test_clean_tree_is_all_good(name, cold_params):
        field = r_recursion(cold_params, TreeShape(2, 8), boundary=Plus())
        table, good = get_classifier_by_name(name).classify(field, 5)
        assert good.shape == table.shape
        assert good.all()

    @staticmethod
    def test_consecutive_rule_needs_a_regular_run_below(cold_params):
        field = r_recursion(cold_params, TreeShape(2, 8), boundary=Plus())
        classifier = get_classifier_by_name("a", 1.0)
        _, good = classifier.classify(field, 6)
        # every vertex is regular; only the top positions have k0 - 1 = 3 regular vertices below
        assert good[:, :3].all()
        assert not good[:, 3:].any()


def _increasing_observables(table) -> np.ndarray:
    """Plus indicators of every site and pair, and of the all-plus event."""
    plus = (table.states[:, table.region.active] == 1).astype(np.float64)
    pairs = [plus[:, i] * plus[:, j] for i, j in itertools.combinations(range(plus.shape[1]), 2)]
    columns = [*plus.T, *pairs, plus.all(axis=1)]
    return table.probabilities @ np.stack(columns, axis=1)


class TestMonotonicity:
    @staticmethod
    @pytest.mark.parametrize("beta, h", [(0.4, 0.0), (1.0, 0.2), (2.0, -0.7)])
    def test_raising_one_boundary_spin_raises_increasing_functions(beta, h, small_tree):
        params = ModelParams(beta, h, 2)
        n_boundary = 2 ** (small_tree.depth + 1)
        boundaries = [np.array(signs, dtype=np.int8) for signs in itertools.product([-1, 1], repeat=n_boundary)]
        expectations = {
            tuple(eta): _increasing_observables(brute_force_gibbs(params, small_tree, boundary=Fixed(eta)))
            for eta in boundaries
        }
        for eta in boundaries:
            for k in np.flatnonzero(eta == -1):
                raised = eta.copy()
                raised[k] = 1
                assert np.all(expectations[tuple(raised)] >= expectations[tuple(eta)] - 1e-12)

    @staticmethod
    @pytest.mark.parametrize("beta, h", [(0.5, 0.0), (1.0, 0.2), (3.0, -0.4)])
    @pytest.mark.parametrize("b, max_depth", [(2, 2), (3, 2)])
    def test_plus_root_decreases_with_volume(beta, h, b, max_depth):
        params = ModelParams(beta, h, b)
        exact = [brute_force_gibbs(params, TreeShape(b, d), boundary=Plus()).magnetization(0) for d in range(max_depth + 1)]
        assert np.all(np.diff(exact) <= 1e-12)
        recursive = [r_recursion(params, TreeShape(b, d), boundary=Plus()).root_magnetization() for d in range(12)]
        assert np.all(np.diff(recursive) <= 1e-12)
        assert recursive[max_depth] == pytest.approx(exact[-1], abs=1e-10)

    @staticmethod
    @pytest.mark.parametrize("p", [1.0, 0.8, 0.6])
    def test_root_ratio_grows_with_depth_in_an_environment(p, seed):
        params = ModelParams(1.5, 0.1, 2)
        deepest = TreeShape(2, 10)
        free = sample_obstacles_iid(deepest, p, seed, free_root=True).free
        log_ratios = []
        for depth in range(11):
            shape = TreeShape(2, depth)
            env = ObstacleEnv(shape, free[: shape.n_vertices])
            log_ratios.append(r_recursion(params, shape, env, Plus()).log_ratios[0])
        assert np.all(np.isfinite(log_ratios))
        assert np.all(np.diff(log_ratios) >= -1e-12)
