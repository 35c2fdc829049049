import math

import numpy as np
import pytest

from tree_quench.dynamics import IsingModel
from tree_quench.gibbs import ModelParams, brute_force_gibbs
from tree_quench.spectral import (
    StateSpace,
    block_dynamics_gap,
    build_ising_generator,
    exact_variance_decay,
    lanczos_gap,
    logsob_upper_bound,
    min_block_gap,
    reversibility_residual,
    spectral_gap_exact,
    stationary_from_rates,
    transition_law,
    variance_decay_gap,
    vm_mixing_check,
)
from tree_quench.tree import Free, Plus, SpinConfig, TreeShape, ising_region


@pytest.fixture(scope="module", name="generator")
def fixture_generator():
    return build_ising_generator(ModelParams(1.0, 0.2, 2), TreeShape(2, 2), boundary=Plus())


class TestGenerator:
    @staticmethod
    def test_state_space_size(generator):
        assert len(generator) == 2**7
        states = generator.space.states
        np.testing.assert_array_equal(generator.space.index_of(states), np.arange(len(generator)))

    @staticmethod
    def test_state_space_limit():
        model = IsingModel(ModelParams(1.0))
        with pytest.raises(ValueError):
            StateSpace(model, ising_region(TreeShape(2, 4)))

    @staticmethod
    def test_reversible_and_stationary(generator):
        assert reversibility_residual(generator) < 1e-12
        np.testing.assert_allclose(stationary_from_rates(generator), generator.mu, atol=1e-10)
        np.testing.assert_allclose(np.asarray(generator.rates.sum(axis=1)).ravel(), 0.0, atol=1e-12)

    @staticmethod
    def test_gibbs_vector_matches_enumeration(generator):
        table = brute_force_gibbs(ModelParams(1.0, 0.2, 2), TreeShape(2, 2), boundary=Plus())
        order = generator.space.index_of(table.states)
        np.testing.assert_allclose(generator.mu[order], table.probabilities, atol=1e-12)

    @staticmethod
    def test_transition_law(generator):
        start = SpinConfig.constant(TreeShape(2, 2), -1, Plus()).values
        initial = transition_law(generator, start, 0.0)
        assert initial.sum() == 1.0
        assert initial[generator.space.index_of(start)[0]] == 1.0
        later = transition_law(generator, start, 50.0)
        assert later.sum() == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(later, generator.mu, atol=1e-6)


class TestGap:
    @staticmethod
    @pytest.mark.parametrize("boundary", [Plus(), Free()])
    def test_single_site_gap_is_one(boundary):
        generator = build_ising_generator(ModelParams(0.8, 0.3, 2), TreeShape(2, 0), boundary=boundary)
        assert spectral_gap_exact(generator) == pytest.approx(1.0, abs=1e-12)

    @staticmethod
    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_plus_boundary_speeds_up_mixing(depth):
        params = ModelParams(1.2, 0.0, 2)
        shape = TreeShape(2, depth)
        plus = spectral_gap_exact(build_ising_generator(params, shape, boundary=Plus()))
        free = spectral_gap_exact(build_ising_generator(params, shape, boundary=Free()))
        assert plus >= free

    @staticmethod
    def test_lanczos_on_a_diagonal_operator():
        diagonal = np.linspace(0.0, 5.0, 60)
        top = np.zeros(60)
        top[0] = 1.0
        gap = lanczos_gap(lambda x: diagonal * x, 60, top, 6.0)
        assert gap == pytest.approx(diagonal[1], abs=1e-8)


class TestLogSobolev:
    @staticmethod
    def test_asymmetric_two_point_space():
        generator = build_ising_generator(ModelParams(0.25, 0.0, 2), TreeShape(2, 0), boundary=Plus())
        bound = logsob_upper_bound(generator, n_restarts=4, seed=1)
        assert bound.best_ratio == pytest.approx(math.tanh(0.5), rel=1e-4)
        assert bound.best_ratio < bound.gap / 2
        assert bound.value == bound.best_ratio

    @staticmethod
    def test_search_respects_the_two_sided_estimate(generator):
        bound = logsob_upper_bound(generator, n_restarts=2, seed=3)
        smallest = float(generator.mu.min())
        lower = bound.gap * (1 - 2 * smallest) / math.log(1 / smallest - 1)
        assert bound.best_ratio >= lower * (1 - 1e-9)
        assert bound.value == min(bound.best_ratio, bound.gap / 2)
        assert bound.depth == 2

    @staticmethod
    def test_needs_a_restart(generator):
        with pytest.raises(ValueError):
            logsob_upper_bound(generator, n_restarts=0)


class TestBlocks:
    @staticmethod
    def test_single_vertex_blocks(generator):
        result = block_dynamics_gap(generator, 1)
        assert result.block_gap == pytest.approx(result.single_site_gap, abs=1e-10)
        assert result.min_block_gap == pytest.approx(1.0, abs=1e-10)
        assert result.holds

    @staticmethod
    def test_whole_tree_block(generator):
        result = block_dynamics_gap(generator, 3)
        assert result.block_gap == pytest.approx(1.0, abs=1e-8)
        assert result.holds

    @staticmethod
    @pytest.mark.parametrize("ell1", [1, 2, 3])
    def test_block_bound_holds(ell1, generator):
        result = block_dynamics_gap(generator, ell1)
        assert result.single_site_gap >= result.bound - 1e-9
        assert min_block_gap(generator, ell1) == pytest.approx(result.min_block_gap)

    @staticmethod
    def test_invalid_block_size(generator):
        with pytest.raises(ValueError):
            block_dynamics_gap(generator, 0)


class TestVarianceMixing:
    @staticmethod
    @pytest.mark.parametrize("ell1", [1, 2])
    @pytest.mark.parametrize("beta", [0.3, 1.0])
    def test_weight_bound(ell1, beta):
        check = vm_mixing_check(ModelParams(beta, 0.2, 2), TreeShape(2, 2), ell1, boundary=Plus())
        assert check.weight_bound_holds
        assert np.all(check.ratios <= 1 + 1e-12)
        assert check.satisfied is None

    @staticmethod
    def test_threshold(small_tree):
        check = vm_mixing_check(ModelParams(0.3, 0.0, 2), small_tree, 1, boundary=Plus(), r=1.0)
        assert check.satisfied


class TestVarianceDecay:
    @staticmethod
    def test_exact_decay_is_bounded_by_the_gap(generator):
        spins = generator.observable(0)
        t_grid = np.linspace(0.0, 3.0, 7)
        variances = exact_variance_decay(generator, spins, t_grid)
        gap = spectral_gap_exact(generator)
        assert variances[0] == pytest.approx(generator.expectation(spins**2) - generator.expectation(spins) ** 2)
        assert np.all(np.diff(variances) <= 1e-12)
        assert np.all(variances <= np.exp(-2 * gap * t_grid) * variances[0] + 1e-12)

    @staticmethod
    def test_monte_carlo_starts_at_the_variance(seed):
        params = ModelParams(0.3, 0.0, 2)
        shape = TreeShape(2, 1)
        result = variance_decay_gap(params, shape, [0.0, 0.25, 0.5], 200, seed, boundary=Free(), workers=1)
        assert result.variances[0] == pytest.approx(1.0, abs=1e-12)
        assert result.errors[0] == 0.0

    @staticmethod
    @pytest.mark.parametrize("t_grid, n", [([0.0, 0.5], 1), ([0.5, 0.5], 10), ([-1.0, 0.5], 10)])
    def test_invalid_arguments(t_grid, n, seed):
        with pytest.raises(ValueError):
            variance_decay_gap(ModelParams(0.3), TreeShape(2, 1), t_grid, n, seed)
