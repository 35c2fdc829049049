import math

import numpy as np
import pytest

from tree_quench.config import WORKERS_ENV_VAR
from tree_quench.fitting import fit_log_linear, fit_replica_decay, fit_stretched_exponential
from tree_quench.utils import (
    column_mean_and_stderr,
    estimate_mean,
    mean_and_stderr,
    parse_float_list,
    replica_generator,
    resolve_workers,
    run_replicas,
    write_csv,
)


class TestStatistics:
    @staticmethod
    def test_mean_and_stderr():
        mean, stderr = mean_and_stderr([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert stderr == pytest.approx(math.sqrt(1 / 3))

    @staticmethod
    def test_single_value_has_no_error_bar():
        assert mean_and_stderr([4.0]) == (4.0, math.inf)

    @staticmethod
    def test_empty_sample():
        with pytest.raises(ValueError):
            mean_and_stderr([])

    @staticmethod
    def test_columns():
        means, errors = column_mean_and_stderr(np.array([[1.0, 5.0], [3.0, 5.0]]))
        np.testing.assert_allclose(means, [2.0, 5.0])
        np.testing.assert_allclose(errors, [1.0, 0.0])

    @staticmethod
    def test_estimate_bounds():
        estimate = estimate_mean([0.0, 2.0])
        assert estimate.n_samples == 2
        assert estimate.upper(2.0) == pytest.approx(3.0)
        assert estimate.lower(2.0) == pytest.approx(-1.0)


class TestReplicas:
    @staticmethod
    def test_results_do_not_depend_on_workers():
        draw = lambda i: float(replica_generator(11, i, 0).random())  # noqa: E731
        serial = run_replicas(draw, 8, workers=1)
        parallel = run_replicas(draw, 8, workers=2)
        assert serial == parallel
        assert len(set(serial)) == 8

    @staticmethod
    def test_streams_are_independent():
        first = replica_generator(11, 0, 0).random(4)
        second = replica_generator(11, 0, 1).random(4)
        assert not np.array_equal(first, second)

    @staticmethod
    def test_workers_from_environment(monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "3")
        assert resolve_workers() == 3
        assert resolve_workers(2) == 2
        with pytest.raises(ValueError):
            resolve_workers(0)


class TestParsing:
    @staticmethod
    @pytest.mark.parametrize(
        "text, expected",
        [("0:1:3", [0.0, 0.5, 1.0]), ("1, 2.5", [1.0, 2.5]), ("3", [3.0]), ("0,1,", [0.0, 1.0])],
    )
    def test_float_lists(text, expected):
        assert parse_float_list(text) == expected

    @staticmethod
    def test_csv_cells(tmp_path):
        path = write_csv(tmp_path / "cells.csv", ["a", "b", "c"], [(np.float64(0.1), np.int64(3), np.bool_(True))])
        assert path.read_text() == "a,b,c\n0.1,3,True\n"


class TestFitting:
    @staticmethod
    def test_log_linear_on_exact_data():
        x = np.arange(5.0)
        values = 2.0 * np.exp(-0.5 * x)
        fit = fit_log_linear(x, values, 0.01 * values)
        assert fit.rate == pytest.approx(-0.5, abs=1e-10)
        assert fit.intercept == pytest.approx(math.log(2.0), abs=1e-10)
        assert fit.r2 == pytest.approx(1.0)
        assert not fit.flagged
        low, high = fit.confidence_interval
        assert low < fit.rate < high

    @staticmethod
    def test_noisy_points_are_skipped():
        x = np.arange(4.0)
        values = np.array([1.0, 0.5, -0.1, 0.2])
        errors = np.array([0.01, 0.01, 0.01, 0.5])
        fit = fit_log_linear(x, values, errors)
        assert fit.n_points == 2
        assert fit.used.tolist() == [True, True, False, False]
        assert fit.rate == pytest.approx(math.log(0.5))

    @staticmethod
    def test_too_few_points():
        fit = fit_log_linear([0.0, 1.0], [1.0, -1.0], [0.1, 0.1])
        assert fit.flagged
        assert math.isnan(fit.rate)

    @staticmethod
    def test_replica_decay_uses_jackknife_errors():
        x = np.linspace(0.0, 2.0, 5)
        rng = np.random.default_rng(3)
        samples = np.exp(-x)[None, :] * (1 + 0.05 * rng.standard_normal((40, 1)))
        fit = fit_replica_decay(x, samples)
        assert fit.rate == pytest.approx(-1.0, abs=1e-8)
        assert fit.rate_stderr == pytest.approx(0.0, abs=1e-8)

    @staticmethod
    def test_stretched_exponential():
        t = np.linspace(0.5, 10.0, 30)
        values = 0.8 * np.exp(-((t / 2.0) ** 0.7))
        fit = fit_stretched_exponential(t, values, np.full_like(t, 1e-3))
        assert fit.converged
        assert fit.alpha == pytest.approx(0.7, abs=1e-3)
        assert fit.tau == pytest.approx(2.0, rel=1e-2)
        low, high = fit.alpha_interval
        assert low <= fit.alpha <= high

    @staticmethod
    def test_stretched_exponential_needs_four_points():
        assert not fit_stretched_exponential([0.0, 1.0, 2.0], [1.0, 0.5, 0.25], [0.01] * 3).converged
