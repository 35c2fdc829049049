from __future__ import annotations

import logging as lg
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import EQUILIBRIUM_STREAM
from ..dynamics import CouplingDriver, simulate
from ..fitting import DecayFit, fit_replica_decay
from ..gibbs import ModelParams, sample_gibbs, single_site_marginals
from ..tree import Boundary, Free, ObstacleEnv, SpinConfig, TreeShape
from ..utils import column_mean_and_stderr, replica_generator, run_replicas
from .generator import GeneratorMatrix, evolve

logger = lg.getLogger(__name__)


@dataclass
class VarianceDecay:
    """``Var(P_t f)`` for ``f = sigma_root`` on a time grid, and the gap read off its slope."""

    t_grid: NDArray[np.float64]
    variances: NDArray[np.float64]
    errors: NDArray[np.float64]
    fit: DecayFit

    @property
    def gap(self) -> float:
        return -self.fit.rate / 2

    @property
    def gap_stderr(self) -> float:
        return self.fit.rate_stderr / 2

    @property
    def flagged(self) -> bool:
        return self.fit.flagged


def exact_variance_decay(generator: GeneratorMatrix, values: NDArray, t_grid: NDArray) -> NDArray[np.float64]:
    """Exact ``Var_mu(P_t f)`` at every time of ``t_grid``."""
    values = np.asarray(values, dtype=np.float64)
    mean = generator.expectation(values)
    variances = []
    for t in np.asarray(t_grid, dtype=np.float64):
        evolved = values if t == 0 else evolve(generator, values, float(t))
        variances.append(generator.expectation(evolved**2) - mean**2)
    return np.array(variances)


def variance_decay_gap(
    params: ModelParams,
    shape: TreeShape,
    t_grid: NDArray,
    n_samples: int,
    seed: int,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> VarianceDecay:
    """Monte Carlo estimate of the spectral gap from the decay of ``Var(P_t sigma_root)``.

    By reversibility ``Var(P_t f) = E[f(sigma_0) f(sigma_2t)] - mu(f)^2`` in equilibrium, so
    one trajectory per replica, started from an exact Gibbs sample and observed at ``2t``,
    covers the whole grid. The log-variance is fitted against ``t`` and the gap is minus
    half the slope.
    """
    if n_samples < 2:
        msg = f"Need at least two replicas for a variance estimate, got: {n_samples}"
        raise ValueError(msg)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        msg = "The time grid must be non-negative and strictly increasing"
        raise ValueError(msg)
    marginal = 2.0 * float(single_site_marginals(params, shape, env, boundary)[0]) - 1.0
    checkpoints = 2.0 * t_grid

    def correlations(i: int) -> NDArray[np.float64]:
        start = sample_gibbs(params, shape, replica_generator(seed, i, EQUILIBRIUM_STREAM), env, boundary)[0]
        initial = SpinConfig(shape, start, boundary or Free(), env)
        driver = CouplingDriver(seed, shape.n_vertices, float(checkpoints[-1]), replica=i)
        trajectory = simulate(params, initial, driver, checkpoints)
        return float(start[0]) * trajectory.snapshots[:, 0].astype(np.float64)

    samples = np.array(run_replicas(correlations, n_samples, workers, verbose, desc="Variance decay"))
    means, errors = column_mean_and_stderr(samples)
    fit = fit_replica_decay(t_grid, samples, offset=marginal**2)
    result = VarianceDecay(t_grid, means - marginal**2, errors, fit)
    logger.info(f"Variance-decay gap {result.gap:.4g} +/- {result.gap_stderr:.2g} from {fit.n_points} points")
    if fit.flagged:
        logger.warning(f"Variance decay is not clearly exponential (R^2 = {fit.r2:.3f})")
    return result
