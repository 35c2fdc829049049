from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import CONFIDENCE_Z, ENVIRONMENT_STREAM, EQUILIBRIUM_STREAM
from ..dynamics import CouplingDriver, IsingModel, Instance, run_coupled
from ..fitting import DecayFit, fit_log_linear
from ..gibbs import ModelParams, homogeneous_fixed_point, r_recursion, sample_gibbs
from ..tree import ObstacleEnv, Plus, TreeShape, ancestor_table, level_start, sample_obstacles_iid
from ..utils import Estimate, estimate_mean, replica_generator, run_replicas
from .experiment_spec import Table

logger = lg.getLogger(__name__)


@dataclass
class MinusPathResult:
    """Union bound and Monte Carlo estimate of an all-minus free path from the root to level ``ell``."""

    ell: int
    bounds: NDArray[np.float64]
    estimate: Estimate | None
    homogeneous_bound: float

    @property
    def median_bound(self) -> float:
        return float(np.median(self.bounds))


def minus_path_bound(params: ModelParams, env: ObstacleEnv, ell: int) -> float:
    """``sum_x prod_z R_z / eps`` over the level-``ell`` vertices whose root path stays in the free component.

    Ratios come from the plus-boundary recursion on the whole tree of ``env``. The root
    factor is left out of each product.
    """
    shape = env.shape
    if not 1 <= ell <= shape.depth:
        msg = f"Path length must lie in [1, {shape.depth}], got: {ell}"
        raise ValueError(msg)
    if not env.component[0]:
        return 0.0
    log_ratios = r_recursion(params, shape, env, Plus()).log_ratios
    paths = ancestor_table(shape, ell)
    inside = env.component[paths].all(axis=1)
    if not inside.any():
        return 0.0
    exponents = (log_ratios[paths[inside]] - params.log_eps).sum(axis=1)
    return float(np.exp(exponents).sum())


def minus_path_events(states: NDArray[np.int8], env: ObstacleEnv, ell: int) -> NDArray[np.bool_]:
    """Whether each sampled configuration has a path of free minus spins from the root down to ``ell``."""
    shape = env.shape
    reach = (states[:, 0] == -1) & env.component[0]
    reach = reach[:, None]
    for k in range(1, ell + 1):
        vertices = shape.level_vertices(k)
        parents = np.repeat(reach, shape.b, axis=1)
        reach = parents & (states[:, vertices] == -1) & env.component[vertices]
    return reach.any(axis=1)


def minus_path_probability(
    params: ModelParams,
    p: float,
    ell: int,
    n_environments: int,
    seed: int,
    extra_levels: int = 4,
    n_gibbs_samples: int = 0,
    workers: int | None = None,
    verbose: bool = False,
) -> MinusPathResult:
    """Product bound per sampled environment and, optionally, the event frequency under exact sampling.

    Environments are i.i.d. with free probability ``p`` and a free root, on a tree ``extra_levels``
    deeper than ``ell`` with plus boundary.
    """
    if n_environments < 1:
        msg = f"Need at least one environment, got: {n_environments}"
        raise ValueError(msg)
    shape = TreeShape(params.b, ell + extra_levels)

    def one_environment(i: int) -> tuple[float, float | None]:
        env = sample_obstacles_iid(shape, p, replica_generator(seed, i, ENVIRONMENT_STREAM), free_root=True)
        bound = minus_path_bound(params, env, ell)
        if n_gibbs_samples <= 0:
            return bound, None
        states = sample_gibbs(params, shape, replica_generator(seed, i, EQUILIBRIUM_STREAM), env, Plus(), n_gibbs_samples)
        return bound, float(minus_path_events(states, env, ell).mean())

    runs = run_replicas(one_environment, n_environments, workers, verbose, desc="Minus paths")
    estimate = None
    if n_gibbs_samples > 0:
        estimate = estimate_mean(r[1] for r in runs)
    fixed_point = homogeneous_fixed_point(params, -math.inf)
    homogeneous = params.b**ell * math.exp(ell * (fixed_point.log_ratio - params.log_eps))
    result = MinusPathResult(ell, np.array([r[0] for r in runs]), estimate, homogeneous)
    logger.info(f"Minus-path bound at ell={ell}: median {result.median_bound:.3e}, homogeneous {homogeneous:.3e}")
    return result


@dataclass
class MinusPathScan:
    levels: NDArray[np.int64]
    medians: NDArray[np.float64]
    median_errors: NDArray[np.float64]
    fit: DecayFit

    def table(self, name: str) -> Table:
        return Table(name, ["ell", "median_bound", "median_se"], zip(self.levels, self.medians, self.median_errors))


def _median_stderr(values: NDArray[np.float64]) -> float:
    """Half-width of the order-statistic confidence interval of the median, in standard errors."""
    ordered = np.sort(values)
    n = len(ordered)
    spread = CONFIDENCE_Z * math.sqrt(n) / 2
    low = max(int(math.floor(n / 2 - spread)), 0)
    high = min(int(math.ceil(n / 2 + spread)), n - 1)
    return float(ordered[high] - ordered[low]) / (2 * CONFIDENCE_Z)


def minus_path_scan(
    params: ModelParams,
    p: float,
    levels: list[int],
    n_environments: int,
    seed: int,
    workers: int | None = None,
    verbose: bool = False,
) -> MinusPathScan:
    """Median product bound over several path lengths with a log-linear fit of its decay."""
    medians, errors = [], []
    for ell in levels:
        result = minus_path_probability(params, p, ell, n_environments, seed, workers=workers, verbose=verbose)
        medians.append(result.median_bound)
        errors.append(_median_stderr(result.bounds))
    medians, errors = np.array(medians), np.array(errors)
    fit = fit_log_linear(np.asarray(levels, dtype=np.float64), medians, errors)
    logger.info(f"Minus-path bound log-slope {fit.rate:.3f} +/- {fit.rate_stderr:.3f}")
    return MinusPathScan(np.asarray(levels, dtype=np.int64), medians, errors, fit)


@dataclass
class DiscrepancyTravel:
    """Fraction of replicas in which a planted disagreement has reached ``target_level`` by each checkpoint time."""

    source_level: int
    target_level: int
    checkpoint_times: NDArray[np.float64]
    reached: NDArray[np.float64]
    reached_se: NDArray[np.float64]
    arrival_times: NDArray[np.float64]

    def table(self, name: str) -> Table:
        return Table(name, ["t", "reached", "se"], zip(self.checkpoint_times, self.reached, self.reached_se))


def discrepancy_travel(
    params: ModelParams,
    shape: TreeShape,
    source_level: int,
    target_level: int,
    checkpoint_times: NDArray,
    n_samples: int,
    seed: int,
    workers: int | None = None,
    verbose: bool = False,
) -> DiscrepancyTravel:
    """Couple two copies that differ on every level from ``source_level`` down and time the first disagreement at or above ``target_level``.

    Both copies start from one exact plus-boundary Gibbs sample, with the deep levels set to
    -1 in one copy and +1 in the other.
    """
    if not 0 <= target_level < source_level <= shape.depth:
        msg = f"Need 0 <= target < source <= {shape.depth}, got target={target_level}, source={source_level}"
        raise ValueError(msg)
    if n_samples < 2:
        msg = f"Need at least two samples for a standard error, got: {n_samples}"
        raise ValueError(msg)
    checkpoint_times = np.asarray(checkpoint_times, dtype=np.float64)
    t_max = float(checkpoint_times[-1]) if len(checkpoint_times) else 0.0
    model = IsingModel(params)
    region = model.region(shape, Plus())
    deep = shape.levels >= source_level
    watch_limit = level_start(shape.b, target_level + 1)

    def arrival(i: int) -> float:
        start = sample_gibbs(params, shape, replica_generator(seed, i, EQUILIBRIUM_STREAM), boundary=Plus())[0]
        lower, upper = start.copy(), start.copy()
        lower[deep], upper[deep] = -1, 1
        driver = CouplingDriver(seed, shape.n_vertices, t_max, replica=i)
        run = run_coupled(model, [Instance(region, lower), Instance(region, upper)], driver, checkpoint_times, watch_limit=watch_limit)
        return math.inf if run.watch_time is None else run.watch_time

    arrivals = np.array(run_replicas(arrival, n_samples, workers, verbose, desc="Discrepancy travel"))
    hits = (arrivals[:, None] <= checkpoint_times[None, :]).astype(np.float64)
    reached = hits.mean(axis=0)
    reached_se = np.sqrt(reached * (1 - reached) / (n_samples - 1))
    logger.info(f"Disagreement from level {source_level} reached level {target_level} in {reached[-1]:.3f} of replicas by t={t_max}")
    return DiscrepancyTravel(source_level, target_level, checkpoint_times, reached, reached_se, arrivals)
