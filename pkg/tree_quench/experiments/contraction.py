from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import INITIAL_STREAM
from ..dynamics import CouplingDriver, IsingModel, Instance, run_coupled
from ..fitting import DecayFit, fit_replica_decay
from ..gibbs import ModelParams, critical_beta1
from ..tree import Boundary, Free, TreeShape
from ..utils import column_mean_and_stderr, replica_generator, run_replicas
from .experiment_spec import Table

logger = lg.getLogger(__name__)


def weight_window(params: ModelParams) -> tuple[float, float]:
    """Open interval of admissible distance weights, ``(tanh(beta), 1 / (b tanh(beta)))``."""
    if params.beta >= critical_beta1(params.b):
        msg = f"No contracting distance weight exists for beta={params.beta} >= beta_1={critical_beta1(params.b):.6f}"
        raise ValueError(msg)
    slope = math.tanh(params.beta)
    upper = math.inf if slope == 0 else 1.0 / (params.b * slope)
    return slope, upper


def weighted_distance(shape: TreeShape, a: NDArray, b: NDArray, weight: float) -> NDArray[np.float64]:
    """``sum_x weight^level(x) [a_x != b_x]`` for every row pair of ``a`` and ``b``."""
    factors = float(weight) ** shape.levels.astype(np.float64)
    return ((np.asarray(a) != np.asarray(b)) * factors).sum(axis=-1)


@dataclass
class ContractionResult:
    weight: float
    checkpoint_times: NDArray[np.float64]
    distances: NDArray[np.float64]
    errors: NDArray[np.float64]
    fit: DecayFit

    @property
    def decaying(self) -> bool:
        """Whether the fitted rate is negative at 95% confidence."""
        return math.isfinite(self.fit.rate) and self.fit.confidence_interval[1] < 0

    def table(self, name: str) -> Table:
        return Table(name, ["t", "distance", "se"], zip(self.checkpoint_times, self.distances, self.errors))


def contraction_experiment(
    params: ModelParams,
    weight: float,
    depth: int,
    checkpoint_times: NDArray,
    n_samples: int,
    seed: int,
    discrepancies: tuple[int, ...] = (0,),
    boundary: Boundary | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> ContractionResult:
    """Track the weighted Hamming distance between two coupled copies that start apart on ``discrepancies``.

    The common part of the start is i.i.d. fair spins; the two copies hold -1 and +1 on the
    discrepancy set. The mean distance is fitted log-linearly against time.
    """
    low, high = weight_window(params)
    if not low < weight < high:
        msg = f"Distance weight {weight} is outside the contracting window ({low:.6g}, {high:.6g})"
        raise ValueError(msg)
    if n_samples < 2:
        msg = f"Need at least two samples for a standard error, got: {n_samples}"
        raise ValueError(msg)
    shape = TreeShape(params.b, depth)
    checkpoint_times = np.asarray(checkpoint_times, dtype=np.float64)
    t_max = float(checkpoint_times[-1]) if len(checkpoint_times) else 0.0
    model = IsingModel(params)
    region = model.region(shape, boundary or Free())
    planted = np.asarray(discrepancies, dtype=np.int64)

    def distances(i: int) -> NDArray[np.float64]:
        rng = replica_generator(seed, i, INITIAL_STREAM)
        common = np.where(rng.random(shape.n_vertices) < 0.5, 1, -1).astype(np.int8)
        lower, upper = common.copy(), common.copy()
        lower[planted], upper[planted] = -1, 1
        driver = CouplingDriver(seed, shape.n_vertices, t_max, replica=i)
        run = run_coupled(model, [Instance(region, lower), Instance(region, upper)], driver, checkpoint_times)
        first, second = run.trajectories
        return weighted_distance(shape, first.snapshots, second.snapshots, weight)

    samples = np.array(run_replicas(distances, n_samples, workers, verbose, desc="Contraction"))
    means, errors = column_mean_and_stderr(samples)
    fit = fit_replica_decay(checkpoint_times, samples)
    result = ContractionResult(weight, checkpoint_times, means, errors, fit)
    if math.isfinite(fit.rate):
        low_rate, high_rate = fit.confidence_interval
        logger.info(f"Contraction rate {fit.rate:.4f}, 95% interval ({low_rate:.4f}, {high_rate:.4f})")
    return result
