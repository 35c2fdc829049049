from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import BOUNDARY_STREAM, INITIAL_STREAM
from ..dynamics import CouplingDriver, IsingModel, Instance, cap_depth, run_coupled
from ..gibbs import r_recursion
from ..tree import Fixed, Plus, SpinConfig, TreeShape, obstacles_from_quench, sample_bernoulli_spins
from ..utils import column_mean_and_stderr, replica_generator, run_replicas
from .experiment_spec import ExperimentSpec, Table

logger = lg.getLogger(__name__)


@dataclass
class DecompositionResult:
    """The three error terms separating the quenched root spin from the plus phase.

    ``environment_terms`` has one entry per sampled environment. The relaxation term is the
    mean gap between the plus start and the quenched start inside the obstacle tree with plus
    boundary; the boundary term is the fraction of replicas in which the plus and the
    continued boundary disagree at the root.
    """

    ell: int
    gamma: float
    depth: int
    checkpoint_times: NDArray[np.float64]
    environment_terms: NDArray[np.float64]
    relaxation: NDArray[np.float64]
    relaxation_se: NDArray[np.float64]
    boundary_discrepancy: NDArray[np.float64]
    boundary_discrepancy_se: NDArray[np.float64]
    first_root_discrepancy: NDArray[np.float64]
    violations: int

    @property
    def median_environment_term(self) -> float:
        return float(np.median(self.environment_terms))

    def table(self, name: str) -> Table:
        header = ["t", "relaxation", "relaxation_se", "boundary_discrepancy", "boundary_discrepancy_se"]
        rows = zip(self.checkpoint_times, self.relaxation, self.relaxation_se, self.boundary_discrepancy, self.boundary_discrepancy_se)
        return Table(name, header, rows)


def decomposition_depth(ell: int, gamma: float) -> int:
    if ell < 1 or gamma < 1:
        msg = f"Need ell >= 1 and gamma >= 1, got ell={ell}, gamma={gamma}"
        raise ValueError(msg)
    return cap_depth(math.ceil(ell**gamma), "Decomposition depth")


def quench_decomposition(
    spec: ExperimentSpec,
    ell: int,
    gamma: float = 2.0,
    workers: int | None = None,
    verbose: bool = False,
) -> DecompositionResult:
    """Split ``rho_t(eta) - mu^+(sigma_root)`` into environment, relaxation and boundary terms.

    Each replica samples ``eta`` on a tree of depth ``L = ell^gamma`` and turns its minus spins
    below level ``ell`` into obstacles. The environment term compares the plus-boundary root
    magnetization with and without obstacles. The other two come from coupled runs on the
    obstacle tree: plus start against ``eta``, and plus boundary against the boundary that
    continues ``eta`` one level further down.
    """
    params = spec.model_params()
    depth = decomposition_depth(ell, gamma)
    if ell > depth:
        msg = f"Obstacle level {ell} lies below the simulated depth {depth}"
        raise ValueError(msg)
    shape = TreeShape(params.b, depth)
    checkpoints = spec.checkpoint_times()
    clean = r_recursion(params, shape, boundary=Plus()).root_magnetization()
    model = IsingModel(params)

    def replica(i: int) -> tuple[float, NDArray, NDArray, float, int]:
        eta = sample_bernoulli_spins(shape, spec.p, replica_generator(spec.seed, i, INITIAL_STREAM))
        env = obstacles_from_quench(eta, ell)
        environment_term = abs(clean - r_recursion(params, shape, env, Plus()).root_magnetization())

        rng = replica_generator(spec.seed, i, BOUNDARY_STREAM)
        below = np.where(rng.random(params.b ** (depth + 1)) < spec.p, 1, -1)
        quenched = SpinConfig(shape, eta.values, Plus(), env).values
        plus_start = SpinConfig.constant(shape, 1, Plus(), env).values
        plus_region = model.region(shape, Plus(), env=env)
        continued_region = model.region(shape, Fixed(below), env=env)
        driver = CouplingDriver(spec.seed, shape.n_vertices, spec.t_max, replica=i)

        relaxation = run_coupled(model, [Instance(plus_region, quenched), Instance(plus_region, plus_start)], driver, checkpoints)
        roots = np.stack([t.snapshots[:, 0] for t in relaxation.trajectories]).astype(np.float64)
        boundary = run_coupled(
            model,
            [Instance(continued_region, quenched), Instance(plus_region, quenched)],
            driver,
            checkpoints,
            watch_limit=1,
        )
        differ = (boundary.trajectories[0].snapshots[:, 0] != boundary.trajectories[1].snapshots[:, 0]).astype(np.float64)
        first = math.inf if boundary.watch_time is None else boundary.watch_time
        return environment_term, roots[1] - roots[0], differ, first, relaxation.violations + boundary.violations

    runs = run_replicas(replica, spec.replicas, workers, verbose, desc="Decomposition")
    relaxation, relaxation_se = column_mean_and_stderr(np.stack([r[1] for r in runs]))
    discrepancy, discrepancy_se = column_mean_and_stderr(np.stack([r[2] for r in runs]))
    result = DecompositionResult(
        ell,
        gamma,
        depth,
        checkpoints,
        np.array([r[0] for r in runs]),
        relaxation,
        relaxation_se,
        discrepancy,
        discrepancy_se,
        np.array([r[3] for r in runs]),
        sum(r[4] for r in runs),
    )
    logger.info(
        f"Decomposition at ell={ell}, L={depth}: median environment term {result.median_environment_term:.3e}, "
        f"final relaxation {relaxation[-1]:.4f}, final boundary discrepancy {discrepancy[-1]:.4f}"
    )
    return result
