from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import MAX_SIMULATION_DEPTH, SIGMA_SLACK, TRUNCATION_SAFETY_CONSTANT
from ..gibbs import ModelParams
from ..tree import Boundary, Minus, Plus, SpinConfig, TreeShape
from ..utils import Estimate, estimate_mean, run_replicas
from .driver import CouplingDriver
from .engine import EngineRun, Instance, run_instances
from .ising_model import IsingModel
from .spin_model import SpinModel

logger = lg.getLogger(__name__)


@dataclass
class Trajectory:
    """Snapshots at the checkpoint times plus, optionally, every update applied to the copy."""

    checkpoint_times: NDArray[np.float64]
    snapshots: NDArray[np.int8]
    update_times: NDArray[np.float64]
    update_vertices: NDArray[np.int64]
    update_values: NDArray[np.int8]

    def __len__(self) -> int:
        return len(self.update_times)

    def final(self) -> NDArray[np.int8]:
        return self.snapshots[-1]


@dataclass
class CoupledRun:
    trajectories: list[Trajectory]
    violations: int
    ordered: bool
    watch_time: float | None = None


def split_run(run: EngineRun, instances: list[Instance]) -> list[Trajectory]:
    trajectories = []
    for r, instance in enumerate(instances):
        mine = instance.region.active[run.record_vertices]
        trajectories.append(
            Trajectory(
                run.checkpoint_times,
                run.snapshots[:, r, :],
                run.record_times[mine],
                run.record_vertices[mine],
                run.record_values[mine, r],
            )
        )
    return trajectories


def heat_bath_plus_probability(params: ModelParams, config: SpinConfig, x: int) -> float:
    """P(new spin = +1) at ``x`` given its neighbours in ``config``; obstacles count as -1."""
    if not 0 <= x < config.shape.n_vertices:
        msg = f"Vertex {x} is not an interior vertex of a tree with {config.shape.n_vertices} vertices"
        raise ValueError(msg)
    model = IsingModel(params)
    region = model.region(config.shape, config.boundary, env=config.env)
    if not region.active[x]:
        msg = f"Vertex {x} is frozen (obstacle or cut off from the root) and has no heat-bath update"
        raise ValueError(msg)
    return float(model.upper_probabilities(region.fill(config.values), region, x)[0])


def simulate(
    params: ModelParams,
    initial: SpinConfig,
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    depth: int | None = None,
    record: bool = False,
) -> Trajectory:
    """Heat-bath dynamics from ``initial`` with its boundary and obstacles, driven by ``driver``."""
    model = IsingModel(params)
    region = model.region(initial.shape, initial.boundary, depth, env=initial.env)
    instances = [Instance(region, initial.values)]
    run = run_instances(model, instances, driver, checkpoint_times, record=record, check_order=False)
    return split_run(run, instances)[0]


def run_coupled(
    model: SpinModel,
    instances: list[Instance],
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    watch_limit: int = 0,
    record: bool = False,
) -> CoupledRun:
    run = run_instances(model, instances, driver, checkpoint_times, watch_limit=watch_limit, record=record)
    return CoupledRun(split_run(run, instances), run.violations, run.ordered, run.watch_time)


def coupled_simulate(
    params: ModelParams,
    initials: list[SpinConfig],
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    depth: int | None = None,
    watch_limit: int = 0,
    record: bool = False,
) -> CoupledRun:
    """Run several starting configurations (each with its own boundary) on shared events.

    All copies must live on the same tree and obstacle environment.
    """
    first = initials[0]
    for config in initials[1:]:
        if config.shape != first.shape or not _same_env(config, first):
            msg = "Coupled copies must share the tree and the obstacle environment"
            raise ValueError(msg)
    model = IsingModel(params)
    instances = [
        Instance(model.region(config.shape, config.boundary, depth, env=config.env), config.values)
        for config in initials
    ]
    return run_coupled(model, instances, driver, checkpoint_times, watch_limit, record)


def _same_env(a: SpinConfig, b: SpinConfig) -> bool:
    if a.env is None or b.env is None:
        return a.env is None and b.env is None
    return bool(np.array_equal(a.env.free, b.env.free))


def sandwich_simulate(
    params: ModelParams,
    inner_depth: int,
    outer: SpinConfig,
    driver: CouplingDriver,
    checkpoint_times: NDArray,
) -> CoupledRun:
    """Minus boundary on the inner tree, ``outer.boundary`` on the whole tree, plus boundary on the inner tree.

    All three copies start from ``outer.values`` and the order between them is checked after every event.
    """
    model = IsingModel(params)
    shape, env = outer.shape, outer.env
    instances = [
        Instance(model.region(shape, Minus(), inner_depth, env=env), outer.values),
        Instance(model.region(shape, outer.boundary, env=env), outer.values),
        Instance(model.region(shape, Plus(), inner_depth, env=env), outer.values),
    ]
    return run_coupled(model, instances, driver, checkpoint_times)


def estimate_rho(
    params: ModelParams,
    initial: SpinConfig,
    t: float,
    n_samples: int,
    seed: int,
    x: int = 0,
    depth: int | None = None,
    first_replica: int = 0,
    workers: int | None = None,
    verbose: bool = False,
) -> Estimate:
    """Monte Carlo estimate of the expected spin at ``x`` at time ``t`` from ``initial``."""
    if n_samples < 2:
        msg = f"Need at least two samples for a standard error, got: {n_samples}"
        raise ValueError(msg)
    if t == 0:
        return Estimate(float(initial.values[x]), 0.0, n_samples)
    n_vertices = initial.shape.n_vertices

    def spin_at_time(i: int) -> float:
        driver = CouplingDriver(seed, n_vertices, t, replica=first_replica + i)
        trajectory = simulate(params, initial, driver, [t], depth)
        return float(trajectory.snapshots[0, x])

    values = run_replicas(spin_at_time, n_samples, workers, verbose, desc="Estimating rho")
    return estimate_mean(values)


def truncation_depth_for_time(t: float, safety_constant: float = TRUNCATION_SAFETY_CONSTANT) -> int:
    if t < 0:
        msg = f"Time must be non-negative, got: {t}"
        raise ValueError(msg)
    return math.ceil(safety_constant * max(t, 1.0))


def cap_depth(depth: int, what: str = "Simulation depth") -> int:
    if depth > MAX_SIMULATION_DEPTH:
        logger.warning(f"{what} {depth} capped at {MAX_SIMULATION_DEPTH}")
        return MAX_SIMULATION_DEPTH
    return depth


@dataclass
class DoublingCheck:
    depth: int
    doubled_depth: int
    estimate: Estimate
    doubled_estimate: Estimate
    requested_depth: int

    @property
    def reduced(self) -> bool:
        """True when the requested depth had to be lowered so that its double fits under the depth cap."""
        return self.depth < self.requested_depth

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.estimate.stderr, self.doubled_estimate.stderr)

    @property
    def agree(self) -> bool:
        gap = abs(self.estimate.value - self.doubled_estimate.value)
        return gap <= SIGMA_SLACK * self.combined_stderr


def truncation_doubling_check(
    params: ModelParams,
    t: float,
    n_samples: int,
    seed: int,
    depth: int | None = None,
    spin: int = 1,
    boundary: Boundary | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> DoublingCheck:
    """Root estimate from the constant ``spin`` start at depth d and 2d, on disjoint replica streams.

    When 2d exceeds the simulation depth cap, the pair becomes (cap // 2, cap) so that the two
    depths always differ by a factor of two.
    """
    boundary = boundary or Plus()
    requested = truncation_depth_for_time(t) if depth is None else depth
    if requested < 1:
        msg = f"Doubling check needs a positive depth, got: {requested}"
        raise ValueError(msg)
    depth = requested
    if 2 * depth > MAX_SIMULATION_DEPTH:
        depth = MAX_SIMULATION_DEPTH // 2
        logger.warning(
            f"Doubling check at depth {requested} would exceed the cap of {MAX_SIMULATION_DEPTH}; comparing {depth} with {2 * depth}"
        )
    doubled = 2 * depth

    estimates = []
    for k, d in enumerate((depth, doubled)):
        shape = TreeShape(params.b, d)
        initial = SpinConfig.constant(shape, spin, boundary)
        estimates.append(
            estimate_rho(params, initial, t, n_samples, seed, first_replica=k * n_samples, workers=workers, verbose=verbose)
        )
    return DoublingCheck(depth, doubled, *estimates, requested_depth=requested)
