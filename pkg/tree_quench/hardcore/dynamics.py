from __future__ import annotations

from numpy.typing import NDArray

from ..dynamics import CoupledRun, CouplingDriver, Instance, Trajectory, run_coupled, run_instances, split_run
from ..tree import Even, Odd
from ..utils import Estimate, estimate_mean, run_replicas
from .hard_core_model import HardCoreModel, HCConfig
from .hc_params import HCParams


def hc_simulate(
    params: HCParams,
    initial: HCConfig,
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    depth: int | None = None,
    record: bool = False,
) -> Trajectory:
    model = HardCoreModel(params)
    region = model.region(initial.shape, initial.boundary, depth)
    instances = [Instance(region, initial.values)]
    run = run_instances(model, instances, driver, checkpoint_times, record=record, check_order=False)
    return split_run(run, instances)[0]


def hc_coupled_simulate(
    params: HCParams,
    initials: list[HCConfig],
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    depth: int | None = None,
    watch_limit: int = 0,
    record: bool = False,
) -> CoupledRun:
    """Copies with their own boundaries on shared events; the bipartite order is checked after every event."""
    shape = initials[0].shape
    if any(config.shape != shape for config in initials):
        msg = "Coupled copies must share the tree"
        raise ValueError(msg)
    model = HardCoreModel(params)
    instances = [Instance(model.region(shape, config.boundary, depth), config.values) for config in initials]
    return run_coupled(model, instances, driver, checkpoint_times, watch_limit, record)


def hc_sandwich_simulate(
    params: HCParams,
    inner_depth: int,
    outer: HCConfig,
    driver: CouplingDriver,
    checkpoint_times: NDArray,
) -> CoupledRun:
    """Odd boundary on the inner tree, ``outer.boundary`` on the whole tree, even boundary on the inner tree."""
    model = HardCoreModel(params)
    shape = outer.shape
    instances = [
        Instance(model.region(shape, Odd(), inner_depth), outer.values),
        Instance(model.region(shape, outer.boundary), outer.values),
        Instance(model.region(shape, Even(), inner_depth), outer.values),
    ]
    return run_coupled(model, instances, driver, checkpoint_times)


def hc_estimate_rho(
    params: HCParams,
    initial: HCConfig,
    t: float,
    n_samples: int,
    seed: int,
    x: int = 0,
    depth: int | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> Estimate:
    """Monte Carlo estimate of the occupation of ``x`` at time ``t``."""
    if n_samples < 2:
        msg = f"Need at least two samples for a standard error, got: {n_samples}"
        raise ValueError(msg)
    if t == 0:
        return Estimate(float(initial.values[x]), 0.0, n_samples)
    n_vertices = initial.shape.n_vertices

    def occupation_at_time(i: int) -> float:
        driver = CouplingDriver(seed, n_vertices, t, replica=i)
        return float(hc_simulate(params, initial, driver, [t], depth).snapshots[0, x])

    values = run_replicas(occupation_at_time, n_samples, workers, verbose, desc="Estimating occupation")
    return estimate_mean(values)

