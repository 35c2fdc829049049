from __future__ import annotations

import logging as lg
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..config import DEBUG_ENV_VAR
from ..tree import Region
from .driver import CouplingDriver
from .kernels import HARDCORE_KIND, run_event_kernel
from .spin_model import SpinModel

logger = lg.getLogger(__name__)


@dataclass
class Instance:
    """One copy of the dynamics: a region and a full-universe starting state."""

    region: Region
    initial: NDArray[np.int8]


@dataclass
class EngineRun:
    checkpoint_times: NDArray[np.float64]
    snapshots: NDArray[np.int8]
    violations: int
    watch_time: float | None
    illegal_count: int
    record_times: NDArray[np.float64]
    record_vertices: NDArray[np.int64]
    record_values: NDArray[np.int8]
    ordered: bool


def rows_ordered(states: NDArray, signs: NDArray[np.int8]) -> bool:
    """Whether consecutive rows are ordered at every vertex under the oriented order."""
    states = np.asarray(states, dtype=np.int64)
    return bool(np.all(signs * (states[:-1] - states[1:]) <= 0))


def check_checkpoints(checkpoint_times: NDArray, t_max: float) -> NDArray[np.float64]:
    checkpoint_times = np.asarray(checkpoint_times, dtype=np.float64)
    if np.any(checkpoint_times < 0) or np.any(np.diff(checkpoint_times) < 0):
        msg = "Checkpoint times must be non-negative and non-decreasing"
        raise ValueError(msg)
    if len(checkpoint_times) and checkpoint_times[-1] > t_max:
        msg = f"Checkpoint time {checkpoint_times[-1]} exceeds the driver horizon {t_max}"
        raise ValueError(msg)
    return checkpoint_times


def run_instances(
    model: SpinModel,
    instances: list[Instance],
    driver: CouplingDriver,
    checkpoint_times: NDArray,
    watch_limit: int = 0,
    record: bool = False,
    check_order: bool = True,
) -> EngineRun:
    """Run every instance on the same driver events in lockstep."""
    if not instances:
        msg = "Need at least one instance to simulate"
        raise ValueError(msg)
    shape = instances[0].region.shape
    for instance in instances:
        if instance.region.shape != shape:
            msg = f"All instances must share one universe tree, got {instance.region.shape} and {shape}"
            raise ValueError(msg)
    if driver.n_vertices < shape.n_vertices:
        msg = f"Driver covers {driver.n_vertices} vertices but the tree has {shape.n_vertices}"
        raise ValueError(msg)
    checkpoint_times = check_checkpoints(checkpoint_times, driver.t_max)

    states = np.stack([instance.region.fill(instance.initial) for instance in instances]).astype(np.int8)
    active = np.stack([instance.region.active for instance in instances])
    leaf_terms = np.stack([instance.region.leaf_terms for instance in instances])
    signs = model.order_signs(shape)
    ordered = len(instances) > 1 and rows_ordered(states, signs)

    n_rows = len(instances)
    n_checkpoints = len(checkpoint_times)
    snapshots = np.empty((n_checkpoints, n_rows, shape.n_vertices), dtype=np.int8)
    n_record = len(driver) if record else 0
    record_times = np.empty(n_record, dtype=np.float64)
    record_vertices = np.empty(n_record, dtype=np.int64)
    record_values = np.empty((n_record, n_rows), dtype=np.int8)

    beta, h, occupy_probability = model.kernel_parameters()
    check_legal = model.kind == HARDCORE_KIND and bool(os.environ.get(DEBUG_ENV_VAR))
    violations, watch_time, illegal, n_records = run_event_kernel(
        model.kind,
        shape.b,
        driver.times,
        driver.vertices,
        driver.marks,
        states,
        active,
        leaf_terms,
        beta,
        h,
        occupy_probability,
        checkpoint_times,
        snapshots,
        signs,
        ordered and check_order,
        watch_limit,
        check_legal,
        record_times,
        record_vertices,
        record_values,
    )
    if violations:
        logger.warning(f"Coupled run broke the order {violations} times ({driver!r})")
    if illegal:
        logger.warning(f"Hard-core run produced {illegal} illegal occupations ({driver!r})")
    return EngineRun(
        checkpoint_times,
        snapshots,
        int(violations),
        None if watch_time < 0 else float(watch_time),
        int(illegal),
        record_times[:n_records],
        record_vertices[:n_records],
        record_values[:n_records],
        ordered,
    )
