from __future__ import annotations

import math

import numpy as np
from numba import njit

ISING_KIND = 0
HARDCORE_KIND = 1


@njit(cache=True)
def _neighbour_sum(states, leaf_terms, row, v, b, n_vertices):
    total = np.int64(leaf_terms[row, v])
    if v > 0:
        total += states[row, (v - 1) // b]
    first = b * v + 1
    if first < n_vertices:
        for c in range(first, first + b):
            total += states[row, c]
    return total


@njit(cache=True)
def _occupied_neighbour(states, leaf_terms, row, v, b, n_vertices):
    if leaf_terms[row, v] > 0:
        return True
    if v > 0 and states[row, (v - 1) // b] == 1:
        return True
    first = b * v + 1
    if first < n_vertices:
        for c in range(first, first + b):
            if states[row, c] == 1:
                return True
    return False


@njit(cache=True)
def run_event_kernel(
    kind,
    b,
    times,
    vertices,
    marks,
    states,
    active,
    leaf_terms,
    beta,
    h,
    occupy_probability,
    checkpoint_times,
    snapshots,
    order_signs,
    check_order,
    watch_limit,
    check_legal,
    record_times,
    record_vertices,
    record_values,
):
    """Apply the driver's events in time order to every row of ``states``.

    All rows read the same mark, so a rule monotone in the neighbours keeps ordered rows ordered.
    Returns ``(violations, watch_time, illegal_count, n_records)``; ``watch_time`` is -1 when rows
    0 and 1 never disagree on a vertex below ``watch_limit``.
    """
    n_rows, n_vertices = states.shape
    n_checkpoints = checkpoint_times.shape[0]
    record = record_times.shape[0] > 0
    watching = watch_limit > 0 and n_rows >= 2

    watch_time = -1.0
    if watching:
        for v in range(min(watch_limit, n_vertices)):
            if states[0, v] != states[1, v]:
                watch_time = 0.0
                break

    violations = 0
    illegal = 0
    n_records = 0
    checkpoint = 0
    for e in range(times.shape[0]):
        t = times[e]
        while checkpoint < n_checkpoints and checkpoint_times[checkpoint] < t:
            snapshots[checkpoint, :, :] = states
            checkpoint += 1
        if checkpoint == n_checkpoints and not record and (not watching or watch_time >= 0.0):
            break

        v = vertices[e]
        if v >= n_vertices:
            continue
        u = marks[e]
        touched = False
        for r in range(n_rows):
            if not active[r, v]:
                continue
            touched = True
            if kind == ISING_KIND:
                field = h + _neighbour_sum(states, leaf_terms, r, v, b, n_vertices)
                upper = 1.0 / (1.0 + math.exp(-2.0 * beta * field))
                states[r, v] = 1 if u < upper else -1
            else:
                blocked = _occupied_neighbour(states, leaf_terms, r, v, b, n_vertices)
                states[r, v] = 1 if (not blocked and u < occupy_probability) else 0
                if check_legal and states[r, v] == 1 and _occupied_neighbour(states, leaf_terms, r, v, b, n_vertices):
                    illegal += 1
        if not touched:
            continue

        if record:
            record_times[n_records] = t
            record_vertices[n_records] = v
            record_values[n_records, :] = states[:, v]
            n_records += 1
        if check_order:
            sign = order_signs[v]
            for r in range(1, n_rows):
                if sign * (states[r - 1, v] - states[r, v]) > 0:
                    violations += 1
        if watching and watch_time < 0.0 and v < watch_limit and states[0, v] != states[1, v]:
            watch_time = t

    while checkpoint < n_checkpoints:
        snapshots[checkpoint, :, :] = states
        checkpoint += 1
    return violations, watch_time, illegal, n_records
