from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .boundary import Boundary, Free
from .obstacle_env import ObstacleEnv
from .tree_shape import TreeShape


@dataclass(eq=False)
class Region:
    """The dynamic part of a tree embedded in a universe tree.

    ``active`` marks the vertices that may change. ``values`` holds the frozen value of
    every other vertex, and ``leaf_terms`` the contribution of the boundary level below
    the universe leaves (sum of spins, or number of occupied neighbours).
    """

    shape: TreeShape
    depth: int
    active: NDArray[np.bool_]
    values: NDArray[np.int8]
    leaf_terms: NDArray[np.int16]
    boundary: Boundary

    @property
    def active_vertices(self) -> NDArray[np.int64]:
        return np.flatnonzero(self.active)

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    def fill(self, interior: NDArray) -> NDArray[np.int8]:
        """Full-universe state taking active values from ``interior`` and frozen values elsewhere."""
        interior = np.asarray(interior)
        if interior.shape[-1] != self.shape.n_vertices:
            msg = f"Expected states over {self.shape.n_vertices} vertices, got shape {interior.shape}"
            raise ValueError(msg)
        states = np.broadcast_to(self.values, interior.shape).copy()
        states[..., self.active] = interior[..., self.active]
        return states


def _embedded_levels(shape: TreeShape, depth: int | None) -> int:
    depth = shape.depth if depth is None else depth
    if depth < 0 or depth > shape.depth:
        msg = f"Region depth {depth} does not fit in a universe of depth {shape.depth}"
        raise ValueError(msg)
    return depth


def ising_region(
    shape: TreeShape,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
    depth: int | None = None,
) -> Region:
    """Ising region on the top ``depth`` levels of ``shape`` restricted to the free component."""
    boundary = boundary or Free()
    depth = _embedded_levels(shape, depth)
    levels = shape.levels
    active = levels <= depth
    if env is not None:
        if env.shape != shape:
            msg = f"Obstacle environment lives on {env.shape}, region on {shape}"
            raise ValueError(msg)
        active &= env.component

    values = np.zeros(shape.n_vertices, dtype=np.int8)
    values[(levels <= depth) & ~active] = -1
    leaf_terms = np.zeros(shape.n_vertices, dtype=np.int16)
    if depth < shape.depth:
        values[shape.level_vertices(depth + 1)] = boundary.spins(shape.b, depth + 1)
        for k in range(depth + 2, shape.depth + 1):
            values[shape.level_vertices(k)] = boundary.deep_spins(shape.b, k)
    else:
        below = boundary.spins(shape.b, depth + 1).astype(np.int16)
        leaf_terms[shape.level_vertices(depth)] = below.reshape(-1, shape.b).sum(axis=1)
    return Region(shape, depth, active, values, leaf_terms, boundary)


def hardcore_region(shape: TreeShape, boundary: Boundary | None = None, depth: int | None = None) -> Region:
    """Hard-core region on the top ``depth`` levels of ``shape``."""
    boundary = boundary or Free()
    depth = _embedded_levels(shape, depth)
    levels = shape.levels
    active = levels <= depth
    values = np.zeros(shape.n_vertices, dtype=np.int8)
    leaf_terms = np.zeros(shape.n_vertices, dtype=np.int16)
    if depth < shape.depth:
        values[shape.level_vertices(depth + 1)] = boundary.occupations(shape.b, depth + 1)
        for k in range(depth + 2, shape.depth + 1):
            values[shape.level_vertices(k)] = boundary.deep_occupations(shape.b, k)
    else:
        below = boundary.occupations(shape.b, depth + 1).astype(np.int16)
        leaf_terms[shape.level_vertices(depth)] = below.reshape(-1, shape.b).sum(axis=1)
    return Region(shape, depth, active, values, leaf_terms, boundary)
