from __future__ import annotations

from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from .tree_shape import TreeShape


class ObstacleEnv:
    """Free/obstacle marking of a tree together with the free component of the root."""

    def __init__(self, shape: TreeShape, free: NDArray[np.bool_]) -> None:
        free = np.array(free, dtype=bool)
        if free.shape != (shape.n_vertices,):
            msg = f"Expected {shape.n_vertices} free flags, got array of shape {free.shape}"
            raise ValueError(msg)
        free.setflags(write=False)
        self.shape = shape
        self.free = free

    @property
    def obstacles(self) -> NDArray[np.bool_]:
        return ~self.free

    @cached_property
    def component(self) -> NDArray[np.bool_]:
        """Membership in T(omega); empty when the root is an obstacle."""
        component = self.free.copy()
        for k in range(1, self.shape.depth + 1):
            vertices = self.shape.level_vertices(k)
            component[vertices] &= component[(vertices - 1) // self.shape.b]
        component.setflags(write=False)
        return component

    def outer_boundary(self) -> NDArray[np.int64]:
        """Vertices outside T(omega) whose parent lies in it."""
        parents = self.shape.parents
        inside_parent = np.zeros(self.shape.n_vertices, dtype=bool)
        inside_parent[1:] = self.component[parents[1:]]
        return np.flatnonzero(inside_parent & ~self.component)

    def reaches_level(self, level: int) -> bool:
        return bool(self.component[self.shape.level_vertices(level)].any())

    def __repr__(self) -> str:
        return f"ObstacleEnv(b={self.shape.b}, depth={self.shape.depth}, free={int(self.free.sum())}/{self.shape.n_vertices})"
