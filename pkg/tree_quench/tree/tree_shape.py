from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

MAX_VERTEX_INDEX = 2**62


@dataclass(frozen=True)
class TreeShape:
    """Finite rooted b-ary tree of the given depth, vertices numbered breadth-first from the root.

    The parent of ``v`` is ``(v - 1) // b`` and its children are ``b*v + 1, ..., b*v + b``.
    """

    b: int
    depth: int

    def __post_init__(self) -> None:
        if int(self.b) != self.b or self.b < 2:
            msg = f"Branching factor must be an integer >= 2, got: {self.b}"
            raise ValueError(msg)
        if int(self.depth) != self.depth or self.depth < 0:
            msg = f"Depth must be a non-negative integer, got: {self.depth}"
            raise ValueError(msg)
        if level_start(self.b, self.depth + 1) > MAX_VERTEX_INDEX:
            msg = f"A {self.b}-ary tree of depth {self.depth} has more vertices than a 64-bit index can address"
            raise OverflowError(msg)

    @property
    def n_vertices(self) -> int:
        return level_start(self.b, self.depth + 1)

    @property
    def n_leaves(self) -> int:
        return self.b**self.depth

    def level_start(self, k: int) -> int:
        return level_start(self.b, k)

    def level_vertices(self, k: int) -> NDArray[np.int64]:
        if k < 0 or k > self.depth:
            return np.empty(0, dtype=np.int64)
        return np.arange(self.level_start(k), self.level_start(k + 1), dtype=np.int64)

    @cached_property
    def levels(self) -> NDArray[np.int64]:
        levels = np.repeat(np.arange(self.depth + 1, dtype=np.int64), [self.b**k for k in range(self.depth + 1)])
        levels.setflags(write=False)
        return levels

    @cached_property
    def parents(self) -> NDArray[np.int64]:
        parents = (np.arange(self.n_vertices, dtype=np.int64) - 1) // self.b
        parents[0] = -1
        parents.setflags(write=False)
        return parents

    def level(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.levels[v])

    def parent(self, v: int) -> int:
        self._check_vertex(v)
        return -1 if v == 0 else (v - 1) // self.b

    def children(self, v: int) -> NDArray[np.int64]:
        self._check_vertex(v)
        first = self.b * v + 1
        if first >= self.n_vertices:
            return np.empty(0, dtype=np.int64)
        return np.arange(first, first + self.b, dtype=np.int64)

    def is_leaf(self, v: int) -> bool:
        return self.level(v) == self.depth

    def parity_signs(self) -> NDArray[np.int8]:
        """+1 on even levels and -1 on odd levels."""
        return np.where(self.levels % 2 == 0, 1, -1).astype(np.int8)

    def _check_vertex(self, v: int) -> None:
        if v < 0 or v >= self.n_vertices:
            msg = f"Vertex {v} is outside a tree with {self.n_vertices} vertices"
            raise ValueError(msg)


def level_start(b: int, k: int) -> int:
    """Index of the first vertex of level ``k``, which is also the number of vertices above it."""
    return (b**k - 1) // (b - 1)


def build_tree(b: int, depth: int) -> TreeShape:
    return TreeShape(b, depth)


def descendants_at_depth(shape: TreeShape, y: int, k: int) -> NDArray[np.int64]:
    """All descendants of ``y`` at distance ``k``; empty when they fall below the tree."""
    level = shape.level(y)
    if k < 0 or level + k > shape.depth:
        return np.empty(0, dtype=np.int64)
    width = shape.b**k
    first = width * y + level_start(shape.b, k)
    return np.arange(first, first + width, dtype=np.int64)


def subtree_vertices(shape: TreeShape, y: int, levels: int | None = None) -> NDArray[np.int64]:
    """``y`` and its descendants at distance below ``levels`` (the whole subtree when ``None``)."""
    remaining = shape.depth - shape.level(y)
    levels = remaining + 1 if levels is None else min(levels, remaining + 1)
    return np.concatenate([descendants_at_depth(shape, y, k) for k in range(levels)])


def path_to_descendant(shape: TreeShape, y: int, x: int) -> list[int]:
    """Vertices from ``y`` down to ``x``, excluding ``y`` and including ``x``."""
    level_y = shape.level(y)
    path = []
    v = x
    while shape.level(v) > level_y:
        path.append(v)
        v = shape.parent(v)
    if v != y:
        msg = f"Vertex {x} is not a descendant of {y}"
        raise ValueError(msg)
    return path[::-1]


def ancestor_table(shape: TreeShape, level: int) -> NDArray[np.int64]:
    """Row ``i`` lists the path from the root to the ``i``-th vertex of ``level``, root excluded."""
    vertices = shape.level_vertices(level)
    table = np.empty((len(vertices), level), dtype=np.int64)
    current = vertices.copy()
    for k in range(level - 1, -1, -1):
        table[:, k] = current
        current = (current - 1) // shape.b
    return table
