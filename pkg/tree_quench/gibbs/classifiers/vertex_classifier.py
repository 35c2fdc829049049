from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ...tree import ancestor_table
from ..recursion import RatioField


@dataclass
class OffPathChildren:
    """Children of every path vertex that are not on the path itself.

    Arrays have shape ``(paths, level, b)``; ``off_path`` masks the relevant entries.
    Children below the tree take their values from the boundary.
    """

    log_ratios: NDArray[np.float64]
    obstacles: NDArray[np.bool_]
    off_path: NDArray[np.bool_]

    def obstacle_count(self) -> NDArray[np.int64]:
        return (self.obstacles & self.off_path).sum(axis=2)

    def free_children_small(self, log_eps: float) -> NDArray[np.bool_]:
        """Every free off-path child has ratio at most eps."""
        violates = self.off_path & ~self.obstacles & (self.log_ratios > log_eps)
        return ~violates.any(axis=2)

    def all_children_small(self, log_eps: float) -> NDArray[np.bool_]:
        violates = self.off_path & (self.log_ratios > log_eps)
        return ~violates.any(axis=2)


def off_path_children(field: RatioField, level: int) -> tuple[NDArray[np.int64], OffPathChildren]:
    shape = field.shape
    b = shape.b
    table = ancestor_table(shape, level)
    children = b * table[:, :, None] + 1 + np.arange(b)
    next_on_path = np.full(table.shape, -1, dtype=np.int64)
    next_on_path[:, :-1] = table[:, 1:]
    off_path = children != next_on_path[:, :, None]

    inside = children < shape.n_vertices
    log_ratios = np.empty(children.shape)
    log_ratios[inside] = field.log_ratios[children[inside]]
    obstacles = np.zeros(children.shape, dtype=bool)
    if field.env is not None:
        obstacles[inside] = ~field.env.free[children[inside]]
    if not inside.all():
        # only the last column can reach below the tree
        spins = field.boundary.spins(b, shape.depth + 1).astype(np.int64)
        below = children[~inside] - shape.n_vertices
        log_ratios[~inside] = np.where(spins[below] == -1, np.inf, -np.inf)
        obstacles[~inside] = spins[below] == -1
    return table, OffPathChildren(log_ratios, obstacles, off_path)


class VertexClassifier(ABC):
    """Good/bad classification of the vertices along every root-to-level path.

    ``psi`` turns the classification into the independent per-vertex factors of the
    modified weight: 0 off the free component, ``u`` on good and 1 on bad vertices.
    """

    name: str = "classifier"
    margin_range: tuple[float, float] = (0.0, math.inf)  # open interval of admissible margins
    default_margin: float = 1.0

    def __init__(self, margin: float | None = None) -> None:
        margin = self.default_margin if margin is None else margin
        low, high = self.margin_range
        if not low < margin < high:
            msg = f"Margin of regime {self.name} must lie in ({low}, {high}), got: {margin}"
            raise ValueError(msg)
        self.margin = margin

    @abstractmethod
    def classify(self, field: RatioField, level: int) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
        """Path table (root excluded) and the matching good flags."""

    def psi(self, field: RatioField, level: int, u: float) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
        """Per-vertex factors and the mask of bad vertices inside the free component."""
        table, good = self.classify(field, level)
        inside = np.isfinite(field.log_ratios[table])
        factors = np.where(good, u, 1.0)
        factors[~inside] = 0.0
        return factors, ~good & inside

    def __repr__(self) -> str:
        return f"{type(self).__name__}(margin={self.margin})"
