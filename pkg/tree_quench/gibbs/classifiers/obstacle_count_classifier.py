from __future__ import annotations

from abc import abstractmethod

import numpy as np
from numpy.typing import NDArray

from ..recursion import RatioField
from .vertex_classifier import VertexClassifier, off_path_children


class ObstacleCountClassifier(VertexClassifier):
    """Good when few off-path children are obstacles and the free ones have ratio at most eps."""

    @abstractmethod
    def max_obstacles(self, b: int) -> float:
        pass

    def classify(self, field: RatioField, level: int) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
        table, children = off_path_children(field, level)
        few = children.obstacle_count() <= self.max_obstacles(field.shape.b)
        return table, few & children.free_children_small(field.params.log_eps)


class ZeroFieldClassifier(ObstacleCountClassifier):
    name = "b"
    margin_range = (0.0, 0.5)
    default_margin = 0.25

    def max_obstacles(self, b: int) -> float:
        return (1 - 2 * self.margin) * b / 2


class CriticalFieldClassifier(ObstacleCountClassifier):
    name = "c"
    margin_range = (0.0, 1.0)
    default_margin = 0.5

    def max_obstacles(self, b: int) -> float:
        return (1 - self.margin) * b
