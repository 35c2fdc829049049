from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from ..recursion import RatioField
from .vertex_classifier import VertexClassifier, off_path_children


class ConsecutiveRegularClassifier(VertexClassifier):
    """Field margin ``a`` above ``-h_c``.

    A vertex is regular when all its off-path children have ratio at most eps, and
    good when it is regular with at least ``k0 - 1`` consecutive regular vertices
    right below it on the path, ``k0 = floor(4 / a)``.
    """

    name = "a"

    @property
    def k0(self) -> int:
        return math.floor(4 / self.margin)

    def classify(self, field: RatioField, level: int) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
        table, children = off_path_children(field, level)
        regular = children.all_children_small(field.params.log_eps)

        run_below = np.zeros(regular.shape, dtype=np.int64)
        for j in range(level - 2, -1, -1):
            run_below[:, j] = np.where(regular[:, j + 1], run_below[:, j + 1] + 1, 0)
        return table, regular & (run_below >= self.k0 - 1)
