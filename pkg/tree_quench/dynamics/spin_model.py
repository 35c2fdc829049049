from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
from numpy.typing import NDArray

from ..tree import Boundary, Region, TreeShape


class SpinModel(ABC):
    """Two-state spin system on a tree with a monotone heat-bath update.

    ``low`` and ``high`` are the two single-site values; an update sets the vertex to
    ``high`` iff its mark falls below ``upper_probabilities``.
    """

    kind: int
    low: int
    high: int

    @property
    @abstractmethod
    def b(self) -> int:
        pass

    @abstractmethod
    def region(self, shape: TreeShape, boundary: Boundary | None = None, depth: int | None = None, **kwargs) -> Region:
        pass

    @abstractmethod
    def upper_probabilities(self, states: NDArray, region: Region, vertex: int) -> NDArray[np.float64]:
        """Probability of the ``high`` value at ``vertex`` given each row of ``states``."""

    @abstractmethod
    def log_weights(self, states: NDArray, region: Region) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def kernel_parameters(self) -> tuple[float, float, float]:
        """``(beta, h, occupy_probability)`` as consumed by the event kernel."""

    def is_legal(self, states: NDArray, region: Region) -> NDArray[np.bool_]:
        return np.ones(len(np.atleast_2d(states)), dtype=bool)

    def order_signs(self, shape: TreeShape) -> NDArray[np.int8]:
        """Orientation of the coupling order at every vertex (+1 means ``low < high``)."""
        return np.ones(shape.n_vertices, dtype=np.int8)

    def neighbour_values(self, states: NDArray, region: Region, vertex: int) -> NDArray:
        """Values of the neighbours of ``vertex`` per row; the last column is the boundary term below."""
        states = np.atleast_2d(states)
        shape = region.shape
        columns = [states[:, shape.parents[vertex]]] if vertex > 0 else []
        columns += [states[:, c] for c in shape.children(vertex)]
        columns.append(np.full(len(states), region.leaf_terms[vertex]))
        return np.stack(columns, axis=1)
