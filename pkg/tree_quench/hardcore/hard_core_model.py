from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ..dynamics import HARDCORE_KIND, SpinModel
from ..tree import Boundary, Free, Region, TreeShape, hardcore_region
from .hc_params import HCParams


def occupied_edges(states: NDArray, region: Region) -> NDArray[np.int64]:
    """Number of edges with both ends occupied, per row, including edges to the boundary below."""
    states = np.atleast_2d(states).astype(np.int64)
    parents = region.shape.parents[1:]
    inner = (states[:, 1:] * states[:, parents]).sum(axis=1)
    below = states @ region.leaf_terms.astype(np.int64)
    return inner + below


def is_independent_set(shape: TreeShape, values: NDArray, boundary: Boundary | None = None) -> bool:
    region = hardcore_region(shape, boundary or Free())
    return bool(occupied_edges(values, region)[0] == 0)


@dataclass(eq=False)
class HCConfig:
    """Independent set on every vertex of ``shape``, legal with respect to its boundary."""

    shape: TreeShape
    values: NDArray[np.int8]
    boundary: Boundary = field(default_factory=Free)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.int8)
        if values.shape != (self.shape.n_vertices,):
            msg = f"Expected {self.shape.n_vertices} occupations, got array of shape {values.shape}"
            raise ValueError(msg)
        if not np.all((values == 0) | (values == 1)):
            msg = "Occupations must all be 0 or 1"
            raise ValueError(msg)
        if not is_independent_set(self.shape, values, self.boundary):
            msg = "Configuration is not an independent set"
            raise ValueError(msg)
        values.setflags(write=False)
        self.values = values

    @classmethod
    def parity(cls, shape: TreeShape, parity: int, boundary: Boundary | None = None) -> HCConfig:
        """All vertices on levels of the given parity occupied (``tau^e`` for 0, ``tau^o`` for 1)."""
        values = (shape.levels % 2 == parity).astype(np.int8)
        return cls(shape, values, boundary or Free())

    def density(self) -> float:
        return float(self.values.mean())


def hc_order_leq(sigma: HCConfig, eta: HCConfig) -> bool:
    """``sigma`` below ``eta``: fewer occupied even sites and more occupied odd sites."""
    if sigma.shape != eta.shape:
        msg = f"Cannot compare configurations on {sigma.shape} and {eta.shape}"
        raise ValueError(msg)
    signs = sigma.shape.parity_signs().astype(np.int64)
    difference = sigma.values.astype(np.int64) - eta.values.astype(np.int64)
    return bool(np.all(signs * difference <= 0))


class HardCoreModel(SpinModel):
    kind = HARDCORE_KIND
    low = 0
    high = 1

    def __init__(self, params: HCParams) -> None:
        self.params = params

    @property
    def b(self) -> int:
        return self.params.b

    def region(self, shape: TreeShape, boundary: Boundary | None = None, depth: int | None = None, **kwargs) -> Region:
        if kwargs.get("env") is not None:
            msg = "The hard-core model has no obstacle environments"
            raise ValueError(msg)
        return hardcore_region(shape, boundary, depth)

    def upper_probabilities(self, states: NDArray, region: Region, vertex: int) -> NDArray[np.float64]:
        blocked = (self.neighbour_values(states, region, vertex) > 0).any(axis=1)
        return np.where(blocked, 0.0, self.params.p_lambda)

    def log_weights(self, states: NDArray, region: Region) -> NDArray[np.float64]:
        states = np.atleast_2d(states)
        occupied = states[:, region.active].sum(axis=1).astype(np.float64)
        return np.where(self.is_legal(states, region), self.params.log_lam * occupied, -np.inf)

    def is_legal(self, states: NDArray, region: Region) -> NDArray[np.bool_]:
        return occupied_edges(states, region) == 0

    def order_signs(self, shape: TreeShape) -> NDArray[np.int8]:
        return shape.parity_signs()

    def kernel_parameters(self) -> tuple[float, float, float]:
        return 0.0, 0.0, self.params.p_lambda

    def __repr__(self) -> str:
        return f"HardCoreModel(lam={self.params.lam}, b={self.params.b})"


def hc_heat_bath_occupy_probability(params: HCParams, config: HCConfig, x: int) -> float:
    """``p_lambda`` when every neighbour of ``x`` is vacant, 0 otherwise."""
    if not 0 <= x < config.shape.n_vertices:
        msg = f"Vertex {x} is not an interior vertex of a tree with {config.shape.n_vertices} vertices"
        raise ValueError(msg)
    model = HardCoreModel(params)
    region = model.region(config.shape, config.boundary)
    return float(model.upper_probabilities(config.values, region, x)[0])
