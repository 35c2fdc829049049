from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from ..config import MAX_BRUTE_FORCE_SPINS
from ..tree import Boundary, ObstacleEnv, Region, TreeShape, ising_region
from .model_params import ModelParams


def enumerate_configurations(n: int) -> NDArray[np.int8]:
    """All 2^n spin vectors; bit j of the row index set means spin j is +1."""
    codes = np.arange(2**n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def ising_log_weights(params: ModelParams, states: NDArray, region: Region) -> NDArray[np.float64]:
    """Unnormalized log Gibbs weights of full-universe states (rows of ``states``).

    Absent neighbours hold 0 and drop out of the interaction sum.
    """
    states = np.atleast_2d(states).astype(np.float64)
    parents = region.shape.parents[1:]
    interaction = (states[:, 1:] * states[:, parents]).sum(axis=1)
    interaction += states @ region.leaf_terms.astype(np.float64)
    field = states[:, region.active].sum(axis=1)
    return params.beta * interaction + params.beta * params.h * field


@dataclass
class GibbsTable:
    """Exact finite-volume Gibbs measure as a table of states and probabilities."""

    region: Region
    states: NDArray[np.int8]
    probabilities: NDArray[np.float64]

    @property
    def shape(self) -> TreeShape:
        return self.region.shape

    def __len__(self) -> int:
        return len(self.probabilities)

    def expectation(self, values: NDArray) -> float:
        """Expectation of a function given by its value on every row."""
        return float(np.dot(self.probabilities, np.asarray(values, dtype=np.float64)))

    def plus_probability(self, v: int) -> float:
        return self.expectation(self.states[:, v] == 1)

    def magnetization(self, v: int) -> float:
        return self.expectation(self.states[:, v])

    def marginals(self) -> NDArray[np.float64]:
        return self.probabilities @ (self.states == 1)

    def condition(self, mask: NDArray[np.bool_]) -> GibbsTable:
        mask = np.asarray(mask, dtype=bool)
        mass = self.probabilities[mask].sum()
        if mass <= 0:
            msg = "Cannot condition on an event of probability zero"
            raise ValueError(msg)
        return GibbsTable(self.region, self.states[mask], self.probabilities[mask] / mass)

    def clamp(self, v: int, spin: int) -> GibbsTable:
        return self.condition(self.states[:, v] == spin)


def brute_force_gibbs(
    params: ModelParams,
    shape: TreeShape,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
) -> GibbsTable:
    """Enumerate every configuration of the free component and normalize the Gibbs weights."""
    region = ising_region(shape, env, boundary)
    n_active = region.n_active
    if n_active > MAX_BRUTE_FORCE_SPINS:
        msg = f"Exhaustive enumeration supports at most {MAX_BRUTE_FORCE_SPINS} free vertices, got {n_active}"
        raise ValueError(msg)

    interior = np.zeros((2**n_active, shape.n_vertices), dtype=np.int8)
    interior[:, region.active] = enumerate_configurations(n_active)
    states = region.fill(interior)
    log_weights = ising_log_weights(params, states, region)
    probabilities = np.exp(log_weights - logsumexp(log_weights))
    return GibbsTable(region, states, probabilities)
