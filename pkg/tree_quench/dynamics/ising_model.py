from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from ..gibbs import ModelParams, ising_log_weights
from ..tree import Boundary, ObstacleEnv, Region, TreeShape, ising_region
from .kernels import ISING_KIND
from .spin_model import SpinModel


class IsingModel(SpinModel):
    kind = ISING_KIND
    low = -1
    high = 1

    def __init__(self, params: ModelParams) -> None:
        self.params = params

    @property
    def b(self) -> int:
        return self.params.b

    def region(
        self,
        shape: TreeShape,
        boundary: Boundary | None = None,
        depth: int | None = None,
        env: ObstacleEnv | None = None,
    ) -> Region:
        return ising_region(shape, env, boundary, depth)

    def upper_probabilities(self, states: NDArray, region: Region, vertex: int) -> NDArray[np.float64]:
        local = self.neighbour_values(states, region, vertex).sum(axis=1)
        return expit(2.0 * self.params.beta * (self.params.h + local))

    def log_weights(self, states: NDArray, region: Region) -> NDArray[np.float64]:
        return ising_log_weights(self.params, states, region)

    def kernel_parameters(self) -> tuple[float, float, float]:
        return self.params.beta, self.params.h, 0.0

    def __repr__(self) -> str:
        return f"IsingModel(beta={self.params.beta}, h={self.params.h}, b={self.params.b})"
