from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .boundary import Boundary, Free
from .obstacle_env import ObstacleEnv
from .tree_shape import TreeShape


@dataclass(eq=False)
class SpinConfig:
    """Ising configuration on every vertex of ``shape``; obstacles always read as -1."""

    shape: TreeShape
    values: NDArray[np.int8]
    boundary: Boundary = field(default_factory=Free)
    env: ObstacleEnv | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.int8)
        if values.shape != (self.shape.n_vertices,):
            msg = f"Expected {self.shape.n_vertices} spins, got array of shape {values.shape}"
            raise ValueError(msg)
        if not np.all(np.abs(values) == 1):
            msg = "Spins must all be +1 or -1"
            raise ValueError(msg)
        if self.env is not None:
            if self.env.shape != self.shape:
                msg = f"Obstacle environment lives on {self.env.shape}, configuration on {self.shape}"
                raise ValueError(msg)
            values[self.env.obstacles] = -1
        values.setflags(write=False)
        self.values = values

    @classmethod
    def constant(cls, shape: TreeShape, spin: int, boundary: Boundary | None = None, env: ObstacleEnv | None = None) -> SpinConfig:
        return cls(shape, np.full(shape.n_vertices, spin, dtype=np.int8), boundary or Free(), env)

    def leq(self, other: SpinConfig) -> bool:
        if self.shape != other.shape:
            msg = f"Cannot compare configurations on {self.shape} and {other.shape}"
            raise ValueError(msg)
        return bool(np.all(self.values <= other.values))

    def magnetization(self) -> float:
        return float(self.values.mean())
