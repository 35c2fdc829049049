from __future__ import annotations

import numpy as np

from ..utils import SeedLike, as_generator
from .boundary import Boundary, Free
from .configuration import SpinConfig
from .obstacle_env import ObstacleEnv
from .tree_shape import TreeShape


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        msg = f"Probability must lie in [0, 1], got: {p}"
        raise ValueError(msg)


def sample_bernoulli_spins(shape: TreeShape, p: float, seed: SeedLike, boundary: Boundary | None = None) -> SpinConfig:
    """I.i.d. spins with P(+1) = p."""
    _check_probability(p)
    rng = as_generator(seed)
    plus = rng.random(shape.n_vertices) < p
    return SpinConfig(shape, np.where(plus, 1, -1).astype(np.int8), boundary or Free())


def sample_obstacles_iid(shape: TreeShape, p: float, seed: SeedLike, free_root: bool = False) -> ObstacleEnv:
    """Every vertex free with probability p, independently; ``free_root`` conditions on a free root."""
    _check_probability(p)
    rng = as_generator(seed)
    free = rng.random(shape.n_vertices) < p
    if free_root:
        free[0] = True
    return ObstacleEnv(shape, free)


def obstacles_from_quench(eta: SpinConfig, cut_level: int) -> ObstacleEnv:
    """Vertices down to ``cut_level`` are free, deeper ones are free exactly where eta is +1."""
    shape = eta.shape
    if cut_level > shape.depth:
        msg = f"Cut level {cut_level} exceeds the depth {shape.depth} of the configuration"
        raise ValueError(msg)
    free = (shape.levels <= cut_level) | (eta.values == 1)
    return ObstacleEnv(shape, free)


def galton_watson_reach_probability(p: float, b: int, generations: int) -> float:
    """Probability that a Binomial(b, p) branching process is still alive after ``generations``."""
    _check_probability(p)
    alive = 1.0
    for _ in range(generations):
        alive = 1.0 - (1.0 - p * alive) ** b
    return alive


def galton_watson_survival(p: float, b: int, tolerance: float = 1e-14, max_iterations: int = 100_000) -> float:
    """Survival probability, one minus the smallest root of q = (1 - p + p q)^b."""
    _check_probability(p)
    q = 0.0
    for _ in range(max_iterations):
        updated = (1.0 - p + p * q) ** b
        if abs(updated - q) < tolerance:
            q = updated
            break
        q = updated
    return 1.0 - q
