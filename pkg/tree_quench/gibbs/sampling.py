from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from ..tree import Boundary, ObstacleEnv, TreeShape
from ..utils import SeedLike, as_generator
from .model_params import ModelParams
from .recursion import r_recursion


def sample_gibbs(
    params: ModelParams,
    shape: TreeShape,
    seed: SeedLike,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
    size: int = 1,
) -> NDArray[np.int8]:
    """Exact samples of the finite-volume Gibbs measure, one row per sample.

    The root is drawn from its marginal and every child from
    ``P(sigma_c = +1 | sigma_parent = s) = 1 / (1 + eps^s R_c)``.
    """
    rng = as_generator(seed)
    log_ratios = r_recursion(params, shape, env, boundary).log_ratios
    states = np.empty((size, shape.n_vertices), dtype=np.int8)

    plus = rng.random(size) < expit(-log_ratios[0])
    states[:, 0] = np.where(plus, 1, -1)
    for k in range(1, shape.depth + 1):
        vertices = shape.level_vertices(k)
        parent_spins = states[:, (vertices - 1) // shape.b].astype(np.float64)
        with np.errstate(invalid="ignore"):
            probabilities = expit(-(log_ratios[vertices] + parent_spins * params.log_eps))
        probabilities = np.nan_to_num(probabilities, nan=0.0)
        plus = rng.random((size, len(vertices))) < probabilities
        states[:, vertices] = np.where(plus, 1, -1)
    return states
