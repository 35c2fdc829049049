from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit

from ..config import MAX_RECURSION_VERTICES
from ..tree import Boundary, Free, ObstacleEnv, TreeShape, descendants_at_depth, path_to_descendant
from .coupling import k_from_log, log_f_beta
from .model_params import ModelParams


@dataclass
class RatioField:
    """Log-ratios ``log R_v`` of every vertex, computed from the subtree below it.

    Vertices outside the free component of the root carry ``+inf`` (spin forced to -1).
    """

    params: ModelParams
    shape: TreeShape
    log_ratios: NDArray[np.float64]
    env: ObstacleEnv | None
    boundary: Boundary

    @property
    def root(self) -> float:
        return float(self.log_ratios[0])

    def ratios(self) -> NDArray[np.float64]:
        with np.errstate(over="ignore"):
            return np.exp(self.log_ratios)

    def root_plus_probability(self) -> float:
        return float(expit(-self.log_ratios[0]))

    def root_magnetization(self) -> float:
        return magnetization_from_log_ratio(self.log_ratios[0])

    def coupling(self, vertices: NDArray[np.int64] | None = None) -> NDArray[np.float64]:
        """K_beta(R_v) for the given vertices (all of them by default)."""
        values = self.log_ratios if vertices is None else self.log_ratios[vertices]
        return np.asarray(k_from_log(self.params, values), dtype=np.float64)


def magnetization_from_log_ratio(log_ratio: float | NDArray) -> float | NDArray:
    """(1 - R) / (1 + R) for R = exp(log_ratio)."""
    value = np.tanh(-np.asarray(log_ratio, dtype=np.float64) / 2.0)
    return value if value.ndim else float(value)


def _check_size(shape: TreeShape) -> None:
    if shape.n_vertices > MAX_RECURSION_VERTICES:
        msg = f"Tree with {shape.n_vertices} vertices exceeds the recursion limit of {MAX_RECURSION_VERTICES}"
        raise ValueError(msg)


def _in_component(shape: TreeShape, env: ObstacleEnv | None) -> NDArray[np.bool_]:
    if env is None:
        return np.ones(shape.n_vertices, dtype=bool)
    if env.shape != shape:
        msg = f"Obstacle environment lives on {env.shape}, recursion on {shape}"
        raise ValueError(msg)
    return env.component


def r_recursion(
    params: ModelParams,
    shape: TreeShape,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
) -> RatioField:
    """Leaf-to-root sweep of ``R_z = eps^h prod_k F_beta(R_{z_k})``.

    A boundary child with spin +1 contributes F(0) = eps, one with spin -1 contributes
    F(inf) = 1/eps, and an absent (free) child contributes nothing.
    """
    if params.b != shape.b:
        msg = f"Model branching {params.b} does not match tree branching {shape.b}"
        raise ValueError(msg)
    _check_size(shape)
    boundary = boundary or Free()
    inside = _in_component(shape, env)
    b = shape.b

    log_ratios = np.full(shape.n_vertices, np.inf)
    below = boundary.spins(b, shape.depth + 1).astype(np.float64) * params.log_eps
    for k in range(shape.depth, -1, -1):
        vertices = shape.level_vertices(k)
        incoming = below.reshape(-1, b).sum(axis=1)
        values = params.log_field + incoming
        log_ratios[vertices] = np.where(inside[vertices], values, np.inf)
        below = np.asarray(log_f_beta(params, log_ratios[vertices]))
    return RatioField(params, shape, log_ratios, env, boundary)


def full_log_ratios(field: RatioField) -> NDArray[np.float64]:
    """Log-ratios of the full marginals: cavity contributions from above added to every vertex."""
    params, shape = field.params, field.shape
    full = field.log_ratios.copy()
    for k in range(1, shape.depth + 1):
        children = shape.level_vertices(k)
        parents = (children - 1) // shape.b
        own = field.log_ratios[children]
        finite = np.isfinite(own) & np.isfinite(full[parents])
        cavity = full[parents[finite]] - np.asarray(log_f_beta(params, own[finite]))
        full[children[finite]] = own[finite] + np.asarray(log_f_beta(params, cavity))
    return full


def single_site_marginals(
    params: ModelParams,
    shape: TreeShape,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
) -> NDArray[np.float64]:
    """P(sigma_v = +1) for every vertex."""
    field = r_recursion(params, shape, env, boundary)
    return expit(-full_log_ratios(field))


def path_weight(field: RatioField, path: list[int] | NDArray[np.int64]) -> float:
    """W(Gamma) = prod of K_beta(R_z) along the path; 0 through any frozen vertex."""
    path = np.asarray(path, dtype=np.int64)
    if path.size == 0:
        return 1.0
    return float(np.prod(field.coupling(path)))


def root_path_weight(field: RatioField, y: int, x: int) -> float:
    return path_weight(field, path_to_descendant(field.shape, y, x))


def descendant_weights(field: RatioField, y: int, k: int) -> NDArray[np.float64]:
    """W(Gamma_{y,x}) for every descendant x of y at distance k, in breadth-first order."""
    shape = field.shape
    weights = np.ones(1)
    for j in range(1, k + 1):
        block = descendants_at_depth(shape, y, j)
        if block.size == 0:
            return np.empty(0)
        weights = np.repeat(weights, shape.b) * field.coupling(block)
    return weights


def descendant_weight_sum(field: RatioField, y: int, k: int) -> float:
    return float(descendant_weights(field, y, k).sum())
