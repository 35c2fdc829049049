from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from ..config import FIXED_POINT_MAX_ITERATIONS, FIXED_POINT_TOLERANCE, MAX_BRUTE_FORCE_SPINS, MAX_RECURSION_VERTICES
from ..gibbs import GibbsTable, enumerate_configurations
from ..tree import Boundary, Free, TreeShape
from .hard_core_model import HardCoreModel
from .hc_params import HCParams

logger = lg.getLogger(__name__)


@dataclass
class HCRatioField:
    """Occupation ratios ``R_v = P(occupied) / P(vacant)`` of every subtree with its parent vacant."""

    params: HCParams
    shape: TreeShape
    ratios: NDArray[np.float64]
    boundary: Boundary

    @property
    def root(self) -> float:
        return float(self.ratios[0])

    def root_occupation(self) -> float:
        return occupation_from_ratio(self.ratios[0])


def occupation_from_ratio(ratio: float | NDArray) -> float | NDArray:
    ratio = np.asarray(ratio, dtype=np.float64)
    value = ratio / (1.0 + ratio)
    return value if value.ndim else float(value)


def hc_lambda_c(b: int) -> float:
    return b**b / (b - 1) ** (b + 1)


def hc_r_recursion(params: HCParams, shape: TreeShape, boundary: Boundary | None = None) -> HCRatioField:
    """Leaf-to-root sweep of ``R_z = lam prod_i 1 / (1 + R_{z_i})``; an occupied boundary child zeroes its parent."""
    if params.b != shape.b:
        msg = f"Model branching {params.b} does not match tree branching {shape.b}"
        raise ValueError(msg)
    if shape.n_vertices > MAX_RECURSION_VERTICES:
        msg = f"Tree with {shape.n_vertices} vertices exceeds the recursion limit of {MAX_RECURSION_VERTICES}"
        raise ValueError(msg)
    boundary = boundary or Free()
    b = shape.b

    ratios = np.empty(shape.n_vertices)
    occupied_below = boundary.occupations(b, shape.depth + 1).reshape(-1, b).any(axis=1)
    leaves = shape.level_vertices(shape.depth)
    ratios[leaves] = np.where(occupied_below, 0.0, params.lam)
    for k in range(shape.depth - 1, -1, -1):
        vertices = shape.level_vertices(k)
        children = ratios[shape.level_vertices(k + 1)].reshape(-1, b)
        ratios[vertices] = params.lam / np.prod(1.0 + children, axis=1)
    return HCRatioField(params, shape, ratios, boundary)


def hc_full_ratios(field: HCRatioField) -> NDArray[np.float64]:
    """Ratios of the full single-site marginals, with the cavity from above folded in."""
    shape = field.shape
    full = field.ratios.copy()
    for k in range(1, shape.depth + 1):
        children = shape.level_vertices(k)
        parents = (children - 1) // shape.b
        own = field.ratios[children]
        cavity = full[parents] * (1.0 + own)
        full[children] = own / (1.0 + cavity)
    return full


def hc_single_site_marginals(params: HCParams, shape: TreeShape, boundary: Boundary | None = None) -> NDArray[np.float64]:
    return occupation_from_ratio(hc_full_ratios(hc_r_recursion(params, shape, boundary)))


def _ratio_map(params: HCParams, ratio: float) -> float:
    if ratio == math.inf:
        return 0.0
    return params.lam / (1.0 + ratio) ** params.b


def _two_step_fixed_point(params: HCParams, start: float) -> float:
    x = start
    for _ in range(FIXED_POINT_MAX_ITERATIONS):
        updated = _ratio_map(params, _ratio_map(params, x))
        if abs(updated - x) < FIXED_POINT_TOLERANCE * max(1.0, updated):
            return updated
        x = updated
    logger.warning(f"Two-step hard-core iteration from {start} did not converge (lam={params.lam}, b={params.b})")
    return x


def hc_fixed_point_ratios(params: HCParams) -> tuple[float, float]:
    """Even-level and odd-level ratios ``(R_e, R_o)`` of the even phase."""
    even = _two_step_fixed_point(params, math.inf)
    return even, _ratio_map(params, even)


def _boundary_root_ratio(params: HCParams, parity: int, depth: int | None) -> float:
    if depth is None:
        start = math.inf if parity == 0 else 0.0
        return _two_step_fixed_point(params, start)
    if depth < 0:
        msg = f"Depth must be non-negative, got: {depth}"
        raise ValueError(msg)
    ratio = math.inf if (depth + 1) % 2 == parity else 0.0
    for _ in range(depth + 1):
        ratio = _ratio_map(params, ratio)
    return ratio


def hc_mu_even_root(params: HCParams, depth: int | None = None) -> float:
    """Root occupation under the even boundary below ``depth``; ``None`` gives the even phase."""
    return occupation_from_ratio(_boundary_root_ratio(params, 0, depth))


def hc_mu_odd_root(params: HCParams, depth: int | None = None) -> float:
    return occupation_from_ratio(_boundary_root_ratio(params, 1, depth))


def hc_brute_force_gibbs(params: HCParams, shape: TreeShape, boundary: Boundary | None = None) -> GibbsTable:
    """Exact hard-core measure over the legal configurations of ``shape``."""
    model = HardCoreModel(params)
    region = model.region(shape, boundary)
    n_active = region.n_active
    if n_active > MAX_BRUTE_FORCE_SPINS:
        msg = f"Exhaustive enumeration supports at most {MAX_BRUTE_FORCE_SPINS} vertices, got {n_active}"
        raise ValueError(msg)

    interior = np.zeros((2**n_active, shape.n_vertices), dtype=np.int8)
    interior[:, region.active] = (enumerate_configurations(n_active) + 1) // 2
    states = region.fill(interior)
    states = states[model.is_legal(states, region)]
    log_weights = model.log_weights(states, region)
    probabilities = np.exp(log_weights - logsumexp(log_weights))
    return GibbsTable(region, states, probabilities)
