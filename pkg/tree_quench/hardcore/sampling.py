from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..gibbs import enumerate_configurations
from ..tree import Boundary, Free, TreeShape
from ..utils import SeedLike, as_generator
from .hard_core_model import HCConfig
from .hc_params import HCParams
from .recursion import hc_brute_force_gibbs, hc_fixed_point_ratios, hc_r_recursion


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        msg = f"Probability must lie in [0, 1], got: {p}"
        raise ValueError(msg)


def _qualifying_odd_sites(shape: TreeShape, values: NDArray[np.int8], occupied_below: NDArray[np.bool_]) -> NDArray[np.bool_]:
    """Odd sites whose neighbours are all vacant; by bipartiteness these are the odd sites at distance >= 3."""
    odd = shape.levels % 2 == 1
    blocked = np.zeros(shape.n_vertices, dtype=bool)
    blocked[1:] = values[shape.parents[1:]] == 1
    inner = shape.n_vertices - shape.n_leaves
    has_occupied_child = np.zeros(shape.n_vertices, dtype=bool)
    has_occupied_child[:inner] = values[1:].reshape(-1, shape.b).any(axis=1)
    has_occupied_child[inner:] = occupied_below.reshape(-1, shape.b).any(axis=1)
    return odd & ~blocked & ~has_occupied_child


def _boundary_below(shape: TreeShape, boundary: Boundary, p: float, rng: np.random.Generator) -> NDArray[np.bool_]:
    level = shape.depth + 1
    if isinstance(boundary, Free):
        # the level below stands in for the rest of the infinite tree
        if level % 2 == 0:
            return rng.random(shape.b**level) < p
        return np.zeros(shape.b**level, dtype=bool)
    return boundary.occupations(shape.b, level) == 1


def hc_sample_nu(params: HCParams, p: float, shape: TreeShape, seed: SeedLike, boundary: Boundary | None = None) -> HCConfig:
    """Even sites occupied with probability ``p``, then every odd site with all neighbours vacant with ``p_lambda``.

    Even leaves next to an occupied boundary vertex stay vacant.
    """
    _check_probability(p)
    rng = as_generator(seed)
    boundary = boundary or Free()
    even = shape.levels % 2 == 0

    values = (even & (rng.random(shape.n_vertices) < p)).astype(np.int8)
    below = _boundary_below(shape, boundary, p, rng)
    leaves = shape.level_vertices(shape.depth)
    if shape.depth % 2 == 0:
        values[leaves[below.reshape(-1, shape.b).any(axis=1)]] = 0

    qualifying = _qualifying_odd_sites(shape, values, below)
    values[qualifying & (rng.random(shape.n_vertices) < params.p_lambda)] = 1
    return HCConfig(shape, values, boundary)


def hc_sample_gibbs(
    params: HCParams,
    shape: TreeShape,
    seed: SeedLike,
    boundary: Boundary | None = None,
    size: int = 1,
) -> NDArray[np.int8]:
    """Exact top-down samples; a child of a vacant parent is occupied with probability ``R_c / (1 + R_c)``."""
    rng = as_generator(seed)
    ratios = hc_r_recursion(params, shape, boundary).ratios
    occupy = ratios / (1.0 + ratios)
    states = np.zeros((size, shape.n_vertices), dtype=np.int8)
    states[:, 0] = rng.random(size) < occupy[0]
    for k in range(1, shape.depth + 1):
        vertices = shape.level_vertices(k)
        parent_vacant = states[:, (vertices - 1) // shape.b] == 0
        states[:, vertices] = parent_vacant & (rng.random((size, len(vertices))) < occupy[vertices])
    return states


@dataclass
class DominationCheck:
    """Smallest gap ``E_nu[f] - E_mu[f]`` over the monotone catalog."""

    p: float
    depth: int
    worst_gap: float
    n_functions: int
    tolerance: float = 1e-12

    @property
    def holds(self) -> bool:
        return self.worst_gap >= -self.tolerance


def _oriented_indicators(shape: TreeShape, occupations: NDArray) -> NDArray[np.float64]:
    even = shape.levels % 2 == 0
    return np.where(even, occupations, 1.0 - occupations)


def _catalog_expectations(shape: TreeShape, weights: NDArray, indicators: NDArray) -> NDArray[np.float64]:
    """Single-site expectations followed by every pairwise product, ``i < j``."""
    singles = weights @ indicators
    n = shape.n_vertices
    rows, cols = np.triu_indices(n, k=1)
    pairs = weights @ (indicators[:, rows] * indicators[:, cols])
    return np.concatenate([singles, pairs])


def _nu_law_expectations(params: HCParams, p: float, shape: TreeShape) -> NDArray[np.float64]:
    """Exact catalog expectations under ``nu``: enumerate even sites, odd sites are then independent."""
    b = shape.b
    even_sites = np.flatnonzero(shape.levels % 2 == 0)
    n_below = b ** (shape.depth + 1) if (shape.depth + 1) % 2 == 0 else 0
    n_even = len(even_sites) + n_below
    patterns = (enumerate_configurations(n_even) + 1) // 2
    occupied = patterns.sum(axis=1)
    weights = p**occupied * (1.0 - p) ** (n_even - occupied)

    indicators = np.empty((len(patterns), shape.n_vertices))
    for i, pattern in enumerate(patterns):
        values = np.zeros(shape.n_vertices, dtype=np.int8)
        values[even_sites] = pattern[: len(even_sites)]
        below = pattern[len(even_sites):].astype(bool) if n_below else np.zeros(b ** (shape.depth + 1), dtype=bool)
        odd_occupation = np.where(_qualifying_odd_sites(shape, values, below), params.p_lambda, 0.0)
        occupation = np.where(shape.levels % 2 == 0, values, odd_occupation)
        indicators[i] = _oriented_indicators(shape, occupation)
    return _catalog_expectations(shape, weights, indicators)


def _even_phase_table(params: HCParams, shape: TreeShape) -> tuple[NDArray[np.int8], NDArray[np.float64]]:
    """Even phase restricted to ``shape``: every occupied leaf pays ``(1 + R)^-b`` for the infinite subtrees below."""
    even_ratio, odd_ratio = hc_fixed_point_ratios(params)
    below_ratio = even_ratio if (shape.depth + 1) % 2 == 0 else odd_ratio
    table = hc_brute_force_gibbs(params, shape)
    leaves = shape.level_vertices(shape.depth)
    leaf_occupied = table.states[:, leaves].sum(axis=1)
    weights = table.probabilities * (1.0 + below_ratio) ** (-shape.b * leaf_occupied)
    return table.states, weights / weights.sum()


def hc_domination_check(params: HCParams, p: float, depth: int) -> DominationCheck:
    """Compare the exact ``nu_{p,lam}`` and even-phase laws on the top ``depth`` levels.

    The catalog holds the parity-oriented single-site indicators and their pairwise products,
    all increasing for the bipartite order.
    """
    _check_probability(p)
    shape = TreeShape(params.b, depth)
    nu = _nu_law_expectations(params, p, shape)
    states, weights = _even_phase_table(params, shape)
    mu = _catalog_expectations(shape, weights, _oriented_indicators(shape, states.astype(np.float64)))
    return DominationCheck(p, depth, float(np.min(nu - mu)), len(nu))
