from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.linalg import eigh

from ..config import DENSE_EIGEN_LIMIT
from ..gibbs import ModelParams, descendant_weights, r_recursion
from ..tree import Boundary, ObstacleEnv, TreeShape, descendants_at_depth, subtree_vertices
from .gap import gap_of, lanczos_gap, spectral_gap_exact
from .generator import GeneratorMatrix, build_ising_generator
from .state_space import StateSpace

logger = lg.getLogger(__name__)


@dataclass
class BlockGapResult:
    """Gaps entering ``gap >= min_block_gap * block_gap / ell1``."""

    ell1: int
    block_gap: float
    min_block_gap: float
    single_site_gap: float

    @property
    def bound(self) -> float:
        return self.min_block_gap * self.block_gap / self.ell1

    @property
    def holds(self) -> bool:
        return self.single_site_gap >= self.bound - 1e-9


@dataclass
class VMCheck:
    """Exact variances of the conditional spin given the descendants ``ell1`` levels below."""

    ell1: int
    vertices: NDArray[np.int64]
    conditional_variances: NDArray[np.float64]
    variances: NDArray[np.float64]
    weight_bounds: NDArray[np.float64]
    r: float | None = None

    @property
    def ratios(self) -> NDArray[np.float64]:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = self.conditional_variances / self.variances
        return np.where(self.variances > 0, ratios, 0.0)

    @property
    def worst_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def worst_vertex(self) -> int:
        return int(self.vertices[np.argmax(self.ratios)])

    @property
    def satisfied(self) -> bool | None:
        if self.r is None:
            return None
        return self.worst_ratio <= self.r**self.ell1

    @property
    def weight_bound_holds(self) -> bool:
        return bool(np.all(self.conditional_variances <= self.weight_bounds + 1e-12))


def _position_mask(space: StateSpace, vertices: NDArray[np.int64]) -> np.int64:
    """Bitmask of the active positions among ``vertices``."""
    positions = np.flatnonzero(np.isin(space.vertices, vertices))
    return np.int64(np.sum(np.int64(1) << positions.astype(np.int64))) if positions.size else np.int64(0)


def _group_labels(codes: NDArray[np.int64], mask: np.int64) -> NDArray[np.int64]:
    _, labels = np.unique(codes & mask, return_inverse=True)
    return labels.ravel()


def _block(space: StateSpace, x: int, ell1: int) -> NDArray[np.int64]:
    return subtree_vertices(space.region.shape, x, ell1)


def _block_outside_labels(space: StateSpace, ell1: int) -> list[NDArray[np.int64]]:
    """For every active vertex, the label of each state's configuration outside its block."""
    full = np.int64((1 << space.n_active) - 1)
    return [
        _group_labels(space.codes, full & ~_position_mask(space, _block(space, x, ell1)))
        for x in space.vertices
    ]


def _conditional_mean(labels: NDArray[np.int64], mu: NDArray, values: NDArray) -> NDArray[np.float64]:
    mass = np.bincount(labels, weights=mu)
    return (np.bincount(labels, weights=mu * values) / mass)[labels]


def _block_chain_gap(generator: GeneratorMatrix, all_labels: list[NDArray[np.int64]]) -> float:
    mu = generator.mu
    size = len(mu)
    root = np.sqrt(mu)
    if size <= DENSE_EIGEN_LIMIT:
        # K = sum_x (I - P_x); in L^2(mu) coordinates P_x projects onto sqrt(mu) within each group
        matrix = np.zeros((size, size))
        for labels in all_labels:
            mass = np.bincount(labels, weights=mu)
            same = labels[:, None] == labels[None, :]
            projector = np.where(same, np.outer(root, root) / mass[labels][:, None], 0.0)
            matrix += np.eye(size) - projector
        eigenvalues = eigh(matrix, eigvals_only=True)
        return float(eigenvalues[1])

    def apply(y: NDArray) -> NDArray:
        f = y / root
        total = np.zeros(size)
        for labels in all_labels:
            total += y - root * _conditional_mean(labels, mu, f)
        return total

    return lanczos_gap(apply, size, root, float(len(all_labels)) + 1.0)


def _outer_neighbours(space: StateSpace, x: int, ell1: int) -> NDArray[np.int64]:
    shape = space.region.shape
    below = descendants_at_depth(shape, x, ell1)
    return below if x == 0 else np.append(below, shape.parent(x))


def _min_block_gap(generator: GeneratorMatrix, all_labels: list[NDArray[np.int64]], ell1: int) -> float:
    space = generator.space
    gaps = []
    for x, labels in zip(space.vertices, all_labels):
        # blocks with equal outer-neighbour values carry the same conditional law
        outer = _group_labels(space.codes, _position_mask(space, _outer_neighbours(space, int(x), ell1)))
        _, representatives = np.unique(outer, return_index=True)
        for group in np.unique(labels[representatives]):
            members = np.flatnonzero(labels == group)
            if len(members) < 2:
                continue
            sub = generator.rates[members][:, members].tolil()
            sub.setdiag(0.0)
            sub = sub.tocsr()
            exit_rates = np.asarray(sub.sum(axis=1)).ravel()
            sub = sub - sp.diags(exit_rates)
            local_mu = generator.mu[members] / generator.mu[members].sum()
            gaps.append(gap_of(sub, local_mu))
    if not gaps:
        return math.inf
    return float(min(gaps))


def block_dynamics_gap(generator: GeneratorMatrix, ell1: int) -> BlockGapResult:
    """Gap of the chain resampling every block of ``ell1`` levels from its conditional Gibbs law.

    Every active vertex roots one block, cut at the bottom of the region. The block
    generator is ``sum_x (I - P_x)`` with ``P_x`` the conditional expectation given the
    configuration outside the block. Alongside it come the smallest heat-bath gap inside a
    block over all block boundary conditions and the single-site gap of the whole region.
    """
    if ell1 < 1:
        msg = f"Blocks need at least one level, got ell1 = {ell1}"
        raise ValueError(msg)
    all_labels = _block_outside_labels(generator.space, ell1)
    result = BlockGapResult(
        ell1=ell1,
        block_gap=_block_chain_gap(generator, all_labels),
        min_block_gap=_min_block_gap(generator, all_labels, ell1),
        single_site_gap=spectral_gap_exact(generator),
    )
    logger.info(
        f"Block dynamics with ell1={ell1}: block gap {result.block_gap:.6g}, "
        f"min block gap {result.min_block_gap:.6g}, single-site gap {result.single_site_gap:.6g}"
    )
    if not result.holds:
        logger.warning(f"Block bound {result.bound:.6g} exceeds the single-site gap {result.single_site_gap:.6g}")
    return result


def min_block_gap(generator: GeneratorMatrix, ell1: int) -> float:
    return _min_block_gap(generator, _block_outside_labels(generator.space, ell1), ell1)


def vm_mixing_check(
    params: ModelParams,
    shape: TreeShape,
    ell1: int,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
    r: float | None = None,
) -> VMCheck:
    """Compare ``Var(E[sigma_x | sigma_D])`` with ``Var(sigma_x)`` at every free vertex ``x``.

    ``D`` holds the free descendants of ``x`` exactly ``ell1`` levels below. The weight bound
    ``tanh(beta)^ell1 * sum_y W(x -> y)`` over ``y`` in ``D`` always dominates the left side.
    """
    if ell1 < 1:
        msg = f"The variance-mixing distance must be at least 1, got ell1 = {ell1}"
        raise ValueError(msg)
    generator = build_ising_generator(params, shape, env, boundary)
    space = generator.space
    mu = generator.mu
    field = r_recursion(params, shape, env, boundary)
    damping = math.tanh(params.beta) ** ell1

    conditional, variances, bounds = [], [], []
    for x in space.vertices:
        spins = generator.observable(int(x))
        mean = float(np.dot(mu, spins))
        variances.append(float(np.dot(mu, spins**2)) - mean**2)
        below = descendants_at_depth(shape, int(x), ell1)
        labels = _group_labels(space.codes, _position_mask(space, below))
        smoothed = _conditional_mean(labels, mu, spins)
        conditional.append(max(float(np.dot(mu, smoothed**2)) - mean**2, 0.0))
        bounds.append(damping * float(descendant_weights(field, int(x), ell1).sum()))

    check = VMCheck(
        ell1=ell1,
        vertices=space.vertices.copy(),
        conditional_variances=np.array(conditional),
        variances=np.array(variances),
        weight_bounds=np.array(bounds),
        r=r,
    )
    logger.info(f"Worst variance ratio {check.worst_ratio:.4g} at vertex {check.worst_vertex} for ell1={ell1}")
    return check
