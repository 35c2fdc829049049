from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray

from ..config import ENVIRONMENT_STREAM
from ..tree import Plus, TreeShape, sample_obstacles_iid
from ..utils import Estimate, estimate_mean, replica_generator, run_replicas
from .model_params import ModelParams
from .recursion import r_recursion

logger = lg.getLogger(__name__)

ROUNDING_GRID = 2**256


@dataclass
class TailEstimate:
    """Upper bound ``value`` on the probability that the depth-``level`` ratio exceeds the ``k``-th threshold."""

    level: int
    k: int
    value: float


@dataclass
class TailBound:
    a: float
    p: float
    k0: int
    c1: float
    c2: float
    estimates: list[TailEstimate]
    hierarchy: NDArray[np.float64] = field(repr=False)
    fixed_point: float | None
    diverged: bool

    @property
    def supremum(self) -> float:
        return max(e.value for e in self.estimates)

    @property
    def values(self) -> NDArray[np.float64]:
        return np.array([e.value for e in self.estimates])

    def hierarchy_estimates(self) -> list[TailEstimate]:
        return [
            TailEstimate(level + 1, k, float(self.hierarchy[k, level]))
            for k in range(self.hierarchy.shape[0])
            for level in range(self.hierarchy.shape[1])
        ]


def _tail_constants(a: float, p: float, b: int) -> tuple[int, int]:
    if b != 2:
        msg = f"The analytic tail recursion is only available for b=2, got b={b}; use r_tail_monte_carlo instead"
        raise ValueError(msg)
    if not a > 0:
        msg = f"Field margin must be positive, got: {a}"
        raise ValueError(msg)
    if not 0 < p < 1:
        msg = f"Free-site probability must lie in (0, 1), got: {p}"
        raise ValueError(msg)
    k0 = max(math.floor(4 / a - 1), 0)
    return k0, 2 ** (k0 + 1)


def r_tail_bound_recursion(a: float, p: float, b: int = 2, max_level: int = 64) -> TailBound:
    """Collapsed bound ``q_l = min(1, c1 + c2 q_{l-1}^2)`` from ``q_1 = 2(1-p)``, with the k-indexed hierarchy.

    ``c2 = 2^(k0+1)``, ``c1 = 2 c2 (1-p)`` and ``k0 = floor(4/a - 1)``.
    """
    k0, c2 = _tail_constants(a, p, b)
    if max_level < 1:
        msg = f"Need at least one level, got: {max_level}"
        raise ValueError(msg)
    base = 2.0 * (1.0 - p)
    c1 = c2 * base

    values = [base]
    diverged = False
    for _ in range(1, max_level):
        updated = c1 + c2 * values[-1] ** 2
        diverged |= updated > 1.0
        values.append(min(1.0, updated))

    disc = 1.0 - 4.0 * c1 * c2
    fixed_point = (1.0 - math.sqrt(disc)) / (2.0 * c2) if disc >= 0 else None
    diverged |= disc < 0

    # row k holds q^(k)_l for l = 1..max_level; q^(k0+1) vanishes
    hierarchy = np.zeros((k0 + 2, max_level))
    hierarchy[: k0 + 1, 0] = base
    for level in range(1, max_level):
        previous = hierarchy[:, level - 1]
        hierarchy[: k0 + 1, level] = np.minimum(1.0, base + previous[0] ** 2 + 2.0 * previous[1:])
    if diverged:
        logger.warning(f"Tail recursion is vacuous for a={a}, p={p}: the bound reaches 1")

    estimates = [TailEstimate(level + 1, 0, value) for level, value in enumerate(values)]
    return TailBound(a, p, k0, c1, float(c2), estimates, hierarchy[: k0 + 1], fixed_point, diverged)


def _round_up(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * ROUNDING_GRID), ROUNDING_GRID)


def bound_stays_below_fixed_point(a: float, p: float, max_level: int = 64) -> bool:
    """Exact check that every iterate of the collapsed recursion stays below its stable fixed point.

    Iterates are rational and rounded up to a dyadic grid, so the check holds for the true sequence.
    ``x`` lies below the smaller root of ``c2 x^2 - x + c1`` iff ``x < 1/(2 c2)`` and the quadratic is positive.
    """
    k0, c2 = _tail_constants(a, p, 2)
    base = 2 * (1 - Fraction(p))
    c1 = c2 * base
    if 1 - 4 * c1 * c2 < 0:
        return False

    def below(x: Fraction) -> bool:
        return x < Fraction(1, 2 * c2) and c2 * x * x - x + c1 > 0

    x = base
    for _ in range(max_level):
        if not below(x):
            return False
        x = _round_up(c1 + c2 * x * x)
    return True


def r_tail_monte_carlo(
    params: ModelParams,
    p: float,
    level: int,
    n_samples: int,
    seed: int,
    workers: int | None = None,
    verbose: bool = False,
) -> Estimate:
    """Fraction of environments (root forced free, plus boundary below ``level``) with R >= eps."""
    if n_samples <= 0:
        msg = "Cannot estimate a tail probability from an empty sample"
        raise ValueError(msg)
    shape = TreeShape(params.b, level)

    def exceeds(i: int) -> float:
        env = sample_obstacles_iid(shape, p, replica_generator(seed, i, ENVIRONMENT_STREAM), free_root=True)
        return float(r_recursion(params, shape, env, Plus()).root >= params.log_eps)

    values = run_replicas(exceeds, n_samples, workers, verbose, desc="Sampling environments")
    return estimate_mean(values)
