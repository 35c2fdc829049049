from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

logger = lg.getLogger(__name__)


@dataclass
class HCTailBound:
    """Bound on the probability that the root ratio falls below ``sqrt(lam)``, level by level from 0."""

    p: float
    lam: float
    values: NDArray[np.float64]
    fixed_point: float | None
    diverged: bool

    @property
    def supremum(self) -> float:
        return float(self.values.max())


def hc_tail_recursion(p: float, lam: float, max_level: int = 64, b: int = 2) -> HCTailBound:
    """Iterate ``q_l = min(1, 12(1-p) + 30 q_{l-2}^2)`` from the even-boundary base case.

    At levels 0 and 1 the root ratio is exactly ``lam``, so the base is 0 when ``lam > 1`` and 1 otherwise.
    """
    if b != 2:
        msg = f"The hard-core tail recursion is only available for b=2, got b={b}"
        raise ValueError(msg)
    if not 0 <= p <= 1:
        msg = f"Even-site probability must lie in [0, 1], got: {p}"
        raise ValueError(msg)
    if max_level < 1:
        msg = f"Need at least one level, got: {max_level}"
        raise ValueError(msg)
    constant = 12.0 * (1.0 - p)
    base = 0.0 if lam > 1 else 1.0

    values = np.empty(max_level + 1)
    values[:2] = base
    diverged = False
    for level in range(2, max_level + 1):
        updated = constant + 30.0 * values[level - 2] ** 2
        diverged |= updated > 1.0
        values[level] = min(1.0, updated)

    disc = 1.0 - 120.0 * constant
    fixed_point = (1.0 - math.sqrt(disc)) / 60.0 if disc >= 0 else None
    diverged |= disc < 0
    if diverged:
        logger.warning(f"Hard-core tail recursion has no stable fixed point below 1 for p={p}, lam={lam}")
    return HCTailBound(p, lam, values, fixed_point, diverged)
