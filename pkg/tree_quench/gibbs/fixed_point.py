from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

from numba import njit
from scipy.optimize import bisect

from ..config import COEXISTENCE_GAP, CRITICAL_FIELD_TOLERANCE, FIXED_POINT_MAX_ITERATIONS, FIXED_POINT_TOLERANCE
from ..memory import MEMORY
from .model_params import ModelParams
from .recursion import magnetization_from_log_ratio

logger = lg.getLogger(__name__)


@njit(cache=True)
def _logaddexp(a: float, b: float) -> float:
    if a == b:
        return a + math.log(2.0)
    high = max(a, b)
    return high + math.log1p(math.exp(-abs(a - b)))


@njit(cache=True)
def _log_f(x: float, log_eps: float) -> float:
    if x == math.inf:
        return -log_eps
    if x == -math.inf:
        return log_eps
    return _logaddexp(log_eps, x) - _logaddexp(0.0, log_eps + x)


@njit(cache=True)
def _iterate_map(log_field: float, log_eps: float, b: int, start: float, n_steps: int) -> float:
    x = start
    for _ in range(n_steps):
        x = log_field + b * _log_f(x, log_eps)
    return x


@njit(cache=True)
def _iterate_to_fixed_point(
    log_field: float, log_eps: float, b: int, start: float, tolerance: float, max_iterations: int
) -> tuple[float, int, bool]:
    x = start
    for i in range(max_iterations):
        updated = log_field + b * _log_f(x, log_eps)
        if abs(updated - x) < tolerance:
            return updated, i + 1, True
        x = updated
    return x, max_iterations, False


@dataclass
class FixedPoint:
    log_ratio: float
    iterations: int
    converged: bool

    @property
    def magnetization(self) -> float:
        return magnetization_from_log_ratio(self.log_ratio)


@dataclass
class CriticalField:
    value: float
    uniqueness: bool


def homogeneous_fixed_point(params: ModelParams, start: float, warn: bool = True) -> FixedPoint:
    """Iterate ``x -> -2 beta h + b log F(x)`` from ``start`` (a log-ratio, possibly infinite)."""
    log_ratio, iterations, converged = _iterate_to_fixed_point(
        params.log_field, params.log_eps, params.b, start, FIXED_POINT_TOLERANCE, FIXED_POINT_MAX_ITERATIONS
    )
    if not converged and warn:
        logger.warning(
            f"Fixed-point iteration from {start} did not converge after {iterations} steps "
            f"(beta={params.beta}, h={params.h}, b={params.b})"
        )
    return FixedPoint(log_ratio, iterations, converged)


def _boundary_magnetization(params: ModelParams, start: float, depth: int | None) -> float:
    if depth is None:
        return homogeneous_fixed_point(params, start).magnetization
    if depth < 0:
        msg = f"Depth must be non-negative, got: {depth}"
        raise ValueError(msg)
    log_ratio = _iterate_map(params.log_field, params.log_eps, params.b, start, depth + 1)
    return magnetization_from_log_ratio(log_ratio)


def mu_plus_root(params: ModelParams, depth: int | None = None) -> float:
    """Root magnetization under the all-plus boundary below ``depth``; ``None`` gives the plus phase."""
    return _boundary_magnetization(params, -math.inf, depth)


def mu_minus_root(params: ModelParams, depth: int | None = None) -> float:
    return _boundary_magnetization(params, math.inf, depth)


def critical_beta0(b: int) -> float:
    """Uniqueness threshold of the zero-field model."""
    return 0.5 * math.log((b + 1) / (b - 1))


def critical_beta1(b: int) -> float:
    """Threshold below which the free boundary condition is extremal."""
    root = math.sqrt(b)
    return 0.5 * math.log((root + 1) / (root - 1))


def coexistence(params: ModelParams) -> bool:
    """Whether the plus and minus phases differ at these parameters."""
    plus = homogeneous_fixed_point(params, -math.inf, warn=False).magnetization
    minus = homogeneous_fixed_point(params, math.inf, warn=False).magnetization
    return abs(plus - minus) > COEXISTENCE_GAP


@MEMORY.cache
def _critical_field(beta: float, b: int, tolerance: float) -> float:
    params = ModelParams(beta, 0.0, b)

    def sign(h: float) -> float:
        return 1.0 if coexistence(params.with_field(h)) else -1.0

    upper = float(b)
    while sign(upper) > 0:
        upper *= 2.0
    return float(bisect(sign, 0.0, upper, xtol=tolerance))


def critical_field(params: ModelParams, tolerance: float = CRITICAL_FIELD_TOLERANCE) -> CriticalField:
    """Largest |h| at which the plus and minus phases coexist; the field of ``params`` is ignored."""
    if params.beta <= critical_beta0(params.b) or not coexistence(params.with_field(0.0)):
        return CriticalField(0.0, True)
    return CriticalField(_critical_field(params.beta, params.b, tolerance), False)
