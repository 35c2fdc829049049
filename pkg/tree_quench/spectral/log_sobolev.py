from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.optimize import minimize

from ..config import DEGENERATE_ENTROPY, LOG_SOBOLEV_RESTARTS
from ..utils import SeedLike, as_generator
from .gap import spectral_gap_exact
from .generator import GeneratorMatrix

logger = lg.getLogger(__name__)


@dataclass
class LogSobolevBound:
    """Numerical upper bound on the log-Sobolev constant; never a certified lower bound."""

    value: float
    best_ratio: float
    gap: float
    restarts: int
    degenerate: int
    depth: int

    @property
    def crude_ratio(self) -> float:
        """``gap / (L * value)``, reported for context only."""
        return self.gap / (max(self.depth, 1) * self.value)


def _dirichlet_matrix(generator: GeneratorMatrix) -> sp.csr_matrix:
    # D(g) = g^T Q g with Q = -diag(mu) L, symmetric under reversibility
    flow = -(sp.diags(generator.mu) @ generator.rates)
    return ((flow + flow.T) / 2).tocsr()


def _ratio_and_gradient(u: NDArray, q: sp.csr_matrix, mu: NDArray) -> tuple[float, NDArray, float]:
    g = np.exp(u - u.max())
    squares = g * g
    mass = float(np.dot(mu, squares))
    log_ratio = np.log(squares / mass)
    entropy = float(np.dot(mu, squares * log_ratio))
    qg = q @ g
    dirichlet = float(np.dot(g, qg))
    if entropy <= 0:
        return math.inf, np.zeros_like(u), 0.0
    ratio = dirichlet / entropy
    grad_dirichlet = 2.0 * qg
    grad_entropy = 2.0 * mu * g * log_ratio
    grad_g = (grad_dirichlet - ratio * grad_entropy) / entropy
    return ratio, grad_g * g, entropy / mass


def logsob_upper_bound(
    generator: GeneratorMatrix,
    n_restarts: int = LOG_SOBOLEV_RESTARTS,
    seed: SeedLike = 0,
) -> LogSobolevBound:
    """Smallest Dirichlet-to-entropy ratio ``D(g) / Ent(g^2)`` found by local descent.

    Trial functions are ``g = exp(u)`` started from random ``u`` and refined with L-BFGS-B.
    Any trial function is an upper bound on the infimum, and so is half the spectral gap,
    so the returned value is the smaller of the two.
    """
    if n_restarts < 1:
        msg = f"Need at least one restart, got: {n_restarts}"
        raise ValueError(msg)
    rng = as_generator(seed)
    q = _dirichlet_matrix(generator)
    mu = generator.mu
    gap = spectral_gap_exact(generator)

    def objective(u: NDArray) -> tuple[float, NDArray]:
        ratio, gradient, _ = _ratio_and_gradient(u, q, mu)
        return (ratio, gradient) if math.isfinite(ratio) else (1e300, gradient)

    best, degenerate = math.inf, 0
    for restart in range(n_restarts):
        start = rng.normal(0.0, 1.0, size=len(mu))
        result = minimize(objective, start, jac=True, method="L-BFGS-B", options={"maxiter": 500})
        ratio, _, relative_entropy = _ratio_and_gradient(result.x, q, mu)
        if relative_entropy < DEGENERATE_ENTROPY or not math.isfinite(ratio):
            degenerate += 1
            logger.info(f"Restart {restart} collapsed onto a constant function")
            continue
        best = min(best, ratio)

    if degenerate == n_restarts:
        msg = f"All {n_restarts} log-Sobolev restarts converged to constant functions"
        raise RuntimeError(msg)
    value = min(best, gap / 2)
    logger.info(f"Log-Sobolev upper bound {value:.6g} (best ratio {best:.6g}, gap {gap:.6g})")
    return LogSobolevBound(value, best, gap, n_restarts, degenerate, generator.region.depth)
