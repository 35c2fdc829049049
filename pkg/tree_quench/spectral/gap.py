from __future__ import annotations

import logging as lg
from collections.abc import Callable

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..config import DENSE_EIGEN_LIMIT, EIGEN_RESIDUAL_LIMIT, EIGEN_TOLERANCE
from .generator import GeneratorMatrix

logger = lg.getLogger(__name__)


def symmetrized(rates: sp.spmatrix, mu: NDArray[np.float64]) -> sp.csr_matrix:
    """``D^{1/2} L D^{-1/2}`` with ``D = diag(mu)``; symmetric when ``L`` is reversible for ``mu``."""
    root = np.sqrt(mu)
    matrix = sp.diags(root) @ rates @ sp.diags(1.0 / root)
    return ((matrix + matrix.T) / 2).tocsr()


def gap_of(rates: sp.spmatrix, mu: NDArray[np.float64]) -> float:
    """Smallest non-zero eigenvalue of ``-L`` in ``L^2(mu)``; 0 for a one-state chain."""
    size = rates.shape[0]
    if size < 2:
        return 0.0
    symmetric = symmetrized(rates, mu)
    if size <= DENSE_EIGEN_LIMIT:
        eigenvalues = eigh(symmetric.toarray(), eigvals_only=True)
        return float(-eigenvalues[-2])
    shift = 2.0 * float(np.abs(symmetric.diagonal()).max()) + 1.0
    return lanczos_gap(lambda x: -(symmetric @ x), size, np.sqrt(mu), shift)


def lanczos_gap(
    apply: Callable[[NDArray], NDArray],
    size: int,
    top: NDArray[np.float64],
    shift: float,
) -> float:
    """Smallest eigenvalue of the positive semi-definite operator ``apply`` orthogonal to ``top``.

    ``shift`` must bound the spectrum from above. The constant direction ``top`` is deflated
    so the wanted eigenvalue becomes the largest one of ``shift - apply``.
    """

    def matvec(x: NDArray) -> NDArray:
        x = np.ravel(x)
        return shift * x - apply(x) - shift * top * np.dot(top, x)

    operator = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    try:
        values, vectors = eigsh(operator, k=1, which="LA", tol=EIGEN_TOLERANCE)
    except ArpackNoConvergence as error:
        msg = f"Lanczos iteration did not converge for an operator with {size} states: {error}"
        raise RuntimeError(msg) from error
    theta, vector = float(values[0]), vectors[:, 0]
    residual = float(np.linalg.norm(matvec(vector) - theta * vector))
    if residual > EIGEN_RESIDUAL_LIMIT:
        msg = f"Lanczos eigenpair rejected, residual {residual:.3e} exceeds {EIGEN_RESIDUAL_LIMIT}"
        raise RuntimeError(msg)
    logger.info(f"Lanczos gap {shift - theta:.6g} with residual {residual:.2e}")
    return shift - theta


def spectral_gap_exact(generator: GeneratorMatrix) -> float:
    return gap_of(generator.rates, generator.mu)
