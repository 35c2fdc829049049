from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray
from scipy.sparse.linalg import expm_multiply, spsolve
from scipy.special import logsumexp

from ..dynamics import IsingModel, SpinModel
from ..gibbs import ModelParams
from ..tree import Boundary, ObstacleEnv, Region, TreeShape
from .state_space import StateSpace


@dataclass
class GeneratorMatrix:
    """Heat-bath generator ``L`` over a state space and its reversible measure ``mu``."""

    space: StateSpace
    rates: sp.csr_matrix
    mu: NDArray[np.float64]

    @property
    def model(self) -> SpinModel:
        return self.space.model

    @property
    def region(self) -> Region:
        return self.space.region

    def __len__(self) -> int:
        return len(self.mu)

    def expectation(self, values: NDArray) -> float:
        return float(np.dot(self.mu, values))

    def observable(self, vertex: int) -> NDArray[np.float64]:
        """Value of the configuration at ``vertex`` as a function on the state space."""
        return self.space.states[:, vertex].astype(np.float64)


def gibbs_vector(model: SpinModel, space: StateSpace) -> NDArray[np.float64]:
    log_weights = model.log_weights(space.states, space.region)
    return np.exp(log_weights - logsumexp(log_weights))


def flip_rates(model: SpinModel, space: StateSpace, j: int) -> NDArray[np.float64]:
    """Rate of flipping active vertex ``j`` in every state: the heat-bath probability of the other value."""
    vertex = space.vertices[j]
    upper = model.upper_probabilities(space.states, space.region, vertex)
    at_high = space.states[:, vertex] == model.high
    return np.where(at_high, 1.0 - upper, upper)


def build_generator(model: SpinModel, region: Region) -> GeneratorMatrix:
    space = StateSpace(model, region)
    rows, cols, values = [], [], []
    for j in range(space.n_active):
        targets, exists = space.flip_targets(j)
        rates = flip_rates(model, space, j)
        keep = exists & (rates > 0)
        rows.append(np.flatnonzero(keep))
        cols.append(targets[keep])
        values.append(rates[keep])
    rows, cols, values = np.concatenate(rows), np.concatenate(cols), np.concatenate(values)
    off_diagonal = sp.csr_matrix((values, (rows, cols)), shape=(len(space), len(space)))
    exit_rates = np.asarray(off_diagonal.sum(axis=1)).ravel()
    rates = (off_diagonal - sp.diags(exit_rates)).tocsr()
    return GeneratorMatrix(space, rates, gibbs_vector(model, space))


def build_ising_generator(
    params: ModelParams,
    shape: TreeShape,
    env: ObstacleEnv | None = None,
    boundary: Boundary | None = None,
) -> GeneratorMatrix:
    model = IsingModel(params)
    return build_generator(model, model.region(shape, boundary, env=env))


def reversibility_residual(generator: GeneratorMatrix) -> float:
    """Largest violation of ``mu_i L_ij = mu_j L_ji``."""
    flow = sp.diags(generator.mu) @ generator.rates
    return float(abs(flow - flow.T).max())


def stationary_from_rates(generator: GeneratorMatrix) -> NDArray[np.float64]:
    """Solve ``pi L = 0`` with one balance equation replaced by the normalization."""
    system = generator.rates.T.tolil()
    size = len(generator)
    system[size - 1, :] = np.ones(size)
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    return np.asarray(spsolve(system.tocsc(), rhs))


def transition_law(generator: GeneratorMatrix, start: NDArray, t: float) -> NDArray[np.float64]:
    """Law at time ``t`` of the chain started from the full-universe state ``start``."""
    initial = np.zeros(len(generator))
    initial[generator.space.index_of(start)[0]] = 1.0
    if t == 0:
        return initial
    return np.asarray(expm_multiply(generator.rates.T * t, initial))


def evolve(generator: GeneratorMatrix, values: NDArray, t: float) -> NDArray[np.float64]:
    """``P_t f = e^{tL} f`` for a function on the state space."""
    return np.asarray(expm_multiply(generator.rates * t, np.asarray(values, dtype=np.float64)))
