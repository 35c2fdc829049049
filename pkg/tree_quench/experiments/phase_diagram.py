from __future__ import annotations

import logging as lg
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from ..config import CRITICAL_FIELD_TOLERANCE
from ..gibbs import ModelParams, critical_beta0, critical_field
from .experiment_spec import Table

logger = lg.getLogger(__name__)


def asymptotic_critical_field(b: int, beta: float) -> float:
    """Large-beta expansion ``b - 1 - (b log b - (b-1) log(b-1)) / (2 beta)`` of the critical field."""
    entropy = b * math.log(b) - (b - 1) * math.log(b - 1)
    return (b - 1) - entropy / (2.0 * beta)


@dataclass
class PhaseDiagram:
    b: int
    betas: NDArray[np.float64]
    fields: NDArray[np.float64]
    uniqueness: NDArray[np.bool_]
    tolerance: float

    @property
    def asymptote(self) -> float:
        """Large-beta limit ``b - 1`` of the critical field."""
        return float(self.b - 1)

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.fields) >= -2 * self.tolerance))

    def table(self, name: str) -> Table:
        header = ["beta", "h_c", "unique_at_zero_field", "large_beta_expansion", "asymptote"]
        expansion = [asymptotic_critical_field(self.b, beta) for beta in self.betas]
        rows = zip(self.betas, self.fields, self.uniqueness, expansion, [self.asymptote] * len(self.betas))
        return Table(name, header, rows)


def phase_diagram_scan(
    b: int,
    betas: list[float] | NDArray,
    tolerance: float = CRITICAL_FIELD_TOLERANCE,
    verbose: bool = False,
) -> PhaseDiagram:
    """Critical field over a grid of inverse temperatures; the phases coexist below the curve."""
    betas = np.sort(np.asarray(betas, dtype=np.float64))
    fields, uniqueness = [], []
    for beta in tqdm(betas, desc="Critical fields", disable=(not verbose)):
        critical = critical_field(ModelParams(float(beta), 0.0, b), tolerance)
        fields.append(critical.value)
        uniqueness.append(critical.uniqueness)
    diagram = PhaseDiagram(b, betas, np.array(fields), np.array(uniqueness), tolerance)
    if not diagram.monotone:
        logger.warning(f"Critical field is not monotone in beta on this grid for b={b}")
    logger.info(f"Phase diagram for b={b}: beta_0={critical_beta0(b):.6f}, h_c({betas[-1]:g})={fields[-1]:.4f}, asymptote {b - 1}")
    return diagram
