from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Ising parameters on the b-ary tree; ``eps = exp(-2 beta)``.

    ``beta = 0`` is accepted so that infinite-temperature checks can run through the same code.
    """

    beta: float
    h: float = 0.0
    b: int = 2

    def __post_init__(self) -> None:
        if not math.isfinite(self.beta) or self.beta < 0:
            msg = f"Inverse temperature must be finite and non-negative, got: {self.beta}"
            raise ValueError(msg)
        if not math.isfinite(self.h):
            msg = f"Field must be finite, got: {self.h}"
            raise ValueError(msg)
        if int(self.b) != self.b or self.b < 2:
            msg = f"Branching factor must be an integer >= 2, got: {self.b}"
            raise ValueError(msg)

    @property
    def log_eps(self) -> float:
        return -2.0 * self.beta

    @property
    def eps(self) -> float:
        return math.exp(-2.0 * self.beta)

    @property
    def log_field(self) -> float:
        """Logarithm of eps^h, the field factor in the ratio recursion."""
        return -2.0 * self.beta * self.h

    def with_field(self, h: float) -> ModelParams:
        return ModelParams(self.beta, h, self.b)
