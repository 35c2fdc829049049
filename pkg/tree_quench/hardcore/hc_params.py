from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class HCParams:
    """Hard-core activity ``lam`` on the b-ary tree."""

    lam: float
    b: int = 2

    def __post_init__(self) -> None:
        if not math.isfinite(self.lam) or self.lam <= 0:
            msg = f"Activity must be finite and positive, got: {self.lam}"
            raise ValueError(msg)
        if int(self.b) != self.b or self.b < 2:
            msg = f"Branching factor must be an integer >= 2, got: {self.b}"
            raise ValueError(msg)

    @property
    def p_lambda(self) -> float:
        return self.lam / (1.0 + self.lam)

    @property
    def q_lambda(self) -> float:
        return 1.0 / (1.0 + self.lam)

    @property
    def log_lam(self) -> float:
        return math.log(self.lam)
