from __future__ import annotations

from abc import ABC

import numpy as np
from numpy.typing import NDArray


class Boundary(ABC):
    """Values of the vertices just below a finite tree.

    ``spins`` and ``occupations`` return the values on the first level below the tree
    (``b**level`` entries in breadth-first order). Ising spins use 0 for an absent
    neighbour, so a free boundary contributes nothing to local fields.
    """

    name: str = "boundary"

    def spins(self, b: int, level: int) -> NDArray[np.int8]:
        msg = f"The {self.name} boundary has no Ising spin values"
        raise ValueError(msg)

    def occupations(self, b: int, level: int) -> NDArray[np.int8]:
        msg = f"The {self.name} boundary has no hard-core occupation values"
        raise ValueError(msg)

    def deep_spins(self, b: int, level: int) -> NDArray[np.int8]:
        """Frozen values further below the first boundary level."""
        return self.spins(b, level)

    def deep_occupations(self, b: int, level: int) -> NDArray[np.int8]:
        return self.occupations(b, level)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other)

    def __hash__(self) -> int:
        return hash(type(self).__name__)


class Plus(Boundary):
    name = "plus"

    def spins(self, b: int, level: int) -> NDArray[np.int8]:
        return np.ones(b**level, dtype=np.int8)


class Minus(Boundary):
    name = "minus"

    def spins(self, b: int, level: int) -> NDArray[np.int8]:
        return -np.ones(b**level, dtype=np.int8)


class Free(Boundary):
    name = "free"

    def spins(self, b: int, level: int) -> NDArray[np.int8]:
        return np.zeros(b**level, dtype=np.int8)

    def occupations(self, b: int, level: int) -> NDArray[np.int8]:
        return np.zeros(b**level, dtype=np.int8)


class Even(Boundary):
    """Hard-core boundary occupying every vertex at even distance from the root."""

    name = "even"

    def occupations(self, b: int, level: int) -> NDArray[np.int8]:
        return np.full(b**level, 1 if level % 2 == 0 else 0, dtype=np.int8)


class Odd(Boundary):
    """Hard-core boundary occupying every vertex at odd distance from the root."""

    name = "odd"

    def occupations(self, b: int, level: int) -> NDArray[np.int8]:
        return np.full(b**level, 1 if level % 2 == 1 else 0, dtype=np.int8)


class Fixed(Boundary):
    """Explicit boundary values; ``+-1`` for Ising spins or ``0/1`` for hard-core occupations."""

    name = "fixed"

    def __init__(self, values: NDArray) -> None:
        values = np.array(values, dtype=np.int8)
        values.setflags(write=False)
        self.values = values

    def spins(self, b: int, level: int) -> NDArray[np.int8]:
        self._check_length(b, level)
        if not np.all(np.abs(self.values) == 1):
            msg = "Fixed Ising boundary values must all be +1 or -1"
            raise ValueError(msg)
        return self.values.copy()

    def occupations(self, b: int, level: int) -> NDArray[np.int8]:
        self._check_length(b, level)
        if not np.all((self.values == 0) | (self.values == 1)):
            msg = "Fixed hard-core boundary values must all be 0 or 1"
            raise ValueError(msg)
        return self.values.copy()

    def deep_spins(self, b: int, level: int) -> NDArray[np.int8]:
        return np.zeros(b**level, dtype=np.int8)

    def deep_occupations(self, b: int, level: int) -> NDArray[np.int8]:
        return np.zeros(b**level, dtype=np.int8)

    def _check_length(self, b: int, level: int) -> None:
        if len(self.values) != b**level:
            msg = f"Fixed boundary has {len(self.values)} values but level {level} of a {b}-ary tree has {b**level}"
            raise ValueError(msg)

    def __repr__(self) -> str:
        return f"Fixed({self.values.tolist()})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Fixed) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())
