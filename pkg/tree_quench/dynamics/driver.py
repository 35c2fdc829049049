from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from ..config import DRIVER_BLOCK_SIZE, DRIVER_STREAM
from ..utils import replica_generator


class CouplingDriver:
    """Rate-1 Poisson clocks with uniform marks on every vertex, up to the horizon ``t_max``.

    Events are drawn per block of ``DRIVER_BLOCK_SIZE`` vertices and per unit time window, each
    pair from its own seed stream. The events of a vertex therefore depend on
    ``(seed, replica, vertex)`` only: a larger tree or a longer horizon adds events elsewhere
    but never changes the ones already there.
    """

    def __init__(self, seed: int, n_vertices: int, t_max: float, replica: int = 0) -> None:
        if t_max < 0:
            msg = f"Driver horizon must be non-negative, got: {t_max}"
            raise ValueError(msg)
        self.seed = seed
        self.n_vertices = n_vertices
        self.t_max = float(t_max)
        self.replica = replica

    def _window(self, block: int, window: int) -> tuple[NDArray[np.float64], NDArray[np.int64], NDArray[np.float64]]:
        rng = replica_generator(self.seed, self.replica, DRIVER_STREAM, block, window)
        counts = rng.poisson(1.0, size=DRIVER_BLOCK_SIZE)
        vertices = np.repeat(block * DRIVER_BLOCK_SIZE + np.arange(DRIVER_BLOCK_SIZE, dtype=np.int64), counts)
        times = window + rng.random(len(vertices))
        marks = rng.random(len(vertices))
        return times, vertices, marks

    @cached_property
    def _events(self) -> tuple[NDArray[np.float64], NDArray[np.int64], NDArray[np.float64]]:
        n_blocks = -(-self.n_vertices // DRIVER_BLOCK_SIZE)
        n_windows = math.ceil(self.t_max)
        parts = [self._window(block, window) for block in range(n_blocks) for window in range(n_windows)]
        if not parts:
            return np.empty(0), np.empty(0, dtype=np.int64), np.empty(0)
        times, vertices, marks = (np.concatenate(column) for column in zip(*parts))
        keep = (vertices < self.n_vertices) & (times < self.t_max)
        times, vertices, marks = times[keep], vertices[keep], marks[keep]
        order = np.argsort(times, kind="stable")
        return times[order], vertices[order], marks[order]

    @property
    def times(self) -> NDArray[np.float64]:
        return self._events[0]

    @property
    def vertices(self) -> NDArray[np.int64]:
        return self._events[1]

    @property
    def marks(self) -> NDArray[np.float64]:
        return self._events[2]

    def __len__(self) -> int:
        return len(self.times)

    def vertex_events(self, v: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Times and marks of the clock at ``v``, in increasing time."""
        mask = self.vertices == v
        return self.times[mask], self.marks[mask]

    def __repr__(self) -> str:
        return f"CouplingDriver(seed={self.seed}, replica={self.replica}, n_vertices={self.n_vertices}, t_max={self.t_max})"
