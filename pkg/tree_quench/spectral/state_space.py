from __future__ import annotations

from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from ..config import MAX_GENERATOR_SPINS
from ..dynamics import SpinModel
from ..tree import Region


class StateSpace:
    """Configurations of the active vertices of a region, encoded as bitmasks.

    Bit ``j`` of a code is set when the ``j``-th active vertex holds the model's ``high``
    value. Codes are sorted, so lookups go through ``searchsorted``.
    """

    def __init__(self, model: SpinModel, region: Region) -> None:
        n_active = region.n_active
        if n_active > MAX_GENERATOR_SPINS:
            msg = f"Exact generators support at most {MAX_GENERATOR_SPINS} free vertices, got {n_active}"
            raise ValueError(msg)
        self.model = model
        self.region = region
        self.vertices = region.active_vertices
        all_codes = np.arange(2**n_active, dtype=np.int64)
        legal = model.is_legal(self._decode(all_codes), region)
        self.codes = all_codes[legal]

    @property
    def n_active(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.codes)

    def _decode(self, codes: NDArray[np.int64]) -> NDArray[np.int8]:
        bits = (codes[:, None] >> np.arange(self.n_active, dtype=np.int64)) & 1
        interior = np.zeros((len(codes), self.region.shape.n_vertices), dtype=np.int8)
        interior[:, self.vertices] = np.where(bits == 1, self.model.high, self.model.low)
        return self.region.fill(interior)

    @cached_property
    def states(self) -> NDArray[np.int8]:
        """Full-universe state of every code, one row each."""
        states = self._decode(self.codes)
        states.setflags(write=False)
        return states

    def encode(self, states: NDArray) -> NDArray[np.int64]:
        states = np.atleast_2d(states)
        bits = (states[:, self.vertices] == self.model.high).astype(np.int64)
        return bits @ (np.int64(1) << np.arange(self.n_active, dtype=np.int64))

    def index_of(self, states: NDArray) -> NDArray[np.int64]:
        """Row indices of full-universe states; raises for states outside the space."""
        codes = self.encode(states)
        index = np.searchsorted(self.codes, codes)
        found = (index < len(self.codes)) & (self.codes[np.minimum(index, len(self.codes) - 1)] == codes)
        if not found.all():
            msg = "Some states are not in the state space (illegal or outside the region)"
            raise ValueError(msg)
        return index

    def flip_targets(self, j: int) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
        """Index of every state with active vertex ``j`` flipped, and whether that state exists."""
        flipped = self.codes ^ (np.int64(1) << j)
        index = np.searchsorted(self.codes, flipped)
        clipped = np.minimum(index, len(self.codes) - 1)
        exists = self.codes[clipped] == flipped
        return clipped, exists
