from __future__ import annotations

import json
import logging as lg
import time
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field, fields
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..config import DEFAULT_CHECKPOINT_COUNT, TRUNCATION_SAFETY_CONSTANT
from ..dynamics import cap_depth, truncation_depth_for_time
from ..gibbs import ModelParams, get_classifier_by_name
from ..hardcore import HCParams
from ..utils import file_checksum, write_csv, write_json

logger = lg.getLogger(__name__)

MODELS = ("ising", "hardcore")
REGIMES = ("a", "b", "c")


@dataclass
class ExperimentSpec:
    """Everything needed to rerun an experiment; plain values only so it serializes to JSON."""

    model: str
    seed: int
    b: int = 2
    beta: float = 1.0
    h: float = 0.0
    lam: float = 1.0
    p: float = 1.0
    depth: int | None = None
    safety_constant: float = TRUNCATION_SAFETY_CONSTANT
    t_max: float = 10.0
    checkpoints: list[float] | None = None
    replicas: int = 100
    regime: str | None = None
    margin: float | None = None
    check_truncation: bool = False

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            msg = f"Unknown model: {self.model}, valid options are: {', '.join(MODELS)}"
            raise ValueError(msg)
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            msg = f"A seed is mandatory and must be an integer, got: {self.seed!r}"
            raise ValueError(msg)
        if self.regime is not None and self.regime not in REGIMES:
            msg = f"Unknown regime: {self.regime}, valid options are: {', '.join(REGIMES)}"
            raise ValueError(msg)
        if self.margin is not None:
            if self.regime is None:
                msg = "A regime margin needs a regime"
                raise ValueError(msg)
            get_classifier_by_name(self.regime, self.margin)
        if self.replicas < 2:
            msg = f"Need at least two replicas for standard errors, got: {self.replicas}"
            raise ValueError(msg)
        if self.t_max < 0:
            msg = f"Time horizon must be non-negative, got: {self.t_max}"
            raise ValueError(msg)
        if not 0.0 <= self.p <= 1.0:
            msg = f"Initial-law parameter p must lie in [0, 1], got: {self.p}"
            raise ValueError(msg)
        self.seed = int(self.seed)
        if self.checkpoints is not None:
            self.checkpoints = [float(t) for t in self.checkpoints]

    def checkpoint_times(self) -> NDArray[np.float64]:
        if self.checkpoints is None:
            return np.linspace(0.0, self.t_max, DEFAULT_CHECKPOINT_COUNT)
        checkpoints = np.asarray(self.checkpoints, dtype=np.float64)
        if len(checkpoints) and checkpoints[-1] > self.t_max:
            msg = f"Checkpoint time {checkpoints[-1]} exceeds t_max={self.t_max}"
            raise ValueError(msg)
        return checkpoints

    def resolved_depth(self) -> int:
        """Explicit depth, or the truncation rule applied to ``t_max``; capped for simulation."""
        depth = self.depth
        if depth is None:
            depth = truncation_depth_for_time(self.t_max, self.safety_constant)
        return cap_depth(depth)

    def model_params(self) -> ModelParams:
        return ModelParams(self.beta, self.h, self.b)

    def hc_params(self) -> HCParams:
        return HCParams(self.lam, self.b)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> ExperimentSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            msg = f"Unknown experiment fields: {', '.join(sorted(unknown))}"
            raise ValueError(msg)
        return cls(**payload)


def code_version() -> str:
    try:
        return version("tree_quench")
    except PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    """Spec echo, code version, wall time and a checksum of every output file."""

    command: str
    spec: dict[str, Any]
    version: str = field(default_factory=code_version)
    wall_time: float = 0.0
    outputs: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_file(cls, path: str | Path) -> RunManifest:
        with open(path, encoding="utf-8") as file:
            return cls(**json.load(file))

    def verify(self, directory: str | Path) -> bool:
        """Whether every listed output in ``directory`` still has its recorded checksum."""
        directory = Path(directory)
        return all(file_checksum(directory / name) == checksum for name, checksum in self.outputs.items())


@dataclass
class Table:
    name: str
    header: Sequence[str]
    rows: Iterable[Sequence[Any]]


def write_run(out_dir: str | Path, command: str, spec: dict[str, Any], tables: list[Table], started: float) -> RunManifest:
    """Write every table as ``<name>.csv`` and the manifest as ``<command>_manifest.json``."""
    out_dir = Path(out_dir)
    manifest = RunManifest(command, spec)
    for table in tables:
        path = write_csv(out_dir / f"{table.name}.csv", table.header, table.rows)
        manifest.outputs[path.name] = file_checksum(path)
    manifest.wall_time = time.perf_counter() - started
    write_json(out_dir / f"{command}_manifest.json", manifest.to_dict())
    logger.info(f"Wrote {len(tables)} tables and a manifest to {out_dir}")
    return manifest
