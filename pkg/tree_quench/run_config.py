from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

from .config import DEFAULT_OUTPUT_DIR, TRUNCATION_SAFETY_CONSTANT


@dataclass
class RunConfig:
    """All settings of one ``treeq`` invocation.

    Values may come from a JSON file; flags given on the command line override them.
    ``None`` means "use the subcommand default".
    """

    command: str
    seed: int | None = None
    model: str = "ising"
    b: int = 2
    beta: float = 1.0
    h: float = 0.0
    lam: float = 1.0
    p: float = 1.0
    depth: int | None = None
    boundary: str | None = None
    t_max: float = 10.0
    checkpoints: list[float] | None = None
    replicas: int = 100
    workers: int | None = None
    out: str = str(DEFAULT_OUTPUT_DIR)
    regime: str | None = None
    margin: float | None = None
    safety_constant: float = TRUNCATION_SAFETY_CONSTANT
    check_truncation: bool = False
    betas: list[float] | None = None
    weight: float | None = None
    ell1: int | None = None
    moment_t: float = 1.0
    u: float = 0.25
    full: bool = False
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.checkpoints is not None:
            self.checkpoints = [float(t) for t in self.checkpoints]
        if self.betas is not None:
            self.betas = [float(beta) for beta in self.betas]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def experiment_fields(self) -> dict[str, Any]:
        """The subset that describes the experiment itself, without the execution settings."""
        skip = {"command", "workers", "out", "verbose"}
        return {key: value for key, value in self.to_dict().items() if key not in skip}

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as file:
            json.dump(self.to_dict(), file, indent=2, sort_keys=True)
            file.write("\n")
        return path

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            msg = f"Unknown config keys: {', '.join(sorted(unknown))}"
            raise ValueError(msg)
        return cls(**payload)

    @classmethod
    def from_json(cls, path: str | Path, command: str | None = None) -> RunConfig:
        with open(path, encoding="utf-8") as file:
            payload = json.load(file)
        if command is not None:
            payload["command"] = command
        return cls.from_dict(payload)

    def overridden(self, overrides: dict[str, Any]) -> RunConfig:
        """Copy with every non-``None`` override applied."""
        payload = self.to_dict()
        payload.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfig.from_dict(payload)
