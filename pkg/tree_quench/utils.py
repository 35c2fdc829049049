from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from tqdm import tqdm

from .config import WORKERS_ENV_VAR
from .memory import MEMORY

T = TypeVar("T")

SeedLike = int | np.random.Generator


def replica_generator(seed: int, replica: int, stream: int, *keys: int) -> np.random.Generator:
    """Generator for one (replica, stream) pair, optionally split further by ``keys``; independent of worker count and scheduling."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replica, stream, *keys)))


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV_VAR, "1"))
    if workers < 1:
        msg = f"Worker count must be positive, got: {workers}"
        raise ValueError(msg)
    return workers


def run_replicas(
    task: Callable[[int], T],
    n_replicas: int,
    workers: int | None = None,
    verbose: bool = False,
    desc: str = "Running replicas",
) -> list[T]:
    """Run ``task(i)`` for every replica index; results come back in replica order."""
    workers = resolve_workers(workers)
    indices = tqdm(range(n_replicas), desc=desc, disable=(not verbose))
    if workers == 1:
        return [task(i) for i in indices]
    return Parallel(n_jobs=workers)(delayed(task)(i) for i in indices)


def mean_and_stderr(values: Iterable[float]) -> tuple[float, float]:
    values = [float(v) for v in values]
    n = len(values)
    if n == 0:
        msg = "Cannot estimate a mean from an empty sample"
        raise ValueError(msg)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, math.inf
    variance = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(variance / n)


@dataclass
class Estimate:
    """Monte Carlo mean with its standard error."""

    value: float
    stderr: float
    n_samples: int

    def upper(self, slack: float) -> float:
        return self.value + slack * self.stderr

    def lower(self, slack: float) -> float:
        return self.value - slack * self.stderr


def estimate_mean(values: Iterable[float]) -> Estimate:
    values = list(values)
    mean, stderr = mean_and_stderr(values)
    return Estimate(mean, stderr, len(values))


def column_mean_and_stderr(samples: NDArray) -> tuple[NDArray, NDArray]:
    """Column-wise mean and standard error with a fixed reduction order."""
    samples = np.asarray(samples, dtype=np.float64)
    assert samples.ndim == 2, f"Expected a 2D sample array, got shape {samples.shape}"
    stats = [mean_and_stderr(column) for column in samples.T]
    means = np.array([s[0] for s in stats])
    errors = np.array([s[1] for s in stats])
    return means, errors


def parse_float_list(text: str) -> list[float]:
    """Parse ``"0,1,2.5"`` or the range form ``"start:stop:num"``."""
    text = text.strip()
    if ":" in text:
        start, stop, num = text.split(":")
        return [float(x) for x in np.linspace(float(start), float(stop), int(num))]
    return [float(x) for x in text.split(",") if x.strip()]


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    return path


def _format_cell(cell: Any) -> Any:
    if isinstance(cell, (float, np.floating)):
        return repr(float(cell))
    if isinstance(cell, (np.integer, np.bool_)):
        return cell.item()
    return cell


def write_json(path: str | Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(payload, file, indent=2, sort_keys=True)
        file.write("\n")
    return path


def file_checksum(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as file:
        for chunk in iter(lambda: file.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def clear_cache() -> None:
    MEMORY.clear(warn=False)
