"""Gaussian linear model y = X beta + eps with X, eps i.i.d. N(0, 1).

Random streams
--------------
All randomness comes from ``numpy.random.Generator`` over PCG64.  Gaussian
variates use numpy's ziggurat sampler (``standard_normal``).  Streams are
derived from a root seed with ``SeedSequence``: replicate ``i`` under stream
key ``(k1, k2, ...)`` uses ``SeedSequence(root, spawn_key=(k1, k2, ..., i))``,
so every replicate is reproducible regardless of which worker runs it.  The
experiment harness keys streams by ``(d, n)``; estimators evaluated at the same
dimensions therefore see identical draws (common random numbers).  Within a
replicate the draw order is fixed: beta (when resampled on the sphere), then X
(n x d, row-major), then eps (n).
"""
from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ModelConfig",
    "DataSet",
    "IngestionError",
    "replicate_rng",
    "sample_sphere",
    "generate",
    "load_dataset",
    "write_dataset",
]

_U64 = 2**64


class IngestionError(ValueError):
    """Raised when a dataset file cannot be turned into a DataSet."""


@dataclass(frozen=True)
class ModelConfig:
    d: int
    n: int
    tau: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        if not 0 <= int(self.seed) < _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def rho(self) -> float:
        return self.d / self.n


@dataclass(frozen=True, eq=False)
class DataSet:
    """Immutable design matrix ``x`` (n x d), response ``y`` and optional true beta."""

    x: np.ndarray
    y: np.ndarray
    beta_true: np.ndarray | None = field(default=None)

    def __post_init__(self):
        x = np.array(self.x, dtype=float, order="C")
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.ndim != 2:
            raise ValueError(f"x must be 2-d, got shape {x.shape}")
        if y.shape[0] != x.shape[0]:
            raise ValueError(f"y has length {y.shape[0]} but x has {x.shape[0]} rows")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("x and y must be finite")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.beta_true is not None:
            b = np.array(self.beta_true, dtype=float).reshape(-1)
            if b.shape[0] != x.shape[1]:
                raise ValueError(f"beta_true has length {b.shape[0]}, expected {x.shape[1]}")
            b.flags.writeable = False
            object.__setattr__(self, "beta_true", b)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @functools.cached_property
    def gram(self) -> np.ndarray:
        """X^T X when d <= n, otherwise X X^T (the smaller Gram matrix)."""
        g = self.x.T @ self.x if self.d <= self.n else self.x @ self.x.T
        g = 0.5 * (g + g.T)
        g.flags.writeable = False
        return g

    @functools.cached_property
    def xty(self) -> np.ndarray:
        v = self.x.T @ self.y
        v.flags.writeable = False
        return v


def replicate_rng(root_seed: int, replicate: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    """Independent generator for one replicate under stream ``key``."""
    spawn = tuple(int(k) for k in key) + (int(replicate),)
    ss = np.random.SeedSequence(int(root_seed), spawn_key=spawn)
    return np.random.Generator(np.random.PCG64(ss))


def sample_sphere(d: int, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the sphere of radius ``tau`` in R^d (tau * z / |z|)."""
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    if not (math.isfinite(tau) and tau >= 0.0):
        raise ValueError(f"tau must be finite and >= 0, got {tau!r}")
    z = rng.standard_normal(d)
    if tau == 0.0:
        return np.zeros(d)
    return z * (tau / np.linalg.norm(z))


def generate(config: ModelConfig, beta, rng: np.random.Generator) -> DataSet:
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.shape[0] != config.d:
        raise ValueError(f"beta has length {beta.shape[0]}, config expects d={config.d}")
    if not np.all(np.isfinite(beta)):
        raise ValueError("beta must be finite")
    x = rng.standard_normal((config.n, config.d))
    eps = rng.standard_normal(config.n)
    return DataSet(x, x @ beta + eps, beta)


def load_dataset(path, format: str = "csv") -> DataSet:
    """Read a dataset file: first column y, remaining columns X, optional header."""
    if format != "csv":
        raise IngestionError(f"unsupported dataset format {format!r}")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    start = 0
    try:
        float(rows[0][0])
    except ValueError:
        start = 1
    width = len(rows[start]) if start < len(rows) else 0
    if width < 2:
        raise IngestionError(f"{path}: need at least two columns (y and one predictor)")
    values = []
    for i, row in enumerate(rows[start:]):
        if len(row) != width:
            raise IngestionError(f"{path}: data row {i} has {len(row)} fields, expected {width}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise IngestionError(f"{path}: data row {i}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise IngestionError(f"{path}: data row {i} contains a non-finite value")
        values.append(vals)
    if not values:
        raise IngestionError(f"{path}: no data rows")
    arr = np.array(values)
    return DataSet(arr[:, 1:], arr[:, 0])


def write_dataset(data: DataSet, path, header: bool = True) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["y"] + [f"x{j + 1}" for j in range(data.d)])
        for yi, xi in zip(data.y, data.x):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in xi])
