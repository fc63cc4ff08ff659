"""Ridge family estimators parameterized by the signal scale t.

``ridge(data, t)`` solves (X^T X + (d / t^2) I) b = X^T y.  The endpoints are
first class: t = 0 gives the zero vector and t = inf gives OLS (minimum-norm
when X^T X is singular).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from .model import DataSet

__all__ = [
    "Estimate",
    "penalty_from_t",
    "t_from_penalty",
    "ridge",
    "ols",
    "null_estimate",
    "adaptive_tau_squared",
    "adaptive_ridge",
    "check_equivariance",
    "haar_orthogonal",
]


@dataclass(frozen=True, eq=False)
class Estimate:
    beta_hat: np.ndarray
    estimator_id: str
    t: float | None = None
    tau_hat: float | None = None


def penalty_from_t(t: float, d: int) -> float:
    """lambda = d / t^2 (inf at t = 0, 0 at t = inf)."""
    t = _check_t(t)
    if t == 0.0:
        return math.inf
    return 0.0 if math.isinf(t) else d / (t * t)


def t_from_penalty(lam: float, d: int) -> float:
    if not lam >= 0.0:
        raise ValueError(f"penalty must be >= 0, got {lam!r}")
    if lam == 0.0:
        return math.inf
    return 0.0 if math.isinf(lam) else math.sqrt(d / lam)


def _check_t(t: float) -> float:
    t = float(t)
    if math.isnan(t) or t < 0.0:
        raise ValueError(f"ridge parameter t must lie in [0, inf], got {t!r}")
    return t


def ridge(data: DataSet, t: float) -> Estimate:
    t = _check_t(t)
    if t == 0.0:
        return Estimate(np.zeros(data.d), "ridge", t=0.0)
    if math.isinf(t):
        est = ols(data)
        return Estimate(est.beta_hat, "ridge", t=t)
    lam = data.d / (t * t)
    g = np.array(data.gram)
    g[np.diag_indices_from(g)] += lam
    # d <= n: primal d x d system; d > n: dual n x n system via X^T (X X^T + lam I)^-1
    factor = linalg.cho_factor(g, lower=True, check_finite=False)
    if data.d <= data.n:
        beta = linalg.cho_solve(factor, data.xty, check_finite=False)
    else:
        beta = data.x.T @ linalg.cho_solve(factor, data.y, check_finite=False)
    return Estimate(beta, "ridge", t=t)


def ols(data: DataSet) -> Estimate:
    """Least squares; minimum-norm solution when X is rank deficient."""
    rcond = max(data.n, data.d) * np.finfo(float).eps
    beta, *_ = np.linalg.lstsq(data.x, data.y, rcond=rcond)
    return Estimate(beta, "ols", t=math.inf)


def null_estimate(d: int) -> Estimate:
    return Estimate(np.zeros(int(d)), "null", t=0.0)


def adaptive_tau_squared(data: DataSet) -> float:
    """max(|y|^2 / n - 1, 0)."""
    return max(float(data.y @ data.y) / data.n - 1.0, 0.0)


def adaptive_ridge(data: DataSet) -> Estimate:
    tau_hat = math.sqrt(adaptive_tau_squared(data))
    est = ridge(data, tau_hat)
    return Estimate(est.beta_hat, "adaptive", t=tau_hat, tau_hat=tau_hat)


def haar_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-corrected)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def check_equivariance(estimator: Callable[[DataSet], Estimate], data: DataSet,
                       u: np.ndarray) -> float:
    """max |est(y, X U) - U^T est(y, X)|."""
    u = np.asarray(u, dtype=float)
    d = data.d
    if u.shape != (d, d):
        raise ValueError(f"u must be {d}x{d}, got {u.shape}")
    if np.max(np.abs(u.T @ u - np.eye(d))) > 1e-12:
        raise ValueError("u is not orthogonal to within 1e-12")
    base = estimator(data).beta_hat
    rotated = estimator(DataSet(data.x @ u, data.y)).beta_hat
    return float(np.max(np.abs(rotated - u.T @ base), initial=0.0))
