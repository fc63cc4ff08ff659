"""Eigenvalue functionals of n^-1 X^T X.

Only the smaller Gram matrix is decomposed; when d > n the spectrum is padded
with d - n exact zeros.  All ridge traces are evaluated from the eigenvalues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import mp_law
from .model import DataSet

__all__ = [
    "SpectralSummary",
    "SpectrumError",
    "ConditioningError",
    "spectrum",
    "spectrum_from_eigenvalues",
    "exact_ridge_risk",
    "general_t_ridge_risk",
    "esd_kolmogorov_distance",
    "theorem2_gap_bound",
    "wishart_tridiagonal",
    "tridiagonal_spectrum",
    "resolvent_trace_tridiagonal",
]

_NEG_CLAMP = 1e-10


class SpectrumError(ArithmeticError):
    pass


class ConditioningError(SpectrumError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    eigenvalues: np.ndarray  # descending, length d
    d: int
    n: int

    @property
    def rank(self) -> int:
        return min(self.d, self.n)

    @property
    def nonzero(self) -> np.ndarray:
        """The leading min(d, n) eigenvalues (nonzero with probability one)."""
        return self.eigenvalues[: self.rank]


def spectrum_from_eigenvalues(eigenvalues, d: int, n: int) -> SpectralSummary:
    """Build a summary from min(d, n) or d raw eigenvalues of n^-1 X^T X."""
    ev = np.asarray(eigenvalues, dtype=float).reshape(-1)
    k = min(d, n)
    if ev.shape[0] not in (k, d):
        raise ValueError(f"expected {k} or {d} eigenvalues, got {ev.shape[0]}")
    ev = np.sort(ev)[::-1]
    top = ev[0] if ev.size else 0.0
    if ev.size and ev[-1] < -_NEG_CLAMP * max(top, 1.0):
        raise SpectrumError(f"eigenvalue {ev[-1]:.3e} is negative beyond rounding "
                            f"(largest {top:.3e})")
    ev = np.clip(ev, 0.0, None)
    if ev.shape[0] < d:
        ev = np.concatenate([ev, np.zeros(d - ev.shape[0])])
    ev.flags.writeable = False
    return SpectralSummary(ev, int(d), int(n))


def spectrum(data: DataSet) -> SpectralSummary:
    try:
        ev = linalg.eigvalsh(data.gram, check_finite=False) / data.n
    except linalg.LinAlgError as exc:
        cond = np.linalg.cond(data.gram)
        raise SpectrumError(f"eigensolver failed ({exc}); Gram condition number {cond:.3e}") from exc
    return spectrum_from_eigenvalues(ev, data.d, data.n)


def exact_ridge_risk(spec: SpectralSummary, tau: float) -> float:
    """tr{(X^T X + d / tau^2 I)^-1} for one draw; tau = inf gives tr{(X^T X)^-1}."""
    tau = float(tau)
    if math.isnan(tau) or tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    if tau == 0.0:
        return 0.0
    lam = 0.0 if math.isinf(tau) else spec.d / (tau * tau)
    denom = spec.n * spec.eigenvalues + lam
    if np.any(denom == 0.0):
        return math.inf
    return math.fsum(1.0 / denom)


def general_t_ridge_risk(spec: SpectralSummary, tau: float, t: float) -> float:
    """Risk of ridge(t) at |beta| = tau for one draw of X:
    sum_j (t^4 n s_j + d tau^2) / (t^2 n s_j + d)^2."""
    tau, t = float(tau), float(t)
    if not (tau >= 0.0 and t >= 0.0) or math.isinf(t) or math.isinf(tau):
        raise ValueError(f"tau and t must be finite and >= 0, got tau={tau!r}, t={t!r}")
    d = spec.d
    ns = spec.n * spec.eigenvalues
    t2 = t * t
    return math.fsum((t2 * t2 * ns + d * tau * tau) / (t2 * ns + d) ** 2)


def esd_kolmogorov_distance(spec: SpectralSummary) -> float:
    """sup_s |ESD(s) - F_{d/n}(s)|, evaluated at both one-sided limits of every jump."""
    rho = spec.d / spec.n
    atom = mp_law.mp_support(rho).point_mass_at_zero
    vals, counts = np.unique(spec.eigenvalues, return_counts=True)
    cum = np.cumsum(counts) / spec.d
    worst = 0.0
    prev = 0.0
    for v, c in zip(vals, cum):
        f_right = mp_law.mp_cdf(rho, v)
        f_left = f_right - atom if v == 0.0 else f_right
        worst = max(worst, abs(c - f_right), abs(prev - f_left))
        prev = c
    return min(worst, 1.0)


def theorem2_gap_bound(spec: SpectralSummary, tau: float) -> float:
    """One-draw value of the ridge-vs-sphere-Bayes risk gap bound.

    d <= n: (1/d) (s_1/s_d) tr{(X^T X + d/tau^2 I_d)^-1}
    d >  n: (1/n) (s_1/s_n) tr{(X X^T + d/tau^2 I_n)^-1}
            + 2 (d - n) / (tau^2 (n - 2)) tr{(X X^T + d/tau^2 I_n)^-2}
    where s_n is the smallest nonzero eigenvalue.
    """
    tau = float(tau)
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValueError(f"tau must be finite and > 0, got {tau!r}")
    if spec.n <= 2:
        raise ValueError("the bound requires n > 2")
    d, n = spec.d, spec.n
    nz = spec.nonzero
    if nz[-1] < 1e-12:
        raise ConditioningError(f"smallest nonzero eigenvalue {nz[-1]:.3e} below 1e-12")
    ratio = nz[0] / nz[-1]
    inv = 1.0 / (n * nz + d / (tau * tau))
    if d <= n:
        return ratio * math.fsum(inv) / d
    return ratio * math.fsum(inv) / n + 2.0 * (d - n) / (tau * tau * (n - 2)) * math.fsum(inv**2)


# Exact spectral sampler: a real Wishart matrix with k = min(d, n) rows and
# m = max(d, n) degrees of freedom has the same eigenvalues as B B^T, where B is
# k x k lower bidiagonal with diagonal chi_m, chi_{m-1}, ..., chi_{m-k+1} and
# subdiagonal chi_{k-1}, ..., chi_1 (beta = 1 Laguerre ensemble).  Useful when a
# functional depends on X only through its spectrum.

def wishart_tridiagonal(d: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(diagonal, offdiagonal) of a tridiagonal matrix with the nonzero spectrum of X^T X."""
    k, m = min(d, n), max(d, n)
    x = np.sqrt(rng.chisquare(np.arange(m, m - k, -1, dtype=float)))
    y = np.sqrt(rng.chisquare(np.arange(k - 1, 0, -1, dtype=float))) if k > 1 else np.empty(0)
    diag = x * x
    diag[1:] += y * y
    return diag, x[:-1] * y


def tridiagonal_spectrum(diag, off, d: int, n: int) -> SpectralSummary:
    ev = linalg.eigvalsh_tridiagonal(diag, off) if len(diag) > 1 else np.asarray(diag, float)
    return spectrum_from_eigenvalues(np.asarray(ev) / n, d, n)


def resolvent_trace_tridiagonal(diag, off, lam: float) -> np.ndarray:
    """tr{(T + lam I)^-1} for symmetric tridiagonal T; rows of 2-d input are batched.

    Uses the diagonal of the inverse from forward and backward pivots:
    (A^-1)_ii = 1 / (fwd_i + bwd_i - a_i).
    """
    a = np.atleast_2d(np.asarray(diag, dtype=float)) + lam
    b2 = np.atleast_2d(np.asarray(off, dtype=float)) ** 2
    k = a.shape[1]
    fwd = np.empty_like(a)
    bwd = np.empty_like(a)
    fwd[:, 0] = a[:, 0]
    for i in range(1, k):
        fwd[:, i] = a[:, i] - b2[:, i - 1] / fwd[:, i - 1]
    bwd[:, k - 1] = a[:, k - 1]
    for i in range(k - 2, -1, -1):
        bwd[:, i] = a[:, i] - b2[:, i] / bwd[:, i + 1]
    return np.sum(1.0 / (fwd + bwd - a), axis=1)
