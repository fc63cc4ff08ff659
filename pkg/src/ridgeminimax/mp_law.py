"""Marchenko-Pastur law (identity population covariance) and oracle ridge risk curves.

All functions are pure.  The aspect ratio ``rho`` is the limit of d/n.  MP
functions require a finite positive ``rho``; the two extended endpoints are
only meaningful for :func:`asymptotic_risk` and are passed as
:class:`RhoLimit` members.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "RhoLimit",
    "MPSupport",
    "mp_support",
    "mp_density",
    "mp_cdf",
    "mp_stieltjes",
    "mp_expect",
    "asymptotic_risk",
    "asymptotic_risk_low_dim",
]


class RhoLimit(enum.Enum):
    """Extended aspect-ratio endpoints (d/n -> 0 and d/n -> infinity)."""

    ZERO = "0"
    INFINITY = "inf"


@dataclass(frozen=True)
class MPSupport:
    a: float
    b: float
    point_mass_at_zero: float


def _check_rho(rho: float) -> float:
    if isinstance(rho, RhoLimit):
        raise ValueError(f"MP law is undefined at the limit rho={rho.value}")
    rho = float(rho)
    if not math.isfinite(rho) or rho <= 0.0:
        raise ValueError(f"rho must be finite and > 0, got {rho!r}")
    return rho


def mp_support(rho: float) -> MPSupport:
    rho = _check_rho(rho)
    r = math.sqrt(rho)
    return MPSupport((1.0 - r) ** 2, (1.0 + r) ** 2, max(1.0 - 1.0 / rho, 0.0))


def mp_density(rho: float, z):
    """Continuous part of the MP density; the atom at zero is in :func:`mp_support`.

    Accepts a scalar or an array for ``z``.
    """
    sup = mp_support(rho)
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise ValueError("z must be finite")
    inside = (z_arr > sup.a) & (z_arr < sup.b)
    zz = np.where(inside, z_arr, 1.0)
    val = np.sqrt(np.clip((sup.b - zz) * (zz - sup.a), 0.0, None)) / (2.0 * math.pi * rho * zz)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _continuous_mass_below(rho: float, x: float) -> float:
    # Closed-form antiderivative after z = 1 + rho + 2 sqrt(rho) cos(theta).
    sup = mp_support(rho)
    if x <= sup.a:
        return 0.0
    total = min(rho, 1.0) / rho
    if x >= sup.b:
        return total
    r = math.sqrt(rho)
    big_a, big_b = 1.0 + rho, 2.0 * r
    k = abs(1.0 - r) / (1.0 + r)
    c = abs(1.0 - rho) / (2.0 * rho)

    def g(theta: float) -> float:
        half = 0.5 * theta
        return (
            -math.sin(theta) / big_b
            + big_a * theta / big_b**2
            - c * math.atan2(k * math.sin(half), math.cos(half))
        )

    cos_theta = min(1.0, max(-1.0, (x - big_a) / big_b))
    mass = (2.0 / math.pi) * (g(math.pi) - g(math.acos(cos_theta)))
    return min(max(mass, 0.0), total)


def mp_cdf(rho: float, s: float) -> float:
    """F_rho(s), atom at zero included (right-continuous)."""
    sup = mp_support(rho)
    s = float(s)
    if math.isnan(s):
        raise ValueError("s must not be NaN")
    if s < 0.0:
        return 0.0
    return min(1.0, sup.point_mass_at_zero + _continuous_mass_below(rho, s))


def mp_stieltjes(rho: float, s: float) -> float:
    """Stieltjes transform m_rho(s) = int (z - s)^-1 dF_rho(z) for s < 0."""
    rho = _check_rho(rho)
    s = float(s)
    if not s < 0.0 or not math.isfinite(s):
        raise ValueError(f"Stieltjes transform requires finite s < 0, got {s!r}")
    q = s + rho - 1.0
    # discriminant is >= 0 for s < 0; clamp rounding noise
    root = math.sqrt(max(q * q - 4.0 * rho * s, 0.0))
    if q < 0.0:
        # rationalized branch, avoids cancellation in q + root
        return 2.0 / (root - q)
    return -(q + root) / (2.0 * rho * s)


def mp_expect(rho: float, func: Callable[[float], float], *, epsabs: float = 1e-13,
              epsrel: float = 1e-12, limit: int = 500) -> float:
    """Integrate ``func`` against the full MP measure by adaptive Gauss-Kronrod.

    The continuous part is mapped through z = a + (b - a) sin^2(theta), which
    removes the square-root edge singularities.
    """
    sup = mp_support(rho)
    a, b = sup.a, sup.b
    w = b - a

    def integrand(theta: float) -> float:
        st, ct = math.sin(theta), math.cos(theta)
        z = a + w * st * st
        if z <= 0.0:
            return 0.0
        return func(z) * (w * w * 2.0 * st * st * ct * ct) / (2.0 * math.pi * rho * z)

    cont, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, epsabs=epsabs, epsrel=epsrel,
                             limit=limit)
    atom = sup.point_mass_at_zero
    return cont + (atom * func(0.0) if atom > 0.0 else 0.0)


def _coerce_extended_rho(rho) -> float | RhoLimit:
    if isinstance(rho, RhoLimit):
        return rho
    rho = float(rho)
    if math.isnan(rho) or rho < 0.0:
        raise ValueError(f"rho must be >= 0, got {rho!r}")
    if rho == 0.0:
        return RhoLimit.ZERO
    if math.isinf(rho):
        return RhoLimit.INFINITY
    return rho


def asymptotic_risk(tau: float, rho) -> float:
    """Limiting risk of the oracle ridge estimator at signal strength ``tau``.

    ``rho`` may be a positive float, ``RhoLimit.ZERO``/``RhoLimit.INFINITY``, or
    the floats 0 and inf, which map to those limits.
    """
    tau = float(tau)
    if math.isnan(tau) or tau < 0.0 or math.isinf(tau):
        raise ValueError(f"tau must be finite and >= 0, got {tau!r}")
    rho = _coerce_extended_rho(rho)
    if rho is RhoLimit.ZERO:
        return 0.0
    if rho is RhoLimit.INFINITY:
        return tau * tau
    t2 = tau * tau
    if t2 == 0.0:
        return 0.0
    u = t2 * (rho - 1.0) - rho
    root = math.hypot(u, 2.0 * rho * tau)
    if u < 0.0:
        return 2.0 * rho * t2 / (root - u)
    return (u + root) / (2.0 * rho)


def asymptotic_risk_low_dim(tau: float, rho: float) -> float:
    """rho tau^2 / (rho + tau^2), with value 0 at rho = tau = 0."""
    tau, rho = float(tau), float(rho)
    if not (tau >= 0.0 and rho >= 0.0) or math.isinf(tau) or math.isinf(rho):
        raise ValueError(f"tau and rho must be finite and >= 0, got tau={tau!r}, rho={rho!r}")
    t2 = tau * tau
    if rho == 0.0 or t2 == 0.0:
        return 0.0
    return rho * t2 / (rho + t2)
