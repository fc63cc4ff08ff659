"""Monte Carlo risk harness and convergence studies.

Each replicate draws (beta, X, eps) from its own substream (see
:mod:`ridgeminimax.model`), so results do not depend on the number of worker
threads.  Per-replicate losses are stored by replicate index and reduced with
``math.fsum``, which is exactly rounded and therefore order independent.

Two risk functionals are available:

``loss``
    |beta_hat - beta|^2 for the fitted estimate.
``trace``
    the risk conditional on X averaged over beta on the sphere, computed from
    the spectrum.  For the oracle ridge this is tr{(X^T X + d/tau^2 I)^-1};
    it needs no noise draw and has much lower variance than ``loss``.
``trace-tridiagonal``
    the same quantity for the oracle ridge, OLS or null estimator, with the
    Wishart spectrum drawn from its bidiagonal chi representation instead of
    forming X.  Exact in distribution and O(min(d, n)) per replicate.
"""
from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from . import estimators as est
from . import mp_law, spectra
from .model import DataSet, ModelConfig, generate, replicate_rng, sample_sphere

__all__ = [
    "ExperimentError",
    "RiskEstimate",
    "ExperimentSpec",
    "ConvergencePoint",
    "ConvergenceReport",
    "CheckReport",
    "ESTIMATOR_IDS",
    "parse_estimator",
    "simulate_losses",
    "summarize",
    "mc_risk",
    "risk_vs_asymptotic",
    "adaptive_gap_study",
    "low_dim_sandwich_check",
    "high_dim_null_check",
    "fit_rate_exponent",
]

ESTIMATOR_IDS = ("oracle", "adaptive", "ols", "null", "ridge:<t>")
FUNCTIONALS = ("loss", "trace", "trace-tridiagonal")
SPHERE = "sphere"


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    std_error: float
    replicates: int
    functional_id: str


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo risk experiment.

    ``beta_mode`` is ``"sphere"`` (fresh uniform draw on the sphere of radius
    ``config.tau`` each replicate) or a fixed coefficient vector of length d.
    """

    config: ModelConfig
    estimator_id: str = "oracle"
    replicates: int = 100
    beta_mode: object = SPHERE

    def __post_init__(self):
        parse_estimator(self.estimator_id)
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ValueError(f"replicates must be a positive integer, got {self.replicates!r}")
        if isinstance(self.beta_mode, str):
            if self.beta_mode != SPHERE:
                raise ValueError(f"unknown beta_mode {self.beta_mode!r}")
        else:
            b = np.asarray(self.beta_mode, dtype=float).reshape(-1)
            if b.shape[0] != self.config.d or not np.all(np.isfinite(b)):
                raise ValueError(f"fixed beta must be a finite vector of length {self.config.d}")
            b.flags.writeable = False
            object.__setattr__(self, "beta_mode", b)

    @property
    def signal_strength(self) -> float:
        if isinstance(self.beta_mode, str):
            return float(self.config.tau)
        return float(np.linalg.norm(self.beta_mode))


@dataclass(frozen=True)
class ConvergencePoint:
    n: int
    d: int
    value: float
    std_error: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConvergenceReport:
    grid: list
    fitted_rate_exponent: float
    reference_exponent: float
    residuals: list = field(default_factory=list)


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    values: dict


_RIDGE_RE = re.compile(r"^ridge:(.+)$")


def parse_estimator(estimator_id: str) -> tuple[str, float | None]:
    """'oracle' | 'adaptive' | 'ols' | 'null' | 'ridge:<t>' -> (kind, t)."""
    if estimator_id in ("oracle", "adaptive", "ols", "null"):
        return estimator_id, None
    m = _RIDGE_RE.match(str(estimator_id))
    if m:
        try:
            t = float(m.group(1))
        except ValueError:
            t = float("nan")
        if math.isnan(t) or t < 0.0:
            raise ValueError(f"invalid ridge parameter in {estimator_id!r}")
        return "ridge", t
    raise ValueError(f"unknown estimator {estimator_id!r}; expected one of {ESTIMATOR_IDS}")


def _fit(kind: str, t: float | None, data: DataSet, tau: float) -> np.ndarray:
    if kind == "oracle":
        return est.ridge(data, tau).beta_hat
    if kind == "ridge":
        return est.ridge(data, t).beta_hat
    if kind == "adaptive":
        return est.adaptive_ridge(data).beta_hat
    if kind == "ols":
        return est.ols(data).beta_hat
    return est.null_estimate(data.d).beta_hat


def _conditional_risk(kind: str, t: float | None, spec: spectra.SpectralSummary,
                      tau: float) -> float:
    if kind == "oracle":
        return spectra.exact_ridge_risk(spec, tau)
    if kind == "ridge":
        if math.isinf(t):
            return spectra.exact_ridge_risk(spec, math.inf)
        return spectra.general_t_ridge_risk(spec, tau, t)
    if kind == "ols":
        return spectra.exact_ridge_risk(spec, math.inf)
    if kind == "null":
        return tau * tau
    raise ValueError(f"the trace functional is not available for {kind!r}")


def simulate_losses(config: ModelConfig, estimator_ids: Sequence[str], replicates: int, *,
                    beta_mode=SPHERE, functional: str = "loss", seed: int | None = None,
                    threads: int = 1) -> np.ndarray:
    """Per-replicate losses, shape (replicates, len(estimator_ids)).

    All estimators in one call are evaluated on the same draws.
    """
    if functional not in FUNCTIONALS:
        raise ValueError(f"functional must be one of {FUNCTIONALS}, got {functional!r}")
    parsed = [parse_estimator(e) for e in estimator_ids]
    spec = ExperimentSpec(config, estimator_ids[0] if estimator_ids else "oracle",
                          replicates, beta_mode)
    if functional == "trace":
        for kind, _ in parsed:
            if kind == "adaptive":
                raise ValueError("the trace functional is not available for 'adaptive'")
    root = config.seed if seed is None else seed
    fixed = None if isinstance(spec.beta_mode, str) else spec.beta_mode
    tau = spec.signal_strength
    key = (config.d, config.n)
    if functional == "trace-tridiagonal":
        return _tridiagonal_losses(config, parsed, replicates, root, tau)

    def one(i: int) -> np.ndarray:
        rng = replicate_rng(root, i, key)
        beta = sample_sphere(config.d, tau, rng) if fixed is None else fixed
        data = generate(config, beta, rng)
        out = np.empty(len(parsed))
        try:
            if functional == "loss":
                for k, (kind, t) in enumerate(parsed):
                    diff = _fit(kind, t, data, tau) - beta
                    out[k] = diff @ diff
            else:
                sp = spectra.spectrum(data)
                for k, (kind, t) in enumerate(parsed):
                    out[k] = _conditional_risk(kind, t, sp, tau)
        except (linalg.LinAlgError, np.linalg.LinAlgError, spectra.SpectrumError) as exc:
            raise ExperimentError(f"replicate {i} failed: {exc}") from exc
        return out

    threads = max(1, int(threads))
    if threads == 1:
        rows = [one(i) for i in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(replicates)))
    return np.array(rows).reshape(replicates, len(parsed))


def _tridiagonal_losses(config: ModelConfig, parsed, replicates: int, root: int,
                        tau: float, batch: int = 4096) -> np.ndarray:
    d, n = config.d, config.n
    k = min(d, n)
    lams = []
    for kind, t in parsed:
        if kind == "null" or tau == 0.0 or (kind == "ridge" and t == 0.0):
            lams.append(None)
        elif kind == "oracle":
            lams.append(d / (tau * tau))
        elif kind == "ols" or (kind == "ridge" and math.isinf(t)):
            lams.append(0.0)
        else:
            raise ValueError(f"trace-tridiagonal supports oracle, ols and null, not {kind!r}")
    out = np.empty((replicates, len(parsed)))
    for lo in range(0, replicates, batch):
        hi = min(lo + batch, replicates)
        diags = np.empty((hi - lo, k))
        offs = np.empty((hi - lo, k - 1))
        for i in range(lo, hi):
            # stream tag 1 keeps these draws apart from the design-based ones
            diags[i - lo], offs[i - lo] = spectra.wishart_tridiagonal(
                d, n, replicate_rng(root, i, (d, n, 1)))
        for j, lam in enumerate(lams):
            if lam is None:
                # zero estimate: risk is |beta|^2
                out[lo:hi, j] = tau * tau
                continue
            tr = spectra.resolvent_trace_tridiagonal(diags, offs, lam)
            if d > n:
                tr = tr + ((d - n) / lam if lam > 0.0 else math.inf)
            out[lo:hi, j] = tr
    return out


def summarize(values, functional_id: str) -> RiskEstimate:
    v = np.asarray(values, dtype=float).reshape(-1)
    r = v.shape[0]
    mean = math.fsum(v) / r
    if r < 2:
        return RiskEstimate(mean, math.nan, r, functional_id)
    var = math.fsum((v - mean) ** 2) / (r - 1)
    return RiskEstimate(mean, math.sqrt(var / r), r, functional_id)


def mc_risk(spec: ExperimentSpec, rng_root: int | None = None, *, functional: str = "loss",
            threads: int = 1) -> RiskEstimate:
    """Monte Carlo estimate of E|beta_hat - beta|^2 (or of its trace form)."""
    losses = simulate_losses(spec.config, [spec.estimator_id], spec.replicates,
                             beta_mode=spec.beta_mode, functional=functional,
                             seed=rng_root, threads=threads)
    return summarize(losses[:, 0], f"{spec.estimator_id}/{functional}")


def fit_rate_exponent(ns, values) -> tuple[float, list]:
    """Unweighted least-squares slope of log(value) on log(n), with residuals."""
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        return math.nan, []
    x, y = np.log(ns), np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), [float(r) for r in y - (slope * x + intercept)]


def _check_grid(grid, min_points: int = 3) -> list[tuple[int, int]]:
    pts = sorted((int(n), int(d)) for n, d in grid)
    if len(pts) < min_points:
        raise ValueError(f"a convergence grid needs at least {min_points} n-values, got {len(pts)}")
    if len({n for n, _ in pts}) != len(pts):
        raise ValueError("grid n-values must be distinct")
    return pts


def risk_vs_asymptotic(grid, tau: float, estimator_id: str = "oracle", *, replicates: int = 500,
                       seed: int = 0, threads: int = 1, functional: str = "loss",
                       allow_near_one: bool = False) -> ConvergenceReport:
    """Gap |MC risk - (d/n) m_{d/n}(-d/(n tau^2))| along a grid of (n, d) at fixed d/n."""
    pts = _check_grid(grid)
    ratios = {d / n for n, d in pts}
    rho = pts[0][1] / pts[0][0]
    if max(abs(r - rho) for r in ratios) > 1e-12 * rho:
        raise ValueError(f"grid must have a fixed ratio d/n, got {sorted(ratios)}")
    if abs(rho - 1.0) < 0.1 and not allow_near_one:
        raise ValueError(f"d/n = {rho} is within 0.1 of 1; pass allow_near_one to explore it")
    out = []
    for n, d in pts:
        cfg = ModelConfig(d, n, tau, seed)
        risk = mc_risk(ExperimentSpec(cfg, estimator_id, replicates), seed,
                       functional=functional, threads=threads)
        target = mp_law.asymptotic_risk(tau, d / n)
        out.append(ConvergencePoint(n, d, abs(risk.mean - target), risk.std_error,
                                    {"mc_risk": risk.mean, "asymptotic_risk": target}))
    slope, resid = fit_rate_exponent([p.n for p in out], [p.value for p in out])
    return ConvergenceReport(out, slope, -0.5, resid)


def adaptive_gap_study(grid, tau: float, *, replicates: int = 200, seed: int = 0,
                       threads: int = 1) -> ConvergenceReport:
    """Paired |R(adaptive) - R(oracle)| along a grid of (n, d)."""
    pts = _check_grid(grid)
    for n, d in pts:
        if not (abs(n - d) > 9 and n > 8):
            raise ValueError(f"grid point (n={n}, d={d}) violates |n - d| > 9 and n > 8")
    out = []
    for n, d in pts:
        cfg = ModelConfig(d, n, tau, seed)
        losses = simulate_losses(cfg, ["adaptive", "oracle"], replicates, seed=seed,
                                 threads=threads)
        ra = summarize(losses[:, 0], "adaptive/loss")
        ro = summarize(losses[:, 1], "oracle/loss")
        paired = summarize(losses[:, 0] - losses[:, 1], "adaptive-oracle/loss")
        unpaired = math.hypot(ra.std_error, ro.std_error)
        out.append(ConvergencePoint(n, d, abs(paired.mean), paired.std_error, {
            "adaptive_risk": ra.mean, "oracle_risk": ro.mean,
            "signed_gap": paired.mean, "unpaired_std_error": unpaired}))
    slope, resid = fit_rate_exponent([p.n for p in out], [p.value for p in out])
    return ConvergenceReport(out, slope, -0.5, resid)


def low_dim_sandwich_check(d: int, n: int, tau: float, replicates: int, *, seed: int = 0,
                           threads: int = 1) -> CheckReport:
    """E tr{(X^T X + d/tau^2 I)^-1} against [R0(tau, d/n), R0(tau, d/(n-d-1))].

    The lower end is Jensen on E X^T X = n I, the upper end Jensen on
    E tr{(X^T X)^-1} = d/(n-d-1).
    """
    if not d + 1 < n:
        raise ValueError(f"the low-dimensional sandwich needs d + 1 < n, got d={d}, n={n}")
    risk = mc_risk(ExperimentSpec(ModelConfig(d, n, tau, seed), "oracle", replicates), seed,
                   functional="trace", threads=threads)
    lower = mp_law.asymptotic_risk_low_dim(tau, d / n)
    upper = mp_law.asymptotic_risk_low_dim(tau, d / (n - d - 1))
    se = 0.0 if math.isnan(risk.std_error) else risk.std_error
    ok = lower - 3 * se <= risk.mean <= upper + 3 * se
    return CheckReport("low_dim_sandwich", bool(ok), {
        "d": d, "n": n, "tau": tau, "mean": risk.mean, "std_error": risk.std_error,
        "replicates": risk.replicates, "lower": lower, "upper": upper})


def high_dim_null_check(d: int, n: int, tau: float, replicates: int, *, seed: int = 0,
                        threads: int = 1) -> CheckReport:
    """Oracle ridge risk against the null risk tau^2 when d/n >= 10."""
    if d / n < 10:
        raise ValueError(f"the high-dimensional check needs d/n >= 10, got {d / n}")
    risk = mc_risk(ExperimentSpec(ModelConfig(d, n, tau, seed), "oracle", replicates), seed,
                   threads=threads)
    se = 0.0 if math.isnan(risk.std_error) else risk.std_error
    tol = max(3 * se, 0.1 * tau * tau)
    ok = abs(risk.mean - tau * tau) <= tol
    return CheckReport("high_dim_null", bool(ok), {
        "d": d, "n": n, "tau": tau, "mean": risk.mean, "std_error": risk.std_error,
        "replicates": risk.replicates, "target": tau * tau, "tolerance": tol})
