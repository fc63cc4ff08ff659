"""Command-line frontend.

Subcommands: ``mp``, ``risk-curve``, ``simulate``, ``fit``, ``spectra``.

Settings are resolved as: command-line flags, then the ``--config`` file
(an INI file; ``[run]`` holds global settings, a section named after the
subcommand holds its options, keys spelled like the flags without the leading
dashes), then built-in defaults.  ``simulate`` takes its experiment file as a
positional argument; that file has the same ``[run]`` section plus one
``[experiment <name>]`` section per experiment.

Every output embeds the resolved configuration.  Floats are written in the
shortest representation that round-trips.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, estimators, experiments, mp_law, spectra
from .model import IngestionError, ModelConfig, generate, load_dataset, replicate_rng, \
    sample_sphere

EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3
GRID_FLAGS = ("--z-grid", "--s-grid", "--tau-grid", "--rho-grid")


class UsageError(Exception):
    pass


@dataclass
class Result:
    config: dict
    records: list
    summary: dict = field(default_factory=dict)
    failed_checks: int = 0


# ---------------------------------------------------------------- parsing helpers

def parse_grid(text: str) -> list[float]:
    """'start:end:count' (inclusive) or a comma separated list ('inf' allowed)."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid {text!r} must look like start:end:count")
        try:
            start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"grid {text!r} must look like start:end:count") from None
        if count < 1 or (count == 1 and start != end):
            raise UsageError(f"grid {text!r} needs count >= 2 unless start == end")
        if not (math.isfinite(start) and math.isfinite(end)):
            raise UsageError(f"grid {text!r} endpoints must be finite")
        return [float(v) for v in np.linspace(start, end, count)]
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None
    if not vals:
        raise UsageError("empty list")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def _seed(text) -> int:
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text) -> int:
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid positive integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a finite positive number, got {text}")
    return v


def _nonneg_float(text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (v >= 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a finite nonnegative number, got {text}")
    return v


def _ridge_t(text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid ridge parameter {text!r}") from None
    if math.isnan(v) or v < 0.0:
        raise argparse.ArgumentTypeError("ridge parameter t must lie in [0, inf]")
    return v


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def render(result: Result, fmt: str) -> str:
    if fmt == "json":
        doc = {"version": __version__, "config": result.config, "summary": result.summary,
               "records": result.records}
        return json.dumps(_jsonable(doc), indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# ridgeminimax {__version__}\n")
    buf.write("# config: " + json.dumps(_jsonable(result.config), allow_nan=False) + "\n")
    if result.summary:
        buf.write("# summary: " + json.dumps(_jsonable(result.summary), allow_nan=False) + "\n")
    columns: list[str] = []
    for rec in result.records:
        for k in rec:
            if k not in columns:
                columns.append(k)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in result.records:
        w.writerow([_fmt(rec.get(c)) for c in columns])
    return buf.getvalue()


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- commands

def cmd_mp(args) -> Result:
    try:
        sup = mp_law.mp_support(args.rho)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg = {"command": "mp", "rho": args.rho}
    if args.stieltjes:
        grid = parse_grid(args.s_grid)
        if any(s >= 0.0 for s in grid):
            raise UsageError("the Stieltjes grid must be strictly negative")
        cfg["s_grid"] = args.s_grid
        records = [{"s": s, "stieltjes": mp_law.mp_stieltjes(args.rho, s)} for s in grid]
    else:
        grid = parse_grid(args.z_grid if args.z_grid else f"0:{1.05 * sup.b!r}:201")
        cfg["z_grid"] = args.z_grid
        records = [{"z": z, "density": mp_law.mp_density(args.rho, z),
                    "cdf": mp_law.mp_cdf(args.rho, z)} for z in grid]
    summary = {"a": sup.a, "b": sup.b, "point_mass_at_zero": sup.point_mass_at_zero}
    return Result(cfg, records, summary)


def cmd_risk_curve(args) -> Result:
    taus = parse_grid(args.tau_grid)
    rhos = parse_grid(args.rho_grid)
    if any(not (t >= 0.0 and math.isfinite(t)) for t in taus):
        raise UsageError("tau values must be finite and >= 0")
    if any(not r >= 0.0 for r in rhos):
        raise UsageError("rho values must be >= 0")
    if math.inf not in rhos:
        rhos = rhos + [math.inf]
    records = []
    for tau in taus:
        for rho in rhos:
            if math.isinf(rho):
                low = tau * tau
            else:
                low = mp_law.asymptotic_risk_low_dim(tau, rho)
            records.append({"tau": tau, "rho": "inf" if math.isinf(rho) else rho,
                            "asymptotic_risk": mp_law.asymptotic_risk(tau, rho),
                            "low_dim_risk": low})
    return Result({"command": "risk-curve", "tau_grid": args.tau_grid,
                   "rho_grid": args.rho_grid}, records)


def cmd_fit(args) -> Result:
    try:
        data = load_dataset(args.dataset)
    except IngestionError as exc:
        raise UsageError(str(exc)) from None
    summary = {"estimator": args.estimator, "n": data.n, "d": data.d}
    if args.estimator == "adaptive":
        e = estimators.adaptive_ridge(data)
        summary["tau_hat"] = e.tau_hat
    elif args.estimator == "ridge":
        if args.t is None:
            raise UsageError("--estimator ridge requires --t")
        e = estimators.ridge(data, args.t)
    elif args.estimator == "ols":
        e = estimators.ols(data)
    else:
        e = estimators.null_estimate(data.d)
    summary["t"] = e.t
    resid = data.y - data.x @ e.beta_hat
    summary["residual_norm"] = float(np.linalg.norm(resid))
    records = [{"index": j + 1, "beta_hat": float(b)} for j, b in enumerate(e.beta_hat)]
    cfg = {"command": "fit", "dataset": str(args.dataset), "estimator": args.estimator,
           "t": args.t}
    return Result(cfg, records, summary)


def cmd_spectra(args) -> Result:
    cfg = ModelConfig(args.d, args.n, args.tau, args.seed)
    rng = replicate_rng(args.seed, 0, (args.d, args.n))
    beta = sample_sphere(args.d, args.tau, rng)
    data = generate(cfg, beta, rng)
    sp = spectra.spectrum(data)
    summary = {"ks_distance": spectra.esd_kolmogorov_distance(sp),
               "exact_ridge_risk": spectra.exact_ridge_risk(sp, args.tau),
               "zero_eigenvalues": int(np.sum(sp.eigenvalues == 0.0))}
    records = [{"index": j + 1, "eigenvalue": float(s)} for j, s in enumerate(sp.eigenvalues)]
    return Result({"command": "spectra", "d": args.d, "n": args.n, "tau": args.tau,
                   "seed": args.seed}, records, summary)


# ---------------------------------------------------------------- simulate

def _get(section, key, conv, default=None, required=False):
    if key not in section:
        if required:
            raise UsageError(f"[{section.name}] is missing required key {key!r}")
        return default
    try:
        return conv(section[key])
    except (ValueError, UsageError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"[{section.name}] {key}: {exc}") from None


def _float(text) -> float:
    return float(text)


def _bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"invalid boolean {text!r}")


def _str_list(text) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


_KIND_KEYS = {
    "mc_risk": {"d", "n", "tau", "estimators", "functionals", "replicates", "beta", "check",
                "floor"},
    "risk_vs_asymptotic": {"rho", "tau", "n", "estimator", "functional", "replicates",
                           "allow_near_one", "exponent_range"},
    "adaptive_gap": {"rho", "tau", "n", "replicates", "max_final_gap"},
    "low_dim_sandwich": {"d", "n", "tau", "replicates"},
    "high_dim_null": {"d", "n", "tau", "replicates"},
}


def _dims_for(rho: float, ns: list[int]) -> list[tuple[int, int]]:
    out = []
    for n in ns:
        d = rho * n
        if abs(d - round(d)) > 1e-9 or round(d) < 1:
            raise UsageError(f"rho={rho} and n={n} do not give an integer d")
        out.append((n, int(round(d))))
    return out


def _plan_experiment(name: str, sec, seed: int, threads: int):
    """Validate one experiment section and return a zero-argument runner."""
    kind = sec.get("kind")
    if kind not in _KIND_KEYS:
        raise UsageError(f"[{sec.name}] unknown kind {kind!r}; expected one of {sorted(_KIND_KEYS)}")
    unknown = set(sec.keys()) - _KIND_KEYS[kind] - {"kind"}
    if unknown:
        raise UsageError(f"[{sec.name}] unknown keys: {', '.join(sorted(unknown))}")
    reps = _get(sec, "replicates", _positive_int, 200)
    tau = _get(sec, "tau", _nonneg_float, 1.0)
    base = {"experiment": name, "kind": kind, "tau": tau, "seed": seed}

    if kind == "mc_risk":
        d = _get(sec, "d", _positive_int, required=True)
        n = _get(sec, "n", _positive_int, required=True)
        ests = _get(sec, "estimators", _str_list, ["oracle"])
        funcs = _get(sec, "functionals", _str_list, ["loss"])
        beta = _get(sec, "beta", str, "sphere")
        check = _get(sec, "check", str, None)
        floor = _get(sec, "floor", _nonneg_float, 0.0)
        try:
            cfg = ModelConfig(d, n, tau, seed)
            for e in ests:
                experiments.parse_estimator(e)
        except ValueError as exc:
            raise UsageError(f"[{sec.name}] {exc}") from None
        for f in funcs:
            if f not in experiments.FUNCTIONALS:
                raise UsageError(f"[{sec.name}] unknown functional {f!r}")
            if f == "trace" and "adaptive" in ests:
                raise UsageError(f"[{sec.name}] trace functional is not available for adaptive")
        if beta not in ("sphere", "axis"):
            raise UsageError(f"[{sec.name}] beta must be 'sphere' or 'axis'")
        if check not in (None, "asymptotic"):
            raise UsageError(f"[{sec.name}] check must be 'asymptotic'")
        mode = "sphere" if beta == "sphere" else np.eye(d)[0] * tau

        def run():
            out = []
            for f in funcs:
                t0 = time.perf_counter()
                losses = experiments.simulate_losses(cfg, ests, reps, beta_mode=mode,
                                                     functional=f, seed=seed, threads=threads)
                wall = (time.perf_counter() - t0) / len(ests)
                for k, e in enumerate(ests):
                    r = experiments.summarize(losses[:, k], f"{e}/{f}")
                    rec = dict(base, d=d, n=n, estimator=e, functional=f, mean=r.mean,
                               std_error=r.std_error, replicates=r.replicates)
                    if check == "asymptotic" and e == "oracle":
                        target = mp_law.asymptotic_risk(tau, d / n)
                        tol = max(3 * r.std_error, floor)
                        rec.update(target=target, tolerance=tol,
                                   passed=abs(r.mean - target) <= tol)
                    rec["wall_time"] = wall
                    out.append(rec)
            return out
        return run

    if kind in ("risk_vs_asymptotic", "adaptive_gap"):
        rho = _get(sec, "rho", _positive_float, required=True)
        ns = _get(sec, "n", _int_list, required=True)
        grid = _dims_for(rho, ns)
        try:
            experiments._check_grid(grid)
        except ValueError as exc:
            raise UsageError(f"[{sec.name}] {exc}") from None

        if kind == "risk_vs_asymptotic":
            est = _get(sec, "estimator", str, "oracle")
            func = _get(sec, "functional", str, "loss")
            near = _get(sec, "allow_near_one", _bool, False)
            rng_ = _get(sec, "exponent_range", parse_grid, None)
            try:
                experiments.parse_estimator(est)
            except ValueError as exc:
                raise UsageError(f"[{sec.name}] {exc}") from None
            if func not in experiments.FUNCTIONALS or (func == "trace" and est == "adaptive"):
                raise UsageError(f"[{sec.name}] invalid functional {func!r} for {est!r}")
            if abs(rho - 1.0) < 0.1 and not near:
                raise UsageError(f"[{sec.name}] rho within 0.1 of 1 needs allow_near_one = true")
            if rng_ is not None and len(rng_) != 2:
                raise UsageError(f"[{sec.name}] exponent_range must be 'low, high'")

            def run():
                t0 = time.perf_counter()
                rep = experiments.risk_vs_asymptotic(grid, tau, est, replicates=reps, seed=seed,
                                                     threads=threads, functional=func,
                                                     allow_near_one=near)
                wall = (time.perf_counter() - t0) / len(grid)
                passed = None
                if rng_ is not None:
                    passed = bool(rng_[0] <= rep.fitted_rate_exponent <= rng_[1])
                out = []
                for p in rep.grid:
                    rec = dict(base, d=p.d, n=p.n, estimator=est, functional=func,
                               mean=p.extra["mc_risk"], std_error=p.std_error, replicates=reps,
                               asymptotic_risk=p.extra["asymptotic_risk"], gap=p.value,
                               fitted_exponent=rep.fitted_rate_exponent,
                               reference_exponent=rep.reference_exponent)
                    if passed is not None:
                        rec["passed"] = passed
                    rec["wall_time"] = wall
                    out.append(rec)
                return out
            return run

        max_gap = _get(sec, "max_final_gap", _positive_float, None)
        for n, d in grid:
            if not (abs(n - d) > 9 and n > 8):
                raise UsageError(f"[{sec.name}] (n={n}, d={d}) violates |n - d| > 9 and n > 8")

        def run():
            t0 = time.perf_counter()
            rep = experiments.adaptive_gap_study(grid, tau, replicates=reps, seed=seed,
                                                 threads=threads)
            wall = (time.perf_counter() - t0) / len(grid)
            gaps = [p.value for p in rep.grid]
            passed = all(b < a for a, b in zip(gaps, gaps[1:]))
            if max_gap is not None:
                passed = passed and gaps[-1] < max_gap
            out = []
            for p in rep.grid:
                out.append(dict(base, d=p.d, n=p.n, estimator="adaptive-oracle",
                                functional="loss", mean=p.extra["signed_gap"],
                                std_error=p.std_error, replicates=reps, gap=p.value,
                                adaptive_risk=p.extra["adaptive_risk"],
                                oracle_risk=p.extra["oracle_risk"],
                                unpaired_std_error=p.extra["unpaired_std_error"],
                                fitted_exponent=rep.fitted_rate_exponent,
                                reference_exponent=rep.reference_exponent,
                                passed=passed, wall_time=wall))
            return out
        return run

    d = _get(sec, "d", _positive_int, required=True)
    n = _get(sec, "n", _positive_int, required=True)
    if kind == "low_dim_sandwich" and not d + 1 < n:
        raise UsageError(f"[{sec.name}] low_dim_sandwich needs d + 1 < n")
    if kind == "high_dim_null" and d / n < 10:
        raise UsageError(f"[{sec.name}] high_dim_null needs d/n >= 10")
    check_fn = (experiments.low_dim_sandwich_check if kind == "low_dim_sandwich"
                else experiments.high_dim_null_check)

    def run():
        t0 = time.perf_counter()
        rep = check_fn(d, n, tau, reps, seed=seed, threads=threads)
        v = dict(rep.values)
        rec = dict(base, d=d, n=n, estimator="oracle",
                   functional="trace" if kind == "low_dim_sandwich" else "loss",
                   mean=v.pop("mean"), std_error=v.pop("std_error"),
                   replicates=v.pop("replicates"))
        for k in ("d", "n", "tau"):
            v.pop(k, None)
        rec.update(v)
        rec["passed"] = rep.passed
        rec["wall_time"] = time.perf_counter() - t0
        return [rec]
    return run


def load_experiment_file(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read experiment file {path}: {exc}") from None
    except configparser.Error as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from None
    return cp


def cmd_simulate(args) -> Result:
    cp = load_experiment_file(args.spec)
    for sec in cp.sections():
        if sec != "run" and not sec.startswith("experiment "):
            raise UsageError(f"unknown section [{sec}] in {args.spec}")
    names = [s.split(None, 1)[1].strip() for s in cp.sections() if s.startswith("experiment ")]
    if not names:
        raise UsageError(f"{args.spec} defines no [experiment <name>] sections")
    plans = [(name, _plan_experiment(name, cp[f"experiment {name}"], args.seed, args.threads))
             for name in names]
    records = []
    for _, run in plans:
        records.extend(run())
    failed = sum(1 for r in records if r.get("passed") is False)
    resolved = {"command": "simulate", "spec": str(args.spec), "seed": args.seed,
                "threads": args.threads,
                "experiments": {n: dict(cp[f"experiment {n}"]) for n in names}}
    return Result(resolved, records, {"failed_checks": failed}, failed)


# ---------------------------------------------------------------- argument parsing

_GLOBAL_DEFAULTS = {"seed": 0, "threads": 1, "format": "csv", "out": None, "strict": False,
                    "config": None}


def _add_globals(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=_seed, default=s, help="root seed (unsigned 64-bit)")
    p.add_argument("--threads", type=_positive_int, default=s, help="worker threads")
    p.add_argument("--format", choices=("csv", "json"), default=s)
    p.add_argument("--out", default=s, help="output path (default stdout)")
    p.add_argument("--strict", action="store_true", default=s,
                   help="exit nonzero when a statistical check fails")
    p.add_argument("--config", default=s, help="INI file with [run] and per-command sections")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridgeminimax",
        description="Ridge regression risk theory under the Marchenko-Pastur law.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mp", help="tabulate MP density/CDF or Stieltjes transform")
    _add_globals(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--z-grid", default=None, help="start:end:count (default 0 to 1.05 b)")
    p.add_argument("--stieltjes", action="store_true", help="tabulate m_rho(s) instead")
    p.add_argument("--s-grid", default="-10:-0.01:100")
    p.set_defaults(func=cmd_mp)

    p = sub.add_parser("risk-curve", help="asymptotic oracle ridge risk over tau x rho")
    _add_globals(p)
    p.add_argument("--tau-grid", default="0:3:31")
    p.add_argument("--rho-grid", default="0.1,0.25,0.5,1,2,4,10")
    p.set_defaults(func=cmd_risk_curve)

    p = sub.add_parser("simulate", help="run Monte Carlo experiments from an INI file")
    _add_globals(p)
    p.add_argument("spec", help="experiment file (INI)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit an estimator to a CSV dataset")
    _add_globals(p)
    p.add_argument("dataset")
    p.add_argument("--estimator", choices=("adaptive", "ridge", "ols", "null"),
                   default="adaptive")
    p.add_argument("--t", type=_ridge_t, default=None, help="ridge parameter (0..inf)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("spectra", help="spectrum of one simulated design")
    _add_globals(p)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--tau", type=_nonneg_float, default=1.0)
    p.set_defaults(func=cmd_spectra)
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    # grid values may start with '-', which argparse would read as a flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in GRID_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _apply_config_file(parser, args, argv) -> None:
    path = getattr(args, "config", None)
    if path is None:
        return
    cp = load_experiment_file(path)
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub_action.choices[args.command]
    known = {a.dest: a for a in subparser._actions if a.dest not in ("help", "func")}
    explicit = {a.dest for a in subparser._actions
                for opt in a.option_strings
                if any(t == opt or t.startswith(opt + "=") for t in argv)}
    for sec_name in cp.sections():
        if sec_name not in ("run", args.command) and not (
                args.command == "simulate" and sec_name.startswith("experiment ")):
            raise UsageError(f"{path}: unknown section [{sec_name}]")
    for sec_name in ("run", args.command):
        if not cp.has_section(sec_name):
            continue
        for key, raw in cp[sec_name].items():
            dest = key.replace("-", "_")
            if sec_name == "run" and dest not in _GLOBAL_DEFAULTS:
                raise UsageError(f"{path}: unknown key {key!r} in [run]")
            if dest not in known or dest == "config":
                raise UsageError(f"{path}: unknown key {key!r} in [{sec_name}]")
            if dest in explicit:
                continue
            action = known[dest]
            if isinstance(action, argparse._StoreTrueAction):
                val = _bool(raw)
            elif action.type is not None:
                try:
                    val = action.type(raw)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"{path}: {key}: {exc}") from None
            else:
                val = raw
            if action.choices is not None and val not in action.choices:
                raise UsageError(f"{path}: {key} must be one of {list(action.choices)}")
            setattr(args, dest, val)


def main(argv: list[str] | None = None) -> int:
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(parser, args, argv)
        if args.command == "simulate":
            # the experiment file's [run] section fills settings not given elsewhere
            run = load_experiment_file(args.spec)
            if run.has_section("run"):
                for key, raw in run["run"].items():
                    dest = key.replace("-", "_")
                    if dest not in _GLOBAL_DEFAULTS or dest == "config":
                        raise UsageError(f"{args.spec}: unknown key {key!r} in [run]")
                    if not hasattr(args, dest):
                        conv = {"seed": _seed, "threads": _positive_int, "strict": _bool}
                        try:
                            setattr(args, dest, conv.get(dest, str)(raw))
                        except (argparse.ArgumentTypeError, ValueError) as exc:
                            raise UsageError(f"{args.spec}: {key}: {exc}") from None
        for k, v in _GLOBAL_DEFAULTS.items():
            if not hasattr(args, k):
                setattr(args, k, v)
        if args.format not in ("csv", "json"):
            raise UsageError(f"--format must be csv or json, got {args.format!r}")
        result = args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"ridgeminimax: error: {exc}\n")
    except experiments.ExperimentError as exc:
        parser.exit(1, f"ridgeminimax: experiment failed: {exc}\n")
    result.config = dict(result.config, seed=args.seed, threads=args.threads, format=args.format)
    _write(render(result, args.format), args.out)
    if args.strict and result.failed_checks:
        return EXIT_CHECK_FAILED
    return 0


if __name__ == "__main__":
    sys.exit(main())
