import math

import numpy as np
import pytest

from ridgeminimax.experiments import (
    ExperimentError,
    ExperimentSpec,
    adaptive_gap_study,
    fit_rate_exponent,
    high_dim_null_check,
    low_dim_sandwich_check,
    mc_risk,
    parse_estimator,
    risk_vs_asymptotic,
    simulate_losses,
    summarize,
)
from ridgeminimax.model import ModelConfig
from ridgeminimax.mp_law import asymptotic_risk


def test_parse_estimator():
    assert parse_estimator("oracle") == ("oracle", None)
    assert parse_estimator("ridge:0.5") == ("ridge", 0.5)
    assert parse_estimator("ridge:inf") == ("ridge", math.inf)
    for bad in ("ridge:-1", "ridge:abc", "lasso", ""):
        with pytest.raises(ValueError):
            parse_estimator(bad)


def test_summarize():
    r = summarize([1.0, 2.0, 3.0, 4.0], "x")
    assert r.mean == 2.5
    assert r.std_error == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert math.isnan(summarize([1.0], "x").std_error)


def test_spec_validation():
    cfg = ModelConfig(3, 5)
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, replicates=0)
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, beta_mode=np.ones(2))
    with pytest.raises(ValueError):
        ExperimentSpec(cfg, beta_mode="axis")
    assert ExperimentSpec(cfg, beta_mode=[3.0, 4.0, 0.0]).signal_strength == 5.0


class TestMcRisk:
    def test_null_fixed_beta(self):
        beta = np.array([1.0, -2.0, 0.5])
        r = mc_risk(ExperimentSpec(ModelConfig(3, 10), "null", 50, beta))
        assert r.mean == pytest.approx(beta @ beta, rel=1e-15)
        assert r.std_error == 0.0

    def test_loss_matches_trace(self):
        cfg = ModelConfig(200, 400, 1.0, 3)
        loss = mc_risk(ExperimentSpec(cfg, "oracle", 2000), 3, functional="loss")
        trace = mc_risk(ExperimentSpec(cfg, "oracle", 2000), 4, functional="trace")
        assert abs(loss.mean - trace.mean) < 3 * math.hypot(loss.std_error, trace.std_error)
        target = asymptotic_risk(1.0, 0.5)
        assert abs(loss.mean - target) < max(3 * loss.std_error, 0.02)

    @pytest.mark.parametrize("d,n,est", [(4, 12, "ols"), (12, 4, "ridge:0.7"), (5, 20, "null")])
    def test_loss_matches_trace_other(self, d, n, est):
        cfg = ModelConfig(d, n, 1.2, 0)
        loss = mc_risk(ExperimentSpec(cfg, est, 3000), 1)
        trace = mc_risk(ExperimentSpec(cfg, est, 3000), 2, functional="trace")
        se = math.hypot(loss.std_error, trace.std_error)
        assert abs(loss.mean - trace.mean) <= 3 * se + 1e-12

    @pytest.mark.parametrize("functional", ["loss", "trace"])
    def test_thread_invariance(self, functional):
        spec = ExperimentSpec(ModelConfig(8, 20, 1.0, 5), "oracle", 64)
        runs = [mc_risk(spec, 5, functional=functional, threads=k) for k in (1, 4, 8)]
        assert len({(r.mean, r.std_error) for r in runs}) == 1

    def test_thread_invariance_losses(self):
        cfg = ModelConfig(6, 15, 1.0, 2)
        ids = ["oracle", "adaptive", "ols", "null"]
        a = simulate_losses(cfg, ids, 40, threads=1)
        b = simulate_losses(cfg, ids, 40, threads=8)
        assert a.tobytes() == b.tobytes()

    def test_equivariant_constancy(self):
        d, n, tau = 10, 30, 1.5
        cfg = ModelConfig(d, n, tau, 0)
        b1 = np.zeros(d)
        b1[0] = tau
        b2 = np.full(d, tau / math.sqrt(d))
        r1 = mc_risk(ExperimentSpec(cfg, "oracle", 2000, b1), 10)
        r2 = mc_risk(ExperimentSpec(cfg, "oracle", 2000, b2), 11)
        assert abs(r1.mean - r2.mean) < 4 * math.hypot(r1.std_error, r2.std_error)

    def test_oracle_t_optimal(self):
        rng = np.random.default_rng(0)
        failures = 0
        for k in range(10):
            d = int(rng.integers(3, 30))
            n = int(rng.integers(3, 60))
            tau = float(rng.uniform(0.3, 3.0))
            ids = ["oracle", f"ridge:{tau / 2!r}", f"ridge:{2 * tau!r}"]
            losses = simulate_losses(ModelConfig(d, n, tau, k), ids, 300)
            for j in (1, 2):
                diff = summarize(losses[:, j] - losses[:, 0], "diff")
                failures += diff.mean < -2 * diff.std_error
        assert failures <= 1

    def test_trace_rejects_adaptive(self):
        with pytest.raises(ValueError):
            simulate_losses(ModelConfig(3, 5), ["adaptive"], 2, functional="trace")
        with pytest.raises(ValueError):
            simulate_losses(ModelConfig(3, 5), ["oracle"], 2, functional="exact")

    def test_failure_names_replicate(self, monkeypatch):
        from ridgeminimax import estimators

        real = estimators.ridge
        calls = []

        def flaky(data, t):
            calls.append(1)
            if len(calls) == 3:
                raise np.linalg.LinAlgError("not positive definite")
            return real(data, t)

        monkeypatch.setattr(estimators, "ridge", flaky)
        with pytest.raises(ExperimentError, match="replicate 2"):
            simulate_losses(ModelConfig(2, 4), ["oracle"], 5)

    def test_tridiagonal_matches_design(self):
        for d, n, est in [(20, 40, "oracle"), (40, 20, "oracle"), (20, 40, "ols")]:
            cfg = ModelConfig(d, n, 1.0, 0)
            tri = mc_risk(ExperimentSpec(cfg, est, 20_000), 0, functional="trace-tridiagonal")
            dense = mc_risk(ExperimentSpec(cfg, est, 2000), 0, functional="trace")
            assert abs(tri.mean - dense.mean) < 4 * math.hypot(tri.std_error, dense.std_error)

    def test_tridiagonal_ols_mean(self):
        r = mc_risk(ExperimentSpec(ModelConfig(2, 10), "ols", 20_000), 0,
                    functional="trace-tridiagonal")
        assert abs(r.mean - 2 / 7) < 3 * r.std_error


class TestRiskVsAsymptotic:
    @pytest.mark.parametrize("rho", [0.5, 2.0])
    def test_rate_bracket(self, rho):
        grid = [(n, int(rho * n)) for n in (100, 200, 400, 800)]
        rep = risk_vs_asymptotic(grid, 1.0, replicates=20_000, functional="trace-tridiagonal")
        assert [p.n for p in rep.grid] == [100, 200, 400, 800]
        assert -1.0 <= rep.fitted_rate_exponent <= -0.2
        assert rep.reference_exponent == -0.5
        assert len(rep.residuals) == 4

    def test_zero_signal(self):
        grid = [(n, n // 2) for n in (20, 40, 80)]
        rep = risk_vs_asymptotic(grid, 0.0, replicates=5)
        assert all(p.value == 0.0 for p in rep.grid)
        assert math.isnan(rep.fitted_rate_exponent)

    def test_grid_errors(self):
        with pytest.raises(ValueError):
            risk_vs_asymptotic([(20, 10), (40, 20)], 1.0)
        with pytest.raises(ValueError):
            risk_vs_asymptotic([(20, 10), (40, 30), (80, 40)], 1.0)
        with pytest.raises(ValueError):
            risk_vs_asymptotic([(20, 20), (40, 40), (80, 80)], 1.0)
        rep = risk_vs_asymptotic([(20, 20), (40, 40), (80, 80)], 1.0, replicates=3,
                                 functional="trace", allow_near_one=True)
        assert len(rep.grid) == 3


def test_fit_rate_exponent():
    ns = [10, 100, 1000]
    slope, resid = fit_rate_exponent(ns, [3 * n**-0.5 for n in ns])
    assert slope == pytest.approx(-0.5, abs=1e-12)
    assert max(abs(r) for r in resid) < 1e-12
    assert math.isnan(fit_rate_exponent(ns, [1.0, 0.0, 1.0])[0])


class TestAdaptiveGap:
    def test_zero_signal(self):
        grid = [(n, n // 2) for n in (100, 200, 400)]
        rep = adaptive_gap_study(grid, 0.0, replicates=200)
        assert rep.grid[-1].value < 0.05

    def test_pairing_reduces_error(self):
        rep = adaptive_gap_study([(n, n // 2) for n in (40, 80, 160)], 1.0, replicates=200)
        for p in rep.grid:
            assert p.std_error < p.extra["unpaired_std_error"]
            assert p.value == abs(p.extra["signed_gap"])

    def test_grid_preconditions(self):
        with pytest.raises(ValueError):
            adaptive_gap_study([(20, 15), (40, 20), (80, 40)], 1.0)
        with pytest.raises(ValueError):
            adaptive_gap_study([(20, 10), (40, 20)], 1.0)


class TestSandwich:
    @pytest.mark.parametrize("d,n,tau", [(10, 1000, 1.0), (50, 100, 2.0)])
    def test_contained(self, d, n, tau):
        rep = low_dim_sandwich_check(d, n, tau, 500)
        assert rep.passed
        assert rep.values["lower"] < rep.values["mean"] < rep.values["upper"] + 3 * rep.values["std_error"]

    def test_vanishing_signal(self):
        rep = low_dim_sandwich_check(5, 50, 1e-6, 20)
        v = rep.values
        assert max(v["mean"], v["lower"], v["upper"]) < 1e-11

    def test_precondition(self):
        with pytest.raises(ValueError):
            low_dim_sandwich_check(10, 11, 1.0, 5)


class TestHighDimNull:
    def test_near_null_risk(self):
        rep = high_dim_null_check(2000, 100, 1.0, 100)
        assert rep.passed
        assert 0.9 <= rep.values["mean"] <= 1.0

    def test_zero_signal(self):
        rep = high_dim_null_check(200, 10, 0.0, 5)
        assert rep.values["mean"] == 0.0 and rep.passed

    def test_larger_ratio_is_tighter(self):
        r10 = high_dim_null_check(1000, 100, 1.0, 100, seed=1)
        r50 = high_dim_null_check(5000, 100, 1.0, 100, seed=2)
        assert abs(r50.values["mean"] - 1.0) < abs(r10.values["mean"] - 1.0)

    def test_precondition(self):
        with pytest.raises(ValueError):
            high_dim_null_check(50, 10, 1.0, 5)
