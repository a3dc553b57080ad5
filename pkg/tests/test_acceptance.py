"""Acceptance suite: one test per exit criterion, at its stated tolerance.

Each test prints one `[ACCEPTANCE] <criterion>: PASS` line on success
(visible with ``pytest -s`` or in captured output); a failure is loud by
construction.  Data-dependent criteria run against the real daily file
when present and the synthetic stand-in otherwise (the properties they
check are data-independent; see conftest).
"""

import datetime as dt
import itertools
import time

import numpy as np
import pytest

import published_wql
from horizonbench import arima
from horizonbench.data import DailySeries, load_daily_csv
from horizonbench.decomp import DecompConfig, fit_decomposition
from horizonbench.forecast import (
    FORECASTER_KINDS,
    ForecasterSpec,
    QuantileForecast,
    TokenizerConfig,
    detokenize,
    forecast,
    tokenize,
)
from horizonbench.metrics import emd_1d, emd_quantile_mean, mase, wql
from horizonbench.report import degradation_hypotheses
from horizonbench.runner import RunConfig, run
from horizonbench.scenarios import default_target, make_scenario, slice_scenario

DAY0 = dt.date(2012, 1, 1)
RATIOS = (2, 3, 4, 5)


def report_pass(name: str) -> None:
    print(f"[ACCEPTANCE] {name}: PASS")


def test_degradation_arithmetic_reproduction():
    """Published WQL tables reproduce the published degradation tables
    to +-0.15 percentage points under the July/Q4 column-swap hypothesis."""
    checked = 0
    for model in ("arima", "prophet", "chronos"):
        wql_by_ratio = {r: published_wql.WQL[r][model] for r in RATIOS}
        swapped = degradation_hypotheses(wql_by_ratio, baseline=2)["swapped"]
        for target, by_model in published_wql.EXPECTED_DEGRADATION.items():
            for cls, expected in by_model[model].items():
                for ratio, value in zip((3, 4, 5), expected):
                    got = swapped[f"{target}_{cls}"][(target, cls, ratio)]
                    assert got == pytest.approx(value, abs=0.15), (
                        f"{model} {target} {cls} {ratio}:1 -> {got:+.2f}, "
                        f"published {value:+.1f}"
                    )
                    checked += 1
    assert checked == 36  # 3 models x 2 targets x 2 classes x 3 ratios
    for base, value, expected in published_wql.SPOT_ANCHORS:
        got = (value - base) / base * 100.0
        assert got == pytest.approx(expected, abs=0.15)
    report_pass("degradation arithmetic reproduction (36 entries, +-0.15pp)")


def test_seasonal_naive_ratio_invariance(bench_day_csv_path):
    """For each fixed target and class, seasonal-naive WQL and EMD are
    bit-identical across ratios 2:1-5:1 while MASE varies."""
    spec = ForecasterSpec("seasonal_naive")
    for target_name, cls in itertools.product(
        ("week10", "july", "q4"), ("casual", "registered")
    ):
        series = load_daily_csv(bench_day_csv_path, cls)
        wqls, emds, mases = [], [], []
        for ratio in RATIOS:
            scenario = make_scenario(default_target(target_name), cls, ratio)
            context, actuals = slice_scenario(series, scenario)
            qf = forecast(spec, context, scenario.target.horizon_days)
            wqls.append(wql(actuals.values, qf))
            emds.append(emd_quantile_mean(actuals.values, qf))
            mases.append(mase(actuals.values, qf.median, context.values))
        assert len(set(wqls)) == 1, f"WQL varies for {target_name}/{cls}: {wqls}"
        assert len(set(emds)) == 1, f"EMD varies for {target_name}/{cls}: {emds}"
        assert len(set(mases)) > 1, f"MASE constant for {target_name}/{cls}"
    report_pass("seasonal-naive WQL/EMD exactly ratio-invariant, MASE varies")


def test_full_matrix_run_deterministic_within_budget(bench_day_csv_path, tmp_path):
    """96 cells complete in under 10 minutes; two runs are byte-identical."""
    budget_seconds = 600.0
    results = []
    for label in ("one", "two"):
        config = RunConfig(
            data_path=str(bench_day_csv_path),
            out_dir=str(tmp_path / label),
            seed=0,
            jobs=0,  # available parallelism, as a batch user would run it
        )
        start = time.monotonic()
        result = run(config)
        elapsed = time.monotonic() - start
        assert elapsed < budget_seconds, f"run took {elapsed:.0f}s"
        assert result.ok, [f.error for f in result.failures]
        assert len(result.cells) == 96
        results.append((elapsed, (tmp_path / label / "results.csv").read_bytes()))
    assert results[0][1] == results[1][1], "reruns are not byte-identical"
    report_pass(
        f"full matrix: 96 cells in {results[0][0]:.1f}s/{results[1][0]:.1f}s, "
        "byte-identical reruns"
    )


def test_metric_property_suite():
    """Zero-on-perfect, non-negativity, scale invariance, EMD symmetry and
    triangle inequality on 1,000 random fixtures; WQL matches an
    independent pinball oracle to 1e-12; MASE hand value 1/7 exact."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        horizon = int(rng.integers(2, 24))
        actuals = rng.uniform(0.5, 100.0, horizon)
        rows = np.sort(rng.uniform(0.0, 120.0, (9, horizon)), axis=0)
        rows[rows.sum(axis=1) == 0.0] += 1e-6
        qf = QuantileForecast(DAY0, rows)
        context = rng.uniform(0.5, 100.0, int(rng.integers(9, 40)))

        w = wql(actuals, qf)
        e = emd_quantile_mean(actuals, qf)
        m = mase(actuals, qf.median, context)
        assert w >= 0.0 and e >= 0.0 and m >= 0.0
        assert np.isfinite([w, e, m]).all()

        # zero iff perfect
        perfect = QuantileForecast(DAY0, np.tile(actuals, (9, 1)))
        assert wql(actuals, perfect) == 0.0
        assert emd_quantile_mean(actuals, perfect) == 0.0
        assert mase(actuals, actuals.copy(), context) == 0.0

        # common positive scaling
        c = float(rng.uniform(0.25, 8.0))
        scaled_qf = QuantileForecast(DAY0, c * rows)
        assert wql(c * actuals, scaled_qf) == pytest.approx(w, rel=1e-9)
        assert mase(c * actuals, c * qf.median, c * context) == pytest.approx(
            m, rel=1e-9
        )
        assert emd_quantile_mean(c * actuals, qf) == pytest.approx(e, rel=1e-9)

        # independent pinball oracle
        oracle_terms = []
        for tau, row in zip(qf.levels, rows):
            diff = actuals - row
            pinball = np.maximum(tau * diff, (tau - 1.0) * diff)
            oracle_terms.append(2.0 * pinball.sum() / np.abs(actuals).sum())
        assert w == pytest.approx(float(np.mean(oracle_terms)), abs=1e-12)

        # EMD symmetry + triangle on unit-mass densities
        p, q, r = (rng.uniform(0.0, 1.0, horizon) + 1e-9 for _ in range(3))
        p, q, r = p / p.sum(), q / q.sum(), r / r.sum()
        assert emd_1d(p, q) == pytest.approx(emd_1d(q, p), abs=1e-13)
        assert emd_1d(p, r) <= emd_1d(p, q) + emd_1d(q, r) + 1e-12

    hand = mase(
        np.array([15.0, 16.0, 17.0]),
        np.array([14.0, 15.0, 16.0]),
        np.arange(1.0, 15.0),
        7,
    )
    assert hand == 1.0 / 7.0
    report_pass("metric properties on 1,000 fixtures; WQL oracle 1e-12; MASE 1/7")


def test_arima_recovery_and_qualitative_direction(bench_day_csv_path):
    """AR(1) 0.7 and MA(1) 0.5 recovered within +-0.1 at n=500; select_d
    separates white noise from a random walk; every fit keeps its roots
    outside the unit circle; July-registered WQL degrades 2:1 -> 4:1."""
    rng = np.random.default_rng(42)
    e = rng.normal(0, 1, 700)
    x = np.zeros(700)
    for t in range(1, 700):
        x[t] = 0.7 * x[t - 1] + e[t]
    params_ar, _ = arima.fit(x[200:], arima.ArimaOrder(1, 0, 0))
    assert abs(params_ar.phi[0] - 0.7) <= 0.1

    rng = np.random.default_rng(43)
    e = rng.normal(0, 1, 501)
    y = e[1:] + 0.5 * e[:-1]
    params_ma, _ = arima.fit(y, arima.ArimaOrder(0, 0, 1))
    assert abs(params_ma.theta[0] - 0.5) <= 0.1

    rng = np.random.default_rng(42)
    assert arima.select_d(rng.normal(0, 1, 500)) == 0
    rng = np.random.default_rng(42)
    assert arima.select_d(np.cumsum(rng.normal(0, 1, 500))) == 1

    for params in (params_ar, params_ma):
        assert arima._min_root_modulus(params) > 1.0

    series = load_daily_csv(bench_day_csv_path, "registered")
    wqls = {}
    for ratio in (2, 4):
        scenario = make_scenario(default_target("july"), "registered", ratio)
        context, actuals = slice_scenario(series, scenario)
        qf = forecast(ForecasterSpec("arima"), context, 31)
        wqls[ratio] = wql(actuals.values, qf)
    assert wqls[4] > wqls[2], f"no degradation: {wqls}"
    report_pass(
        f"ARIMA recovery (phi {params_ar.phi[0]:.3f}, theta {params_ma.theta[0]:.3f}); "
        f"July-registered WQL degrades {wqls[2]:.4f} -> {wqls[4]:.4f}"
    )


def test_decomposition_recovery():
    """Noise-free linear trend and weekly sinusoid recovered to 1e-6;
    the weekly seasonal component has zero mean over its period."""
    t100 = np.arange(100.0)
    model = fit_decomposition(
        DailySeries(DAY0, 2.0 + 0.5 * t100, "casual"), DecompConfig()
    )
    assert abs(model.trend_base[1] - 0.5) < 1e-6
    assert np.max(np.abs(model.trend_deltas)) < 1e-6

    t140 = np.arange(140.0)
    target = np.sin(2.0 * np.pi * t140 / 7.0)
    model = fit_decomposition(
        DailySeries(DAY0, 10.0 + target, "casual"),
        DecompConfig(reg_strength=0.0),  # exact recovery is defined unpenalized
    )
    assert np.max(np.abs(model.seasonal(t140) - target)) < 1e-6
    week = model.seasonal(np.arange(7.0))
    assert abs(float(np.mean(week))) < 1e-9 * np.max(np.abs(week))
    report_pass("decomposition recovery to 1e-6; weekly seasonal zero-mean")


def test_quantized_sampler_pipeline():
    """Round-trip error at most half a bin on 10,000 values; constant
    context collapses within half a bin; monotone quantiles throughout."""
    cfg = TokenizerConfig()
    rng = np.random.default_rng(77)
    values = rng.uniform(0.0, 1000.0, 10_000)
    values[0] = 500.0
    context = DailySeries(DAY0, values, "casual")
    tokens, scale = tokenize(context, cfg)
    recovered = detokenize(tokens, cfg, scale)
    in_range = (values / scale >= cfg.low) & (values / scale <= cfg.high)
    assert in_range.all()  # non-negative data stays inside the default grid
    scaled_err = np.abs(recovered - values) / scale
    assert np.max(scaled_err) <= cfg.bin_width / 2.0 + 1e-12

    constant = DailySeries(DAY0, np.full(28, 5.0), "casual")
    qf = forecast(ForecasterSpec("quantized_sampler"), constant, 7, seed=0)
    assert np.max(np.abs(qf.values - 5.0)) <= cfg.bin_width / 2.0 * 5.0

    rng = np.random.default_rng(78)
    for seed in range(25):
        ctx = DailySeries(DAY0, rng.integers(0, 300, 35) + 1.0, "casual")
        out = forecast(ForecasterSpec("quantized_sampler"), ctx, 10, seed=seed)
        assert np.all(np.diff(out.values, axis=0) >= 0.0)
    report_pass("quantized sampler: 10,000-value round trip, collapse, monotone")


def test_pretrained_model_scores_out_of_desk_scope():
    """Absolute scores of the pretrained and reference models are not
    desk-reproducible; the harness exposes them only through the external
    bridge kind, and their mechanics are covered by the property suites."""
    assert "external" in FORECASTER_KINDS
    from horizonbench import bridge_client  # the adapter exists and imports

    assert callable(bridge_client.forecast_external)
    report_pass(
        "pretrained/reference absolute scores delegated to the external bridge"
    )
