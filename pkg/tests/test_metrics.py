import datetime as dt

import numpy as np
import pytest

from horizonbench.errors import MetricError
from horizonbench.forecast import QUANTILE_LEVELS, QuantileForecast
from horizonbench.metrics import MetricTriple, emd_1d, emd_quantile_mean, mase, score, wql

DAY0 = dt.date(2012, 1, 1)


def qf_from_rows(rows) -> QuantileForecast:
    return QuantileForecast(DAY0, np.asarray(rows, dtype=float))


def degenerate_qf(point) -> QuantileForecast:
    point = np.asarray(point, dtype=float)
    return qf_from_rows(np.tile(point, (9, 1)))


def pinball_oracle(actuals, forecast: QuantileForecast) -> float:
    """Independent WQL: per-level pinball loss via the max formulation."""
    a = np.asarray(actuals, dtype=float)
    losses = []
    for tau, row in zip(forecast.levels, forecast.values):
        pinball = np.maximum(tau * (a - row), (tau - 1.0) * (a - row))
        losses.append(2.0 * pinball.sum() / np.sum(np.abs(a)))
    return float(np.mean(losses))


def random_monotone_qf(rng, horizon) -> QuantileForecast:
    base = rng.uniform(0.0, 50.0, (9, horizon))
    return qf_from_rows(np.sort(base, axis=0))


class TestMase:
    def test_hand_example(self):
        # context 1..14, m=7: every seasonal diff is 7, so the scale is 7;
        # |a - f| is 1 on each of the three days, so MASE = 1/7
        context = np.arange(1.0, 15.0)
        actuals = np.array([15.0, 16.0, 17.0])
        forecast = np.array([14.0, 15.0, 16.0])
        assert mase(actuals, forecast, context, 7) == pytest.approx(1.0 / 7.0, abs=1e-15)

    def test_zero_on_perfect(self):
        context = np.arange(1.0, 15.0)
        actuals = np.array([3.0, 4.0, 5.0])
        assert mase(actuals, actuals.copy(), context, 7) == 0.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(0)
        context = rng.uniform(1, 100, 30)
        actuals = rng.uniform(1, 100, 7)
        forecast = rng.uniform(1, 100, 7)
        base = mase(actuals, forecast, context)
        scaled = mase(3 * actuals, 3 * forecast, 3 * context)
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_periodic_context_rejected(self):
        context = np.tile(np.arange(7.0), 4)
        with pytest.raises(MetricError, match="undefined MASE scale"):
            mase(np.ones(3), np.ones(3), context, 7)

    def test_context_must_exceed_season(self):
        with pytest.raises(MetricError):
            mase(np.ones(3), np.ones(3), np.ones(7), 7)


class TestWql:
    def test_perfect_forecast_scores_zero(self):
        actuals = np.array([5.0, 7.0, 9.0])
        assert wql(actuals, degenerate_qf(actuals)) == 0.0

    def test_closed_form_under_forecast(self):
        # actuals [10], every level at 8: per level 2*tau*2/10 = 0.4*tau,
        # mean over the nine levels is 0.4 * 0.5 = 0.2
        value = wql(np.array([10.0]), degenerate_qf([8.0]))
        assert value == pytest.approx(0.2, abs=1e-15)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        actuals = rng.uniform(1, 50, 10)
        forecast = random_monotone_qf(rng, 10)
        base = wql(actuals, forecast)
        scaled = wql(4.0 * actuals, qf_from_rows(4.0 * forecast.values))
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_matches_pinball_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            horizon = int(rng.integers(1, 20))
            actuals = rng.uniform(0.5, 100.0, horizon)
            forecast = random_monotone_qf(rng, horizon)
            assert wql(actuals, forecast) == pytest.approx(
                pinball_oracle(actuals, forecast), abs=1e-12
            )

    def test_all_zero_actuals_rejected(self):
        with pytest.raises(MetricError, match="undefined WQL"):
            wql(np.zeros(3), degenerate_qf([1.0, 1.0, 1.0]))

    def test_degenerate_quantiles_reduce_to_wape(self):
        # with all levels equal to one point forecast, the mean over the
        # symmetric levels collapses WQL to sum|a-f| / sum|a|
        rng = np.random.default_rng(3)
        actuals = rng.uniform(1, 50, 14)
        point = rng.uniform(1, 50, 14)
        wape = np.sum(np.abs(actuals - point)) / np.sum(np.abs(actuals))
        assert wql(actuals, degenerate_qf(point)) == pytest.approx(wape, rel=1e-12)


class TestEmd:
    def test_proportional_rows_score_zero(self):
        actuals = np.array([2.0, 4.0, 6.0])
        forecast = qf_from_rows(np.vstack([actuals * k for k in range(1, 10)]))
        assert emd_quantile_mean(actuals, forecast) == 0.0

    def test_mass_moved_one_day(self):
        # all actual mass on day 1, all forecast mass on day 2 -> one unit
        # of mass moves one day
        actuals = np.array([1.0, 0.0])
        forecast = degenerate_qf([0.0, 1.0])
        assert emd_quantile_mean(actuals, forecast) == pytest.approx(1.0, abs=1e-15)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(2, 15))
            p = rng.uniform(0, 1, n)
            q = rng.uniform(0, 1, n)
            p, q = p / p.sum(), q / q.sum()
            assert emd_1d(p, q) == pytest.approx(emd_1d(q, p), abs=1e-14)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(2, 15))
            p, q, r = (rng.uniform(0, 1, n) for _ in range(3))
            p, q, r = p / p.sum(), q / q.sum(), r / r.sum()
            assert emd_1d(p, r) <= emd_1d(p, q) + emd_1d(q, r) + 1e-12

    def test_separate_scale_invariance(self):
        rng = np.random.default_rng(6)
        actuals = rng.uniform(1, 50, 10)
        forecast = random_monotone_qf(rng, 10)
        base = emd_quantile_mean(actuals, forecast)
        rescaled_rows = forecast.values * rng.uniform(0.5, 5.0, (9, 1))
        # independent positive scaling per row may break monotonicity;
        # evaluate through the raw density formula instead
        rescaled = emd_quantile_mean(
            7.0 * actuals, qf_from_rows(np.sort(rescaled_rows, axis=0))
        )
        expected = np.mean(
            [
                emd_1d(actuals / actuals.sum(), row / row.sum())
                for row in np.sort(rescaled_rows, axis=0)
            ]
        )
        assert rescaled == pytest.approx(expected, abs=1e-12)
        assert emd_quantile_mean(7.0 * actuals, forecast) == pytest.approx(base, rel=1e-12)

    def test_zero_mass_row_rejected(self):
        actuals = np.array([1.0, 2.0])
        rows = np.vstack([np.zeros(2)] + [actuals] * 8)
        with pytest.raises(MetricError, match="degenerate density"):
            emd_quantile_mean(actuals, qf_from_rows(rows))


class TestMetricTriple:
    def test_rejects_non_finite(self):
        with pytest.raises(MetricError):
            MetricTriple(emd=float("nan"), mase=0.0, wql=0.0)
        with pytest.raises(MetricError):
            MetricTriple(emd=0.0, mase=-1.0, wql=0.0)

    def test_score_bundles_all_three(self):
        rng = np.random.default_rng(8)
        context = rng.uniform(10, 100, 28)
        actuals = rng.uniform(10, 100, 7)
        forecast = random_monotone_qf(rng, 7)
        triple = score(actuals, forecast, context)
        assert triple.mase == pytest.approx(
            mase(actuals, forecast.median, context), rel=1e-12
        )
        assert triple.wql == pytest.approx(wql(actuals, forecast), rel=1e-12)
        assert triple.emd == pytest.approx(emd_quantile_mean(actuals, forecast), rel=1e-12)


def test_levels_are_the_nine_decimal_quantiles():
    assert QUANTILE_LEVELS == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
