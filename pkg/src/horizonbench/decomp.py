"""Additive decomposition forecaster: trend + seasonality + noise.

The fit is a ridge-penalized least squares over a piecewise-linear
trend basis (hinges at evenly spaced changepoints over the early part
of the context) and Fourier seasonality blocks (weekly order 3; yearly
order 10, included only when the context spans a full year).  The
holiday slot exists in the model type but is empty by default: these
runs feed the models nothing but the series itself.

Forecast uncertainty follows the trend-simulation idea: future
changepoints arrive as a Poisson process at the historical changepoint
rate, slope shocks are drawn from a Laplace distribution fit to the
fitted slope adjustments, and observation noise is Gaussian with the
residual scale.  Quantiles are empirical over the simulated paths.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .data import DailySeries
from .errors import ForecastError
from .forecast import (
    ForecasterSpec,
    QuantileForecast,
    trajectories_to_quantiles,
)

WEEKLY_PERIOD = 7.0
YEARLY_PERIOD = 365.25


@dataclass(frozen=True)
class DecompConfig:
    n_changepoints: int = 25
    changepoint_range: float = 0.8
    reg_strength: float = 1.0
    weekly_order: int = 3
    yearly_order: int = 10
    num_samples: int = 500


@dataclass(frozen=True)
class DecompositionModel:
    """Fitted additive components, all in original data units.

    ``trend_base`` is (offset at day 0, slope per day); ``trend_deltas``
    are per-day slope adjustments switching on at the matching
    changepoint.  Fourier coefficients are stored per block as
    interleaved (sin_k, cos_k) pairs.
    """

    context_start: dt.date
    context_days: int
    changepoints: tuple[dt.date, ...]
    trend_base: tuple[float, float]
    trend_deltas: tuple[float, ...]
    fourier_coeffs: Mapping[str, tuple[float, ...]]
    holiday_effects: Mapping[dt.date, float] = field(default_factory=dict)
    sigma_resid: float = 0.0

    def changepoint_offsets(self) -> np.ndarray:
        return np.array(
            [(cp - self.context_start).days for cp in self.changepoints], dtype=float
        )

    def trend(self, t) -> np.ndarray:
        """Piecewise-linear trend at day offsets ``t`` from context start."""
        t = np.asarray(t, dtype=float)
        offset, slope = self.trend_base
        out = offset + slope * t
        for cp_t, delta in zip(self.changepoint_offsets(), self.trend_deltas):
            out = out + delta * np.maximum(t - cp_t, 0.0)
        return out

    def seasonal(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for block, period in (("weekly", WEEKLY_PERIOD), ("yearly", YEARLY_PERIOD)):
            coeffs = self.fourier_coeffs.get(block, ())
            for k in range(len(coeffs) // 2):
                angle = 2.0 * np.pi * (k + 1) * t / period
                out = out + coeffs[2 * k] * np.sin(angle)
                out = out + coeffs[2 * k + 1] * np.cos(angle)
        return out

    def holiday(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        if self.holiday_effects:
            for i, offset in enumerate(t):
                day = self.context_start + dt.timedelta(days=int(offset))
                out[i] = self.holiday_effects.get(day, 0.0)
        return out

    def predict_components(self, t) -> np.ndarray:
        return self.trend(t) + self.seasonal(t) + self.holiday(t)

    def components_dict(self) -> dict:
        """Flat, JSON-serializable dump of every fitted component."""
        return {
            "context_start": self.context_start.isoformat(),
            "context_days": self.context_days,
            "trend_offset": self.trend_base[0],
            "trend_slope_per_day": self.trend_base[1],
            "changepoints": [
                {"date": cp.isoformat(), "delta_per_day": delta}
                for cp, delta in zip(self.changepoints, self.trend_deltas)
            ],
            "fourier_coeffs": {k: list(v) for k, v in self.fourier_coeffs.items()},
            "holiday_effects": {
                d.isoformat(): v for d, v in sorted(self.holiday_effects.items())
            },
            "sigma_resid": self.sigma_resid,
        }


def _fourier_block(t: np.ndarray, period: float, order: int) -> np.ndarray:
    cols = []
    for k in range(1, order + 1):
        angle = 2.0 * np.pi * k * t / period
        cols.append(np.sin(angle))
        cols.append(np.cos(angle))
    return np.column_stack(cols) if cols else np.zeros((t.size, 0))


def fit_decomposition(
    context: DailySeries, config: DecompConfig = DecompConfig()
) -> DecompositionModel:
    """Ridge least-squares fit of the additive components.

    The intercept and base slope are unpenalized; slope adjustments and
    Fourier coefficients carry the ridge penalty, so a noise-free linear
    input is recovered exactly with all adjustments at zero.
    """
    n = len(context)
    if n < 14:
        raise ForecastError("insufficient context: need at least two weeks")
    y = context.values.astype(float)
    t = np.arange(n, dtype=float)
    n_scale = float(max(n - 1, 1))
    s = t / n_scale

    n_cp = min(config.n_changepoints, n // 4)
    if n_cp > 0:
        cp_idx = np.unique(
            np.round(np.linspace(1, config.changepoint_range * (n - 1), n_cp))
        ).astype(int)
        cp_idx = cp_idx[cp_idx > 0]
    else:
        cp_idx = np.array([], dtype=int)

    hinges = np.maximum(s[:, None] - s[cp_idx][None, :], 0.0) if cp_idx.size else np.zeros((n, 0))
    weekly = _fourier_block(t, WEEKLY_PERIOD, config.weekly_order)
    yearly = (
        _fourier_block(t, YEARLY_PERIOD, config.yearly_order)
        if n >= 366
        else np.zeros((n, 0))
    )
    X = np.column_stack([np.ones(n), s, hinges, weekly, yearly])

    y_scale = float(max(np.max(np.abs(y)), 1e-12))
    n_pen = X.shape[1] - 2
    penalty = np.zeros((n_pen, X.shape[1]))
    penalty[:, 2:] = np.sqrt(config.reg_strength) * np.eye(n_pen)
    A = np.vstack([X, penalty])
    b = np.concatenate([y / y_scale, np.zeros(n_pen)])
    beta, *_ = np.linalg.lstsq(A, b, rcond=None)
    beta = beta * y_scale

    fitted = X @ beta
    resid = y - fitted
    sigma_resid = float(np.std(resid))

    i = 2
    deltas_scaled = beta[i : i + cp_idx.size]
    i += cp_idx.size
    weekly_coeffs = tuple(beta[i : i + weekly.shape[1]])
    i += weekly.shape[1]
    yearly_coeffs = tuple(beta[i : i + yearly.shape[1]])

    fourier: dict[str, tuple[float, ...]] = {"weekly": weekly_coeffs}
    if yearly.shape[1]:
        fourier["yearly"] = yearly_coeffs

    return DecompositionModel(
        context_start=context.start_date,
        context_days=n,
        changepoints=tuple(
            context.start_date + dt.timedelta(days=int(j)) for j in cp_idx
        ),
        trend_base=(float(beta[0]), float(beta[1]) / n_scale),
        trend_deltas=tuple(float(v) / n_scale for v in deltas_scaled),
        fourier_coeffs=fourier,
        sigma_resid=sigma_resid,
    )


def predict_decomposition(
    model: DecompositionModel,
    horizon_days: int,
    num_samples: int = 500,
    seed: int = 0,
) -> QuantileForecast:
    """Simulate future paths and reduce them to per-day quantiles."""
    if horizon_days < 1:
        raise ForecastError("insufficient horizon")
    if num_samples < 1:
        raise ForecastError("num_samples must be positive")

    n = model.context_days
    t_future = np.arange(n, n + horizon_days, dtype=float)
    point = model.predict_components(t_future)

    rate = len(model.changepoints) / max(n, 1)
    laplace_scale = (
        float(np.mean(np.abs(model.trend_deltas))) if model.trend_deltas else 0.0
    )

    rng = np.random.default_rng(seed)
    paths = np.empty((num_samples, horizon_days))
    rel_t = np.arange(horizon_days, dtype=float)
    for i in range(num_samples):
        path = point.copy()
        n_new = rng.poisson(rate * horizon_days)
        if n_new > 0 and laplace_scale > 0.0:
            times = rng.integers(0, horizon_days, size=n_new)
            shocks = rng.laplace(0.0, laplace_scale, size=n_new)
            for u, shock in zip(times, shocks):
                path = path + shock * np.maximum(rel_t - u, 0.0)
        if model.sigma_resid > 0.0:
            path = path + rng.normal(0.0, model.sigma_resid, horizon_days)
        paths[i] = path

    start = model.context_start + dt.timedelta(days=n)
    qf = trajectories_to_quantiles(paths, start)
    return QuantileForecast(start, np.clip(qf.values, 0.0, None))


def forecast_decomposition(
    spec: ForecasterSpec, context: DailySeries, horizon_days: int, seed: int
) -> tuple[QuantileForecast, str]:
    params = spec.parameters
    config = DecompConfig(
        n_changepoints=int(params.get("n_changepoints", 25)),
        changepoint_range=float(params.get("changepoint_range", 0.8)),
        reg_strength=float(params.get("reg_strength", 1.0)),
        num_samples=int(params.get("num_samples", 500)),
    )
    model = fit_decomposition(context, config)
    qf = predict_decomposition(model, horizon_days, config.num_samples, seed)
    diag = (
        f"trend=({model.trend_base[0]:.3f},{model.trend_base[1]:.4f}/day) "
        f"changepoints={len(model.changepoints)} "
        f"blocks={sorted(model.fourier_coeffs)} sigma={model.sigma_resid:.3f}"
    )
    return qf, diag
