"""Forecast scores: seasonal MASE, weighted quantile loss, quantile EMD.

All three are pure functions of the forecast, the realized values, and
(for MASE) the context window the forecast was conditioned on.

* MASE scales the forecast MAE by the in-sample one-season-naive MAE of
  the scenario's own context, so the same forecast scores differently
  under different context lengths.
* WQL is twice the pinball loss summed over days, normalized by the
  total absolute actuals, averaged over the nine decimal levels.
* The EMD score treats actuals and each quantile row as unit-mass
  densities of rides over the horizon's days and averages the 1-D
  earth-mover distance (integrated absolute CDF difference, day units)
  across levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricError
from .forecast import QuantileForecast

#: Season length used for MASE scaling: one week of daily data.
DEFAULT_SEASON_LENGTH = 7


@dataclass(frozen=True)
class MetricTriple:
    """The three scores for one model on one scenario."""

    emd: float
    mase: float
    wql: float

    def __post_init__(self):
        for name in ("emd", "mase", "wql"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise MetricError(f"{name} must be finite and non-negative, got {v}")


def mase(
    actuals,
    point_forecast,
    context,
    season_length: int = DEFAULT_SEASON_LENGTH,
) -> float:
    """Mean absolute scaled error with a seasonal-naive scale.

    mean(|a - f|) divided by the mean absolute one-season difference of
    the context, mean over t of |context[t] - context[t - m]|.
    """
    a = np.asarray(actuals, dtype=float)
    f = np.asarray(point_forecast, dtype=float)
    c = np.asarray(context, dtype=float)
    if a.shape != f.shape:
        raise MetricError("actuals and forecast lengths differ")
    if season_length <= 0:
        raise MetricError("season_length must be positive")
    if len(c) <= season_length:
        raise MetricError(
            f"context must be longer than the season ({season_length})"
        )
    scale = float(np.mean(np.abs(c[season_length:] - c[:-season_length])))
    if scale == 0.0:
        raise MetricError("undefined MASE scale: context is perfectly periodic")
    return float(np.mean(np.abs(a - f)) / scale)


def wql(actuals, forecast: QuantileForecast) -> float:
    """Weighted quantile loss averaged over the nine decimal levels.

    For each level tau:
        wQL[tau] = 2 * sum_t [tau * max(a_t - q_t, 0)
                              + (1 - tau) * max(q_t - a_t, 0)] / sum_t |a_t|
    """
    a = np.asarray(actuals, dtype=float)
    _check_horizon(a, forecast)
    denom = float(np.sum(np.abs(a)))
    if denom == 0.0:
        raise MetricError("undefined WQL: actuals are all zero")
    taus = np.asarray(forecast.levels)[:, None]
    q = forecast.values
    under = np.maximum(a[None, :] - q, 0.0)
    over = np.maximum(q - a[None, :], 0.0)
    per_level = 2.0 * np.sum(taus * under + (1.0 - taus) * over, axis=1) / denom
    return float(np.mean(per_level))


def emd_1d(p, q) -> float:
    """Earth-mover distance between two unit-mass densities on a day grid.

    In one dimension with unit spacing this is the sum of absolute CDF
    differences.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise MetricError("densities have different lengths")
    return float(np.sum(np.abs(np.cumsum(p) - np.cumsum(q))))


def emd_quantile_mean(actuals, forecast: QuantileForecast) -> float:
    """Mean EMD between the actuals density and each quantile-row density.

    Both signals are normalized to unit mass first, so the score
    measures where the rides fall across the horizon, not how many
    there are.  A quantile row with zero total mass has no density and
    is an error.
    """
    a = np.asarray(actuals, dtype=float)
    _check_horizon(a, forecast)
    total = float(np.sum(a))
    if total <= 0.0:
        raise MetricError("degenerate density: actuals sum to zero")
    a_density = a / total
    distances = []
    for row in forecast.values:
        mass = float(np.sum(row))
        if mass <= 0.0:
            raise MetricError("degenerate density: quantile row sums to zero")
        distances.append(emd_1d(a_density, row / mass))
    return float(np.mean(distances))


def score(
    actuals,
    forecast: QuantileForecast,
    context,
    season_length: int = DEFAULT_SEASON_LENGTH,
) -> MetricTriple:
    """All three scores; the MASE point forecast is the median row."""
    return MetricTriple(
        emd=emd_quantile_mean(actuals, forecast),
        mase=mase(actuals, forecast.median, context, season_length),
        wql=wql(actuals, forecast),
    )


def _check_horizon(actuals: np.ndarray, forecast: QuantileForecast) -> None:
    if actuals.ndim != 1 or actuals.size != forecast.horizon_days:
        raise MetricError(
            f"actuals length {actuals.size} does not match "
            f"forecast horizon {forecast.horizon_days}"
        )
