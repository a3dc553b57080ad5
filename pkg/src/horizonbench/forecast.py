"""Uniform probabilistic forecaster contract plus the two local models.

Every forecaster, whatever its internals, consumes a context
:class:`~horizonbench.data.DailySeries` and emits a
:class:`QuantileForecast`: per-day predicted values at the nine decimal
quantile levels.  This module defines that contract, the seasonal-naive
baseline, and the quantized autoregressive sampler, and dispatches to
the heavier models living in their own modules.

The quantized sampler follows the scale/quantize/sample/dequantize
pipeline of pretrained token-based forecasters, but the next-token
model is a small order-k empirical Markov chain fit on the context
itself.  It is a desk-scale stand-in: every pipeline stage is exercised
and verifiable, while scores from real pretrained models come in
through the external bridge instead.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .data import DailySeries
from .errors import ForecastError

#: The nine decimal quantile levels every forecaster reports.
QUANTILE_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

#: Forecaster kinds accepted by :func:`forecast`.
FORECASTER_KINDS = (
    "seasonal_naive",
    "arima",
    "decomposition",
    "quantized_sampler",
    "external",
)


@dataclass(frozen=True)
class QuantileForecast:
    """Per-day forecast values at the nine decimal quantile levels.

    ``values`` has shape (9, horizon_days), one row per level in
    ascending order, and must be non-decreasing down each column.
    """

    start_date: dt.date
    values: np.ndarray = field(repr=False)
    levels: tuple[float, ...] = QUANTILE_LEVELS

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != len(self.levels):
            raise ForecastError(
                f"quantile matrix must be {len(self.levels)} x horizon, got {arr.shape}"
            )
        if arr.shape[1] < 1:
            raise ForecastError("insufficient horizon")
        if not np.all(np.isfinite(arr)):
            raise ForecastError("forecast contains non-finite values")
        if np.any(np.diff(arr, axis=0) < 0):
            raise ForecastError("quantile rows are not monotone across levels")
        object.__setattr__(self, "values", arr)

    @property
    def horizon_days(self) -> int:
        return int(self.values.shape[1])

    def row(self, level: float) -> np.ndarray:
        return self.values[self.levels.index(level)]

    @property
    def median(self) -> np.ndarray:
        return self.row(0.5)


@dataclass(frozen=True)
class ForecasterSpec:
    """Which model to run, plus its (already validated) parameters."""

    kind: str
    parameters: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FORECASTER_KINDS:
            raise ForecastError(f"unknown forecaster kind '{self.kind}'")
        object.__setattr__(self, "parameters", dict(self.parameters))

    def describe(self) -> str:
        """Stable one-line serialization for run manifests."""
        params = ",".join(f"{k}={self.parameters[k]}" for k in sorted(self.parameters))
        return f"{self.kind}({params})"


@dataclass(frozen=True)
class TokenizerConfig:
    """Uniform quantization grid in mean-scaled units."""

    num_bins: int = 4096
    low: float = -15.0
    high: float = 15.0

    def __post_init__(self):
        if self.num_bins < 2:
            raise ForecastError("tokenizer needs at least two bins")
        if not self.low < self.high:
            raise ForecastError("tokenizer range must satisfy low < high")

    @property
    def bin_width(self) -> float:
        return (self.high - self.low) / self.num_bins


#: Parameter keys each forecaster kind accepts, with validation bounds.
_SPEC_PARAMS = {
    "seasonal_naive": {"season_length"},
    "arima": {"p_max", "q_max"},
    "decomposition": {"n_changepoints", "changepoint_range", "reg_strength", "num_samples"},
    "quantized_sampler": {"num_bins", "low", "high", "order", "num_samples"},
    "external": {"bridge", "model", "num_samples"},
}


def validate_spec(spec: ForecasterSpec) -> None:
    """Reject bad hyperparameters before any data is touched."""
    allowed = _SPEC_PARAMS[spec.kind]
    unknown = set(spec.parameters) - allowed
    if unknown:
        raise ForecastError(
            f"unknown parameter(s) for {spec.kind}: {', '.join(sorted(unknown))}"
        )
    p = spec.parameters
    positive_ints = {
        "season_length", "num_samples", "order", "num_bins",
        "p_max", "q_max", "n_changepoints",
    }
    for key in positive_ints & set(p):
        value = int(p[key])
        floor = 2 if key == "num_bins" else 0 if key in ("order", "n_changepoints") else 1
        if value < floor:
            raise ForecastError(f"{spec.kind}: {key} must be >= {floor}, got {p[key]}")
    if "low" in p or "high" in p:
        low = float(p.get("low", -15.0))
        high = float(p.get("high", 15.0))
        if not low < high:
            raise ForecastError(f"{spec.kind}: need low < high, got [{low}, {high}]")
    if "changepoint_range" in p and not 0.0 < float(p["changepoint_range"]) <= 1.0:
        raise ForecastError(f"{spec.kind}: changepoint_range must be in (0, 1]")
    if "reg_strength" in p and float(p["reg_strength"]) < 0:
        raise ForecastError(f"{spec.kind}: reg_strength must be >= 0")
    if spec.kind == "external" and not p.get("bridge"):
        raise ForecastError("external: a 'bridge' address parameter is required")


def trajectories_to_quantiles(
    values: np.ndarray, start_date: dt.date
) -> QuantileForecast:
    """Collapse sampled trajectories into per-day empirical quantiles.

    Quantiles use linear interpolation between order statistics at
    positions (n - 1) * tau, the same definition used everywhere in this
    package.  Monotonicity across levels is automatic.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ForecastError("need at least one trajectory")
    rows = np.quantile(arr, QUANTILE_LEVELS, axis=0, method="linear")
    return QuantileForecast(start_date, rows)


def seasonal_naive_point(
    context: DailySeries, horizon_days: int, season_length: int
) -> np.ndarray:
    """Repeat the last observed season block across the horizon."""
    if season_length <= 0:
        raise ForecastError("season_length must be positive")
    if horizon_days < 1:
        raise ForecastError("insufficient horizon")
    if len(context) < season_length:
        raise ForecastError(
            f"insufficient context: need >= {season_length} values, "
            f"have {len(context)}"
        )
    block = context.values[-season_length:]
    reps = int(np.ceil(horizon_days / season_length))
    return np.tile(block, reps)[:horizon_days]


def tokenize(
    context: DailySeries, cfg: TokenizerConfig
) -> tuple[np.ndarray, float]:
    """Map context values onto the quantization grid.

    Values are divided by the mean absolute context value, clamped to
    the grid range, and binned uniformly.  Returns (tokens, scale).
    """
    values = context.values
    scale = float(np.mean(np.abs(values)))
    if scale <= 0.0:
        raise ForecastError("zero scale: context is all zeros")
    scaled = np.clip(values / scale, cfg.low, cfg.high)
    tokens = np.floor((scaled - cfg.low) / (cfg.high - cfg.low) * cfg.num_bins)
    tokens = np.clip(tokens, 0, cfg.num_bins - 1).astype(np.int64)
    return tokens, scale


def detokenize(tokens: np.ndarray, cfg: TokenizerConfig, scale: float) -> np.ndarray:
    """Map tokens back to values via their bin centers."""
    centers = cfg.low + (np.asarray(tokens, dtype=float) + 0.5) * cfg.bin_width
    return centers * scale


def sample_trajectories(
    tokens: np.ndarray,
    horizon_days: int,
    num_samples: int,
    order: int,
    seed: int,
) -> np.ndarray:
    """Sample future token trajectories from an order-k Markov chain.

    The next-token distribution for a context k-gram is the empirical
    categorical over its observed successors.  A k-gram never seen in
    the context (possible once generation wanders) falls back to
    add-one smoothing over the observed token vocabulary, i.e. a
    uniform draw over the distinct context tokens.  Order 0 reduces to
    i.i.d. draws from the token histogram.
    """
    tokens = np.asarray(tokens, dtype=np.int64)
    if num_samples <= 0:
        raise ForecastError("num_samples must be positive")
    if order < 0:
        raise ForecastError("order must be >= 0")
    if len(tokens) <= order:
        raise ForecastError(
            f"insufficient context: need more than {order} tokens, have {len(tokens)}"
        )
    if horizon_days < 1:
        raise ForecastError("insufficient horizon")

    vocab, vocab_counts = np.unique(tokens, return_counts=True)
    transitions: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {}
    if order == 0:
        transitions[()] = (vocab, vocab_counts.astype(float))
    else:
        successors: dict[tuple[int, ...], dict[int, int]] = {}
        for i in range(order, len(tokens)):
            key = tuple(tokens[i - order : i])
            bucket = successors.setdefault(key, {})
            nxt = int(tokens[i])
            bucket[nxt] = bucket.get(nxt, 0) + 1
        for key, bucket in successors.items():
            nxt = np.array(sorted(bucket), dtype=np.int64)
            cnt = np.array([bucket[t] for t in nxt], dtype=float)
            transitions[key] = (nxt, cnt)

    rng = np.random.default_rng(seed)
    out = np.empty((num_samples, horizon_days), dtype=np.int64)
    for s in range(num_samples):
        state = tuple(tokens[len(tokens) - order :]) if order else ()
        for h in range(horizon_days):
            entry = transitions.get(state)
            if entry is None:
                # unseen k-gram: add-one smoothing over observed tokens
                support, weights = vocab, np.ones(len(vocab))
            else:
                support, weights = entry
            nxt = int(rng.choice(support, p=weights / weights.sum()))
            out[s, h] = nxt
            if order:
                state = state[1:] + (nxt,)
    return out


def _forecast_seasonal_naive(
    spec: ForecasterSpec, context: DailySeries, horizon_days: int, seed: int
) -> QuantileForecast:
    season_length = int(spec.parameters.get("season_length", 7))
    point = seasonal_naive_point(context, horizon_days, season_length)
    # degenerate distribution: the point value at all nine levels
    rows = np.tile(point, (len(QUANTILE_LEVELS), 1))
    start = context.end_date + dt.timedelta(days=1)
    return QuantileForecast(start, rows)


def _forecast_quantized_sampler(
    spec: ForecasterSpec, context: DailySeries, horizon_days: int, seed: int
) -> QuantileForecast:
    params = spec.parameters
    cfg = TokenizerConfig(
        num_bins=int(params.get("num_bins", 4096)),
        low=float(params.get("low", -15.0)),
        high=float(params.get("high", 15.0)),
    )
    order = int(params.get("order", 7))
    num_samples = int(params.get("num_samples", 20))
    tokens, scale = tokenize(context, cfg)
    trajectories = sample_trajectories(tokens, horizon_days, num_samples, order, seed)
    sampled = detokenize(trajectories, cfg, scale)
    start = context.end_date + dt.timedelta(days=1)
    forecast = trajectories_to_quantiles(sampled, start)
    # ride counts cannot be negative; raw samples may dip below zero
    return QuantileForecast(start, np.clip(forecast.values, 0.0, None))


def forecast_with_diagnostics(
    spec: ForecasterSpec,
    context: DailySeries,
    horizon_days: int,
    seed: int = 0,
) -> tuple[QuantileForecast, str]:
    """Like :func:`forecast`, also returning a fit-diagnostics line."""
    if horizon_days < 1:
        raise ForecastError("insufficient horizon")
    if spec.kind == "seasonal_naive":
        qf = _forecast_seasonal_naive(spec, context, horizon_days, seed)
        return qf, spec.describe()
    if spec.kind == "quantized_sampler":
        qf = _forecast_quantized_sampler(spec, context, horizon_days, seed)
        return qf, spec.describe()
    if spec.kind == "arima":
        from . import arima

        return arima.forecast_arima(spec, context, horizon_days)
    if spec.kind == "decomposition":
        from . import decomp

        return decomp.forecast_decomposition(spec, context, horizon_days, seed)
    if spec.kind == "external":
        from . import bridge_client

        return bridge_client.forecast_external(spec, context, horizon_days, seed)
    raise ForecastError(f"unknown forecaster kind '{spec.kind}'")


def forecast(
    spec: ForecasterSpec,
    context: DailySeries,
    horizon_days: int,
    seed: int = 0,
) -> QuantileForecast:
    """Run one forecaster on one context window.

    Deterministic given (spec, context, seed).  Model-specific context
    minimums and failure modes surface as :class:`ForecastError` (or its
    :class:`~horizonbench.errors.FitError` subclass).
    """
    return forecast_with_diagnostics(spec, context, horizon_days, seed)[0]
