"""Benchmark harness for daily demand forecasting under varying context lengths.

Four probabilistic forecasters behind one contract (seasonal naive,
ARIMA with automatic order selection, additive decomposition, and a
quantized autoregressive sampler, plus an adapter for external models),
scored with MASE, weighted quantile loss, and quantile-averaged
earth-mover distance over a matrix of prediction windows and
context-to-prediction ratios.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .data import DailySeries, RentalRecord, UserClass
from .forecast import ForecasterSpec, QuantileForecast, forecast
from .metrics import MetricTriple
from .scenarios import Scenario, TargetWindow

__all__ = [
    "__version__",
    "kernel_backend",
    "DailySeries",
    "RentalRecord",
    "UserClass",
    "ForecasterSpec",
    "QuantileForecast",
    "forecast",
    "MetricTriple",
    "Scenario",
    "TargetWindow",
]
