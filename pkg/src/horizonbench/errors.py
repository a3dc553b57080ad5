"""Exception hierarchy shared by all harness modules."""


class HorizonbenchError(Exception):
    """Base class for all errors raised by this package."""


class DataError(HorizonbenchError):
    """Raised for malformed or inconsistent input data."""


class ScenarioError(HorizonbenchError):
    """Raised when an evaluation window cannot be placed in the data span."""


class ForecastError(HorizonbenchError):
    """Raised when a forecaster cannot produce a forecast."""


class FitError(ForecastError):
    """Raised when a model fit fails or degenerates."""


class MetricError(HorizonbenchError):
    """Raised when a score is undefined for the given inputs."""


class ReportError(HorizonbenchError):
    """Raised when aggregation inputs are incomplete."""


class ConfigError(HorizonbenchError):
    """Raised for invalid run configuration before any compute starts."""


class BridgeError(HorizonbenchError):
    """Raised for protocol or transport failures against an external model."""
