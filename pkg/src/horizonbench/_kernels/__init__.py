"""Kernel backend selection: compiled extension when available, else pure.

Set ``HORIZONBENCH_PURE=1`` to force the pure-Python kernels even when
the compiled extension is importable (used by the parity tests and the
kernel benchmark).
"""

import os

from . import _pure

if os.environ.get("HORIZONBENCH_PURE", "") not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
arma_innovation_stats = _impl.arma_innovation_stats
css_residuals = _impl.css_residuals

__all__ = ["BACKEND", "arma_innovation_stats", "css_residuals", "_pure"]
