"""Series-evaluation kernel selection.

The compiled Cython backend is used when it imported cleanly and the
CUSPBASIS_PURE_KERNEL environment variable is unset; otherwise the
pure-Python backend takes over with an identical API.
"""

from __future__ import annotations

import os

from . import pure as _pure

_impl = _pure
if os.environ.get("CUSPBASIS_PURE_KERNEL") != "1":
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

RealSeriesEval = _impl.RealSeriesEval
ComplexSeriesEval = _impl.ComplexSeriesEval


def backend_name() -> str:
    """'compiled' when the Cython kernel is active, else 'pure'."""
    return _impl.BACKEND


def backends() -> dict:
    """All importable backends keyed by name (used by the benchmark)."""
    out = {"pure": _pure}
    try:
        from . import _speedups

        out["compiled"] = _speedups
    except ImportError:
        pass
    return out
