"""Kernel selection: compiled extension when available, pure Python otherwise.

Set INSCAP_PURE=1 to force the pure-Python kernels (used by the benchmark and
to exercise the fallback in tests).
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("INSCAP_PURE", "") not in ("", "0"):
    _native = None
else:
    try:
        from . import _native  # type: ignore[attr-defined]
    except ImportError:
        _native = None

HAVE_NATIVE = _native is not None


def backend_name() -> str:
    return "native" if HAVE_NATIVE else "python"


def joint_cells(x: int, n: int, model: int, max_events: int) -> dict:
    """Per-input enumeration of (packed y, y length, run-vector bytes) -> count."""
    if HAVE_NATIVE and n <= 31:
        return _native.joint_cells(x, n, model, max_events)
    return _fallback.joint_cells(x, n, model, max_events)


def capped_fill(u, out, l_star: int) -> int:
    """Run-length-capped copy of a bit array; returns the flip count."""
    if HAVE_NATIVE:
        return _native.capped_fill(u, out, l_star)
    return _fallback.capped_fill(u, out, l_star)
