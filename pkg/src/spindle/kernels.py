"""Kernel backend selection.

The compiled extension is preferred; the pure numpy implementation is the
fallback when the extension is unavailable or ``SPINDLE_PURE=1`` is set.
Both expose the same three entry points (``scan_tuples``,
``max_dist_query``, ``hull_contains_batch``) with identical semantics; the
test suite checks them against each other.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SPINDLE_PURE", "") not in ("", "0"):
    _backend = _kernels_py
else:
    try:
        from . import _kernels as _backend  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on build environment
        _backend = _kernels_py

BACKEND = getattr(_backend, "__name__", "spindle._kernels_py").rsplit(".", 1)[-1]
USING_COMPILED = BACKEND == "_kernels"

scan_tuples = _backend.scan_tuples
pair_probe = _backend.pair_probe
max_dist_query = _backend.max_dist_query
hull_contains_batch = _backend.hull_contains_batch
pure = _kernels_py
