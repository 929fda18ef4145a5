"""Kernel backend selection.

The hot coefficient kernels (Taylor-series convolutions, transcendental
recurrences, the flat-chart Frenet integrator step) have a compiled
implementation in ``nullhelix._jetcore``.  When the extension is missing, or
when ``NULLHELIX_PURE=1`` is set, every caller falls back to the generic
pure-Python code paths in :mod:`nullhelix.jets` and :mod:`nullhelix.helix`.
"""

import os

kernels = None
BACKEND = "pure"

if not os.environ.get("NULLHELIX_PURE"):
    try:
        from . import _jetcore as kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        kernels = None
