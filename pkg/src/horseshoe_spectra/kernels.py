"""Kernel backend selection.

The compiled extension is used when it imports; set
``HORSESHOE_SPECTRA_PURE=1`` to force the pure-Python kernels.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("HORSESHOE_SPECTRA_PURE"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

AFFINE = _pykernels.AFFINE
GAUSS = _pykernels.GAUSS

window_max = _impl.window_max
front_counts = _impl.front_counts
perron_bracket = _impl.perron_bracket


def backends() -> dict:
    """Every importable backend by name, for benchmarks and cross-checks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
