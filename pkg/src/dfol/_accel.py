"""Pick the compiled enumeration kernels when available.

Set ``DFOL_PURE_PYTHON=1`` to force the reference implementation.
"""

from __future__ import annotations

import os

from . import _purepy

BACKEND = "python"
is_preorder = _purepy.is_preorder
enumerate_preorders = _purepy.enumerate_preorders
monotone_maps = _purepy.monotone_maps

if os.environ.get("DFOL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        is_preorder = _speedups.is_preorder
        enumerate_preorders = _speedups.enumerate_preorders
        monotone_maps = _speedups.monotone_maps

__all__ = ["BACKEND", "is_preorder", "enumerate_preorders", "monotone_maps"]
