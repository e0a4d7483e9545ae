"""Kernel backend selection: compiled extension if available, numpy fallback
otherwise. Set ``QUDIV_KERNELS=python`` (or ``cython``) to force a backend.
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("QUDIV_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"

pair_divergence_accum = _impl.pair_divergence_accum
moment_accum = _impl.moment_accum
