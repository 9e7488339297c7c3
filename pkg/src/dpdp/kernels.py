"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python twin. Set ``DPDP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("DPDP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

segment_hits_rect = _impl.segment_hits_rect
count_segment_hits = _impl.count_segment_hits
leg_matrices = _impl.leg_matrices
population_sums = _impl.population_sums

__all__ = [
    "BACKEND",
    "segment_hits_rect",
    "count_segment_hits",
    "leg_matrices",
    "population_sums",
]
