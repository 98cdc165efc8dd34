"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` loop version (:mod:`.jit`) and a
vectorised pure-numpy version (:mod:`.vec`). Both produce bit-identical
results. The numba path is used unless ``APPROX3D_DISABLE_NUMBA`` is set to a
truthy value or numba cannot be imported.
"""

from __future__ import annotations

import os

from . import vec

FAMILY_CODES = {"EXACT": 0, "TRUNC": 1, "PERF": 2, "LOA": 3}


def _numba_wanted() -> bool:
    flag = os.environ.get("APPROX3D_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


USE_NUMBA = False
if _numba_wanted():
    try:
        from . import jit as _impl

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = vec
else:
    _impl = vec

BACKEND = "numba" if USE_NUMBA else "numpy"

multiply_array = _impl.multiply_array
bf16_products = _impl.bf16_products
dense_bf16 = _impl.dense_bf16
search_tilings = _impl.search_tilings

__all__ = [
    "BACKEND",
    "FAMILY_CODES",
    "USE_NUMBA",
    "bf16_products",
    "dense_bf16",
    "multiply_array",
    "search_tilings",
]
