"""Import-time selection of the eigensolver kernel.

The compiled Cython extension is preferred; the pure-Python twin is used
when the extension is unavailable or when SPCONVEX_FORCE_PYTHON=1 is set
(useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from . import _jacobi_py

if os.environ.get("SPCONVEX_FORCE_PYTHON", "") == "1":
    _impl = _jacobi_py
else:
    try:
        from . import _jacobi as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _jacobi_py

jacobi_eigh = _impl.jacobi_eigh
BACKEND = "compiled" if _impl.COMPILED else "python"
