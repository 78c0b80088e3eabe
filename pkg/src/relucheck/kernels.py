"""Select the row-kernel implementation at import time.

Prefers the compiled extension; falls back to the pure-Python twin when
the extension is missing or RELUCHECK_PURE=1 is set. Both expose the
same functions with identical semantics, and the solver tests run
against whichever is active (the benchmark script compares the two).
"""

from __future__ import annotations

import os

if os.environ.get("RELUCHECK_PURE") == "1":
    from . import _rowops_py as _impl

    COMPILED = False
else:
    try:
        from . import _rowops as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _rowops_py as _impl

        COMPILED = False

row_axpy = _impl.row_axpy
row_scale = _impl.row_scale
row_dot = _impl.row_dot
row_combine = _impl.row_combine
row_idiv = _impl.row_idiv
nonzero_indices = _impl.nonzero_indices

__all__ = [
    "COMPILED",
    "row_axpy",
    "row_scale",
    "row_dot",
    "row_combine",
    "row_idiv",
    "nonzero_indices",
]
