"""Backend selection for the finite-field rank kernel.

The compiled extension is used when it was built and the modulus fits in 31
bits; otherwise the pure-Python implementation runs.  Setting the environment
variable ``BITRIPLE_PURE_PYTHON=1`` before import forces the fallback.
"""

from __future__ import annotations

import os
from typing import Sequence

from bitriple import _rank_py

try:
    if os.environ.get("BITRIPLE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python backend requested")
    from bitriple import _rank as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_COMPILED_LIMIT = 2**31


def rank_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    if _compiled is not None and p < _COMPILED_LIMIT:
        return _compiled.rank_mod_p(rows, ncols, p)
    return _rank_py.rank_mod_p(rows, ncols, p)


def nullity_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    """Dimension of the kernel ``{x : A x = 0}`` over ``F_p``."""
    return ncols - rank_mod_p(rows, ncols, p)
