"""Kernel selection: the compiled extension when importable, else the pure-Python twin.

Set ``RELGRID_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("RELGRID_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

relation_matrix = _impl.relation_matrix
embed_roots = _impl.embed_roots
find_witness = _impl.find_witness
