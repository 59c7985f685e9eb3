"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``GOURUIN_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("GOURUIN_PURE_PYTHON") == "1":
    _impl = None
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = None

BACKEND = "cython" if _impl is not None else "python"

SIDE_LOWER = _pykernels.SIDE_LOWER
SIDE_UPPER = _pykernels.SIDE_UPPER
STATUS_OK = _pykernels.STATUS_OK
STATUS_NONFINITE = _pykernels.STATUS_NONFINITE

simulate_exact_batch = (_impl or _pykernels).simulate_exact_batch
python_simulate_exact_batch = _pykernels.simulate_exact_batch
exact_path = _pykernels.exact_path
