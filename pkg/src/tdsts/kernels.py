"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it was built; otherwise the
numpy fallback is loaded.  Setting ``TDSTS_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("TDSTS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

apply_generator = _impl.apply_generator
expm_apply = _impl.expm_apply
hermite_functions = _impl.hermite_functions
op_norm_bound = _impl.op_norm_bound
N_TERMS = 12
