"""Kernel lane selection.

The compiled extension is used when importable; set OSCSEG_PURE_PYTHON=1
to force the numpy fallback. Both lanes expose the same four functions and
agree to floating-point noise; `BACKEND` records which one is active.
"""

import os

if os.environ.get("OSCSEG_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

design_matrix = _impl.design_matrix
signal_eval = _impl.signal_eval
rss_value = _impl.rss_value
xtx_xty = _impl.xtx_xty
