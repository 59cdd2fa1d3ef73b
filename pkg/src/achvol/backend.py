"""Kernel backend selection.

The compiled extension is preferred when importable; setting
``ACHVOL_PURE_PYTHON=1`` in the environment forces the numpy fallback
(useful for benchmarking and for debugging the compiled kernels).
"""

import os

from . import _kernels_py

if os.environ.get("ACHVOL_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

conv_trunc = _impl.conv_trunc
# The recurrences are not hot; both backends share the numpy versions.
series_inv = _kernels_py.series_inv
series_sqrt = _kernels_py.series_sqrt


def backend_name() -> str:
    """Name of the active kernel backend: ``compiled`` or ``python``."""
    return _impl.BACKEND_NAME
