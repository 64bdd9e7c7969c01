"""Kernel backend selection.

The compiled Cython core is used when available; otherwise the numpy
fallback takes over.  Set SWLDPC_KERNEL=python or SWLDPC_KERNEL=compiled to
force a backend (the latter raises if the extension is missing).
"""

import os

from . import pure

_requested = os.environ.get("SWLDPC_KERNEL", "").strip().lower()

if _requested == "python":
    _impl = pure
    BACKEND = "python"
elif _requested in ("", "compiled"):
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = pure
        BACKEND = "python"
else:
    raise ValueError(
        f"unknown SWLDPC_KERNEL value {_requested!r}; use 'python' or 'compiled'"
    )

MAG_FLOOR = pure.MAG_FLOOR
MAG_CEIL = pure.MAG_CEIL

bp_run = _impl.bp_run
conv = _impl.conv
signed_fold = _impl.signed_fold

# numpy helper shared by both backends (density evolution uses it for the
# grid transforms, which are vectorized regardless of the BP/conv backend)
gamma_mag_array = pure.gamma_mag_array
