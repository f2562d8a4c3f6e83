"""Hot-kernel backend selection.

Imports the compiled extension when it is available, otherwise the numpy
fallback. Set BCOSFIRE_PURE=1 to force the fallback (used by the backend
benchmark and the parity tests). Both implementations are bit-identical.
"""

from __future__ import annotations

import os

from . import _kernels_np

if os.environ.get("BCOSFIRE_PURE", "0") not in ("", "0"):
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_np
        BACKEND = "numpy"

correlate2d = _impl.correlate2d
wmax_h = _impl.wmax_h
wmax_v = _impl.wmax_v
