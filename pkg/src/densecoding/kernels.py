"""Backend selection for the swept-receiver kernel.

The compiled extension is used when it was built; otherwise the NumPy/SciPy
implementation takes over. Setting ``DENSECODING_PURE_PYTHON=1`` forces the
fallback.
"""
import os

from . import _fallback

try:
    if os.environ.get("DENSECODING_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by DENSECODING_PURE_PYTHON")
    from . import _kernels as compiled
except ImportError:
    compiled = None

fallback = _fallback

if compiled is not None:
    sweep_detect = compiled.sweep_detect
    BACKEND = "cython"
else:
    sweep_detect = _fallback.sweep_detect
    BACKEND = "numpy"
