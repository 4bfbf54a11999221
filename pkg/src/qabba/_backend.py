"""Pick the compiled kernels when available.

Set ``QABBA_PURE_PYTHON=1`` to force the pure-Python loops.
"""
import os

from . import _pykernels

pure = _pykernels

if os.environ.get("QABBA_PURE_PYTHON", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

kernels = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

segment_sse = kernels.segment_sse
compress_breakpoints = kernels.compress_breakpoints
dtw_sq = kernels.dtw_sq
ga_sweep = kernels.ga_sweep
