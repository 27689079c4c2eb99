"""Kernel backend selection.

The compiled extension is preferred; ``COMMAUG_PURE_PYTHON=1`` (any
non-empty value) forces the pure-Python fallback. Both produce
bit-identical results, so the choice only affects speed.
"""

import os

if os.environ.get("COMMAUG_PURE_PYTHON"):
    from . import _core_py as kernels
else:
    try:
        from . import _core as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as kernels

BACKEND = kernels.BACKEND_NAME
local_move = kernels.local_move
