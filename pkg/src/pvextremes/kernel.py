"""Backend selection: compiled cell kernel with a pure-numpy fallback.

Set PVEXTREMES_BACKEND=pure (or =compiled) to force a backend; by default the
compiled extension is used when importable.
"""

import os

from . import _kernel_py

_choice = os.environ.get("PVEXTREMES_BACKEND", "").strip().lower()

if _choice == "pure":
    _impl = _kernel_py
    BACKEND = "pure"
else:
    try:
        from . import _kernel_cy as _impl
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _kernel_py
        BACKEND = "pure"

PIVOT_TOL = _kernel_py.PIVOT_TOL
BALL_TOL = _kernel_py.BALL_TOL
HULL_TOL = _kernel_py.HULL_TOL

cell_vertices = _impl.cell_vertices
box_replicate_maxima = _impl.box_replicate_maxima
