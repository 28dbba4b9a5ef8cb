"""Kernel backend selection.

Prefers the compiled extension (``diamondgap._kernels``) and falls back
to the pure-Python implementation when it is not built.  Set
``DIAMONDGAP_FORCE_PURE=1`` to force the fallback (used by the backend
equivalence tests and the benchmark).
"""

import os

if os.environ.get("DIAMONDGAP_FORCE_PURE", "") == "1":
    from . import _purekernels as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _purekernels as _impl

jacobi_rotate = _impl.jacobi_rotate
simplex_grid_max = _impl.simplex_grid_max


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return _impl.BACKEND
