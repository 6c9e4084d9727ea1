"""Backend selection for the hot loops.

Kernels are written once as plain Python over numpy arrays and compiled with
``numba.njit`` when numba is importable. Setting ``TRUNCVAR_DISABLE_NUMBA=1``
(or any of ``true``/``yes``) forces the interpreted numpy path, which is the
reference the compiled kernels are benchmarked and tested against.
"""

import os

_FLAG = os.environ.get("TRUNCVAR_DISABLE_NUMBA", "").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USE_NUMBA = _numba is not None and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"


def kernel(func):
    """Compile ``func`` in nopython mode when the numba backend is active.

    The undecorated function stays reachable as ``.py_func`` on both
    backends so tests and benchmarks can always call the interpreted path.
    """
    if USE_NUMBA:
        compiled = _numba.njit(cache=True, nogil=True)(func)
        return compiled
    func.py_func = func
    return func
