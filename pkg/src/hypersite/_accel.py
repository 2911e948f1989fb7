"""numba switch for the sweep kernels.

Set ``HYPERSITE_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
Both paths consume the same pre-drawn random numbers, so trajectories agree.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("HYPERSITE_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")


def maybe_njit(func):
    """Return (jitted, python) pair; jitted is the python function when numba is off."""
    if NUMBA_AVAILABLE:
        return numba.njit(cache=True)(func), func
    return func, func
