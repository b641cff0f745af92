"""Numba switch for the hot kernels.

Set ``MQCENSUS_NO_NUMBA=1`` to run every kernel as plain Python/numpy.
The flag is read once at import time.
"""

import os

_DISABLED = os.environ.get("MQCENSUS_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba as _nb

    USE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    _nb = None
    USE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise."""
    if USE_NUMBA:
        kwargs.setdefault("cache", True)
        return _nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
