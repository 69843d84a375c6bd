"""Optional numba acceleration.

Set ``LANEREP_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. Kernels decorated with :func:`njit` are written in the subset
numba compiles, so both paths execute the same source.
"""
import os

_disabled = os.environ.get("LANEREP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    import numba as _numba

    USE_NUMBA = True

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)

except ImportError:
    USE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
