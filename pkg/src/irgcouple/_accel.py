"""Backend selection for the hot kernels.

Set ``IRGCOUPLE_DISABLE_NUMBA=1`` to force the pure numpy / pure Python code
paths.  Both paths produce bit-identical results; numba is only about speed.
"""
import os

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # tbb in some images is too old and only emits a warning; omp is
        # safe for concurrent calls from worker threads.
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False
    numba = None
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


ENV_FLAG = "IRGCOUPLE_DISABLE_NUMBA"


def use_numba():
    """True when the numba kernels should be dispatched to (read per call)."""
    if not HAVE_NUMBA:
        return False
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("1", "true", "yes")


def backend_name():
    return "numba" if use_numba() else "numpy"
