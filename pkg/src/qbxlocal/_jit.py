"""Backend switch for the hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba and a
vectorized numpy version. ``QBXLOCAL_BACKEND=numpy`` (or ``QBXLOCAL_DISABLE_JIT=1``)
selects the numpy path at import time; :func:`set_backend` switches at runtime.
"""

import os

try:
    from numba import njit as _numba_njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _initial_backend():
    if os.environ.get("QBXLOCAL_DISABLE_JIT", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("QBXLOCAL_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"QBXLOCAL_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


_BACKEND = _initial_backend()


def backend():
    return _BACKEND


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` kernels; returns the previous backend."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    old, _BACKEND = _BACKEND, name
    return old


def use_jit():
    return _BACKEND == "numba"


def njit(func=None, **kwargs):
    """``numba.njit`` with caching and IEEE float semantics; identity without numba."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("error_model", "numpy")
    if not HAVE_NUMBA:  # pragma: no cover
        if func is not None:
            return func
        return lambda f: f
    if func is not None:
        return _numba_njit(**kwargs)(func)
    return _numba_njit(**kwargs)


def dispatch(jit_impl, numpy_impl):
    """Pick the implementation for the active backend at call time."""
    return jit_impl if _BACKEND == "numba" else numpy_impl
