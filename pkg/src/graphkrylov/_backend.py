"""Kernel backend selection.

The compiled ``_core`` extension is preferred; the numpy/scipy fallback is
used when it is not built or when ``GRAPHKRYLOV_BACKEND=python`` is set.
"""
import os
import types

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

_BACKENDS = {"python": _fallback}
if _core is not None:
    _BACKENDS["cython"] = _core

kernels: types.ModuleType = _fallback
name = "python"


def available():
    return sorted(_BACKENDS)


def use(backend):
    """Switch the active kernel backend (``"cython"``, ``"python"`` or ``"auto"``)."""
    global kernels, name
    if backend == "auto":
        backend = "cython" if "cython" in _BACKENDS else "python"
    if backend not in _BACKENDS:
        raise ValueError(f"backend {backend!r} unavailable; have {available()}")
    kernels = _BACKENDS[backend]
    name = backend
    return name


use(os.environ.get("GRAPHKRYLOV_BACKEND", "auto"))
