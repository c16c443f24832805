"""Kernel backend selection.

The compiled extension is preferred when built; the pure-numpy fallback keeps
the package importable from a plain source tree. SEPFACTORY_BACKEND=python or
=cython forces the choice at import time; set_backend() switches at runtime
(used by the benchmark and the backend-agreement tests).
"""

import os

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None

_BACKENDS = {"python": _kernels_py}
if _kernels_cy is not None:
    _BACKENDS["cython"] = _kernels_cy


def _initial() -> str:
    forced = os.environ.get("SEPFACTORY_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(
                f"SEPFACTORY_BACKEND={forced!r} not available; "
                f"built backends: {sorted(_BACKENDS)}"
            )
        return forced
    return "cython" if "cython" in _BACKENDS else "python"


_active = _initial()


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; built: {sorted(_BACKENDS)}")
    global _active
    _active = name


def jacobi_sweeps(a, v, max_sweeps, off_target):
    return _BACKENDS[_active].jacobi_sweeps(a, v, max_sweeps, off_target)


def hestenes_sweeps(a, v, max_sweeps, rel_tol):
    return _BACKENDS[_active].hestenes_sweeps(a, v, max_sweeps, rel_tol)


def xorshift_block(state, count):
    return _BACKENDS[_active].xorshift_block(state, count)
