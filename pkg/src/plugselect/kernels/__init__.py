"""Hot-kernel backend selection.

Two interchangeable implementations exist: a Cython extension
(``plugselect.kernels._compiled``) and a pure-numpy fallback
(``plugselect.kernels._numpy``).  The compiled one is used when the
import succeeds; set ``PLUGSELECT_BACKEND={auto|cython|numpy}`` before
import to force a choice, or call :func:`set_backend` at runtime.
Results agree across backends to float64 rounding (not bit-exactly),
so any single run should stick to one backend.
"""
from __future__ import annotations

import os

import numpy as np

from ..errors import ConfigError
from . import _numpy as _numpy_backend

try:
    from . import _compiled as _compiled_backend
except ImportError:  # pragma: no cover - build without the extension
    _compiled_backend = None

_BACKENDS = {"numpy": _numpy_backend}
if _compiled_backend is not None:
    _BACKENDS["cython"] = _compiled_backend


def _select_initial():
    choice = os.environ.get("PLUGSELECT_BACKEND", "auto").strip().lower()
    if choice in ("auto", ""):
        return _BACKENDS.get("cython", _numpy_backend)
    if choice == "cython" and "cython" not in _BACKENDS:
        raise ImportError(
            "PLUGSELECT_BACKEND=cython but the compiled extension is not "
            "importable; rebuild the package or use PLUGSELECT_BACKEND=numpy"
        )
    if choice not in _BACKENDS:
        raise ImportError(
            f"PLUGSELECT_BACKEND={choice!r} is not one of auto|cython|numpy"
        )
    return _BACKENDS[choice]


_active = _select_initial()


def backend_name() -> str:
    """Name of the backend behind the module-level kernel functions."""
    return _active.NAME


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ConfigError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        )
    _active = _BACKENDS[name]


def get_backend(name: str):
    """The raw backend module (for benchmarking both side by side)."""
    if name not in _BACKENDS:
        raise ConfigError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        )
    return _BACKENDS[name]


def _c(arr: np.ndarray, ndim: int, what: str) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out.ndim != ndim:
        raise ConfigError(f"{what} must be {ndim}-D, got shape {out.shape}")
    return out


def temporal_forward(x, w, b):
    x = _c(x, 3, "input")
    w = _c(w, 2, "temporal kernels")
    b = _c(b, 1, "temporal biases")
    if w.shape[1] > x.shape[2]:
        raise ConfigError(
            f"kernel width {w.shape[1]} exceeds input length {x.shape[2]}"
        )
    if b.shape[0] != w.shape[0]:
        raise ConfigError("temporal bias count must match kernel count")
    return _active.temporal_forward(x, w, b)


def temporal_backward_input(g, w):
    return _active.temporal_backward_input(
        _c(g, 4, "gradient"), _c(w, 2, "temporal kernels")
    )


def temporal_backward_params(g, x, width: int):
    return _active.temporal_backward_params(
        _c(g, 4, "gradient"), _c(x, 3, "input"), width
    )


def spatial_forward(a, w, b):
    a = _c(a, 4, "activations")
    w = _c(w, 3, "spatial kernels")
    b = _c(b, 1, "spatial biases")
    if w.shape[1:] != a.shape[1:3]:
        raise ConfigError(
            f"spatial kernel shape {w.shape} does not match activations "
            f"{a.shape}"
        )
    return _active.spatial_forward(a, w, b)


def spatial_backward_input(g, w):
    return _active.spatial_backward_input(
        _c(g, 3, "gradient"), _c(w, 3, "spatial kernels")
    )


def spatial_backward_params(g, a):
    return _active.spatial_backward_params(
        _c(g, 3, "gradient"), _c(a, 4, "activations")
    )


def avgpool_forward(a, width: int):
    a = _c(a, 3, "activations")
    if width < 1 or width > a.shape[2]:
        raise ConfigError(f"pool width {width} invalid for length {a.shape[2]}")
    return _active.avgpool_forward(a, width)


def avgpool_backward(g, width: int, out_len: int):
    return _active.avgpool_backward(_c(g, 3, "gradient"), width, out_len)
