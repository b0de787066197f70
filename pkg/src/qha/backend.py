"""Kernel backend selection.

The hot contractions (diagonal reduction for operator-operator convolution,
weighted-shift accumulation for function-operator convolution, mask
autocorrelation counts) have two interchangeable implementations: numba
compiled loops and a pure-numpy FFT path. The environment variable
QHA_BACKEND forces one ("numba" or "numpy"); when unset, numba is preferred
if it imports. Selection happens per call, so a process can switch at runtime.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_numpy

_numba_mod = None
_numba_failed = False


def _load_numba():
    global _numba_mod, _numba_failed
    if _numba_mod is None and not _numba_failed:
        try:
            from . import _kernels_numba
            _numba_mod = _kernels_numba
        except ImportError:
            _numba_failed = True
    return _numba_mod


def available_backends() -> tuple[str, ...]:
    return ("numpy", "numba") if _load_numba() is not None else ("numpy",)


def active_backend() -> str:
    choice = os.environ.get("QHA_BACKEND", "").strip().lower()
    if not choice:
        return "numba" if _load_numba() is not None else "numpy"
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if _load_numba() is None:
            raise RuntimeError("QHA_BACKEND=numba but numba is not importable")
        return "numba"
    raise ValueError(f"unrecognized QHA_BACKEND value {choice!r}; use 'numba' or 'numpy'")


def _mod():
    return _numba_mod if active_backend() == "numba" else _kernels_numpy


def diag_reduce(s: np.ndarray, tch: np.ndarray) -> np.ndarray:
    s = np.ascontiguousarray(s, dtype=np.complex128)
    tch = np.ascontiguousarray(tch, dtype=np.complex128)
    return _mod().diag_reduce(s, tch)


def weighted_shifts(fhat: np.ndarray, s: np.ndarray) -> np.ndarray:
    fhat = np.ascontiguousarray(fhat, dtype=np.complex128)
    s = np.ascontiguousarray(s, dtype=np.complex128)
    return _mod().weighted_shifts(fhat, s)


def mask_autocorr(mask: np.ndarray) -> np.ndarray:
    mask = np.ascontiguousarray(mask, dtype=bool)
    return _mod().mask_autocorr(mask)
