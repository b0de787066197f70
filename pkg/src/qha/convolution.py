"""Convolutions between phase-space functions and operators.

With weight w = 1/N all the continuous identities hold exactly as finite
sums: summing alpha_z(S) over the whole lattice gives N * tr(S) * I, so the
all-ones function convolved with S is tr(S) * I (resolution of the identity),
the total mass of S (*) T is tr(S) tr(T), and convolutions of functions and
operators associate.

Grids are indexed [m, n] like the lattice. Function-function convolution is
the w-weighted cyclic convolution.
"""
from __future__ import annotations

import numpy as np

from . import backend
from .operators import parity_conjugate

__all__ = [
    "fun_op_conv",
    "op_op_conv",
    "s_tilde",
    "fun_fun_conv",
    "reflect_grid",
]

_REAL_SNAP = 1e-10


def fun_op_conv(f: np.ndarray, s: np.ndarray) -> np.ndarray:
    """f (*) S = w * sum_z f(z) pi(z) S pi(z)*, an N x N operator matrix.

    Nonnegative f and positive S give a positive operator; f identically 1
    gives tr(S) * I exactly. Complex f is allowed.
    """
    f, s = _same_grid(f, s)
    fhat = f.shape[0] * np.fft.ifft(f, axis=1)
    return backend.weighted_shifts(fhat, s)


def op_op_conv(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """S (*) T: the grid z -> tr(S alpha_z(PTP)), symmetric in S and T.

    For rank-one S = psi x phi and T its parity conjugate this is the
    spectrogram |V_phi psi|^2; positive S, T give a nonnegative grid.
    """
    s, t = _same_grid(s, t)
    gmd = backend.diag_reduce(s, parity_conjugate(t))
    return s.shape[0] * np.fft.ifft(gmd, axis=1)


def s_tilde(s: np.ndarray) -> np.ndarray:
    """The phase-space autocorrelation S (*) (PSP), as the grid tr(S alpha_z(S)).

    Even in z, exactly translation invariant under conjugation of S by
    time-frequency shifts, and real whenever S is Hermitian (in which case a
    float grid is returned). For a density operator the grid is nonnegative
    with total mass w * sum = tr(S)^2 = 1.
    """
    s = np.asarray(s, dtype=np.complex128)
    gmd = backend.diag_reduce(s, s)
    grid = s.shape[0] * np.fft.ifft(gmd, axis=1)
    scale = float(np.max(np.abs(s))) if s.size else 0.0
    if float(np.max(np.abs(s - s.conj().T))) <= _REAL_SNAP * (1.0 + scale):
        return np.ascontiguousarray(grid.real)
    return grid


def fun_fun_conv(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Cyclic convolution with weight: (f * g)(z) = w sum_u f(u) g(z - u).

    Returns a float grid when both inputs are real.
    """
    f, g = _same_grid(f, g)
    out = np.fft.ifft2(np.fft.fft2(f) * np.fft.fft2(g)) / f.shape[0]
    if np.isrealobj(f) and np.isrealobj(g):
        return np.ascontiguousarray(out.real)
    return out


def reflect_grid(f: np.ndarray) -> np.ndarray:
    """Point reflection through the origin: (reflect f)(z) = f(-z)."""
    f = np.asarray(f)
    neg = (-np.arange(f.shape[0])) % f.shape[0]
    return np.ascontiguousarray(f[np.ix_(neg, neg)])


def _same_grid(a: np.ndarray, b: np.ndarray):
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square grid, got shape {a.shape}")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b
