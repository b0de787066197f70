"""Operators on the N-dimensional signal space.

Signals are complex vectors indexed by t in Z_N. The elementary symmetry of
phase space is the time-frequency shift

    (pi(m, n) psi)(t) = exp(2 pi i n t / N) * psi((t - m) mod N),

i.e. modulation after translation. Conjugation by pi(z) translates an
operator in phase space; composing two shifts costs only a unimodular phase,

    pi(m, n) pi(m', n') = exp(-2 pi i m n' / N) * pi(m + m', n + n'),

so the conjugation action is an exact group action (phases cancel).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian
from .lattice import PhaseLattice

__all__ = [
    "tf_shift",
    "parity_conjugate",
    "translate_op",
    "stft",
    "EigenDecomposition",
    "eigh",
    "trace",
    "adjoint",
    "matmul",
    "apply",
]


def tf_shift(lattice: PhaseLattice, m: int, n: int) -> np.ndarray:
    """Unitary matrix of the time-frequency shift pi(m, n)."""
    size = lattice.n
    t = np.arange(size)
    mat = np.zeros((size, size), dtype=np.complex128)
    mat[t, (t - m) % size] = np.exp(2j * np.pi * (n % size) * t / size)
    return mat


def parity_conjugate(s: np.ndarray) -> np.ndarray:
    """Conjugation by the parity operator: (PSP)[a, b] = S[-a, -b].

    An involution that preserves trace, Hermiticity and positivity.
    """
    s = np.asarray(s)
    _require_square(s)
    neg = (-np.arange(s.shape[0])) % s.shape[0]
    return np.ascontiguousarray(s[np.ix_(neg, neg)])


def translate_op(s: np.ndarray, z) -> np.ndarray:
    """pi(z) S pi(z)*, computed as an index shift plus a phase twist.

    Entrywise, (alpha_z S)[a, b] = exp(2 pi i n (a-b)/N) S[a-m, b-m] for
    z = (m, n), which avoids forming the shift matrices.
    """
    s = np.asarray(s)
    _require_square(s)
    size = s.shape[0]
    m, n = int(z[0]), int(z[1])
    rolled = np.roll(s, (m, m), axis=(0, 1))
    col = np.exp(2j * np.pi * (n % size) * np.arange(size) / size)
    return rolled * np.outer(col, col.conj())


def stft(psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Short-time Fourier transform grid V[m, n] = <psi, pi(m,n) phi>.

    Row m is the FFT of psi * conj(phi shifted by m); the full N x N grid
    costs O(N^2 log N).
    """
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if psi.shape != phi.shape:
        raise ValueError("signals must have equal length")
    size = psi.shape[0]
    t = np.arange(size)
    shifted = phi[(t[None, :] - t[:, None]) % size]
    return np.fft.fft(psi[None, :] * shifted.conj(), axis=1)


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix, eigenvalues sorted descending.

    eigenvectors[:, k] is the unit eigenvector paired with eigenvalues[k].
    `degenerate` is set by consumers that truncate the spectrum when the
    eigenvalues on either side of the cut are within tie tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        vals = np.ascontiguousarray(self.eigenvalues, dtype=np.float64)
        vecs = np.ascontiguousarray(self.eigenvectors, dtype=np.complex128)
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def eigh(a: np.ndarray, hermitian_tol: float = 1e-8) -> EigenDecomposition:
    """Eigendecomposition of a (numerically) Hermitian matrix.

    The input is symmetrized before decomposition; raises NotHermitian when
    the max-entry deviation from the adjoint exceeds hermitian_tol. Output
    order is deterministic for fixed input bytes.
    """
    a = np.asarray(a)
    _require_square(a)
    residual = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if residual > hermitian_tol:
        raise NotHermitian(
            f"max |A - A*| = {residual:.3e} exceeds tolerance {hermitian_tol:.1e}"
        )
    h = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    return EigenDecomposition(vals[::-1].copy(), vecs[:, ::-1].copy())


def trace(a: np.ndarray) -> complex:
    a = np.asarray(a)
    _require_square(a)
    return complex(np.trace(a))


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a).conj().T)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def apply(a: np.ndarray, psi: np.ndarray) -> np.ndarray:
    a, psi = np.asarray(a), np.asarray(psi).reshape(-1)
    if a.shape[1] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} applied to {psi.shape}")
    return a @ psi


def _require_square(a: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
