"""Quadratic time-frequency distributions and their accumulation over domains.

For a state S with spectral decomposition sum_j s_j u_j (x) u_j, the
distribution of a signal psi is the weighted sum of spectrograms

    Q_S(psi)(z) = sum_j s_j |V_{u_j} psi(z)|^2 = <S pi(z)* psi, pi(z)* psi>,

a nonnegative grid of total mass ||psi||^2 whenever S is a density operator.
Accumulating Q_S over the top A = ceil(|Omega|) eigenfunctions of the
localization operator of Omega yields a [0, 1]-valued grid that approximates
the domain indicator; the error metrics below quantify how well.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import fun_fun_conv, s_tilde
from .errors import BadDelta, MismatchedState
from .lattice import Domain
from .localization import LocalizationResult, analyze
from .operators import EigenDecomposition, eigh, stft
from .states import DensityOperator

__all__ = [
    "AccumulatedDistribution",
    "cohen_distribution",
    "accumulate",
    "l1_error",
    "levelset_measure",
    "reconstruction_identity_check",
]

# relative cutoff below which state eigenvalues are treated as numerically zero
_RANK_CUTOFF = 1e-14


@dataclass(frozen=True)
class AccumulatedDistribution:
    """Sum of Q_S over the top A eigenfunctions of a localization operator."""

    grid: np.ndarray
    domain: Domain
    a_omega: int
    degenerate: bool
    state_label: str

    def __post_init__(self):
        g = np.ascontiguousarray(self.grid, dtype=np.float64)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    def mass(self) -> float:
        return float(self.grid.sum() / self.domain.lattice.n)


def cohen_distribution(state, psi: np.ndarray,
                       decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """Q_S(psi) as a real (N, N) grid.

    `state` may be a DensityOperator or any Hermitian matrix (the parity
    operator nonexample included); nonnegativity of the output is guaranteed
    only for positive states. Pass a precomputed decomposition when
    evaluating many signals against the same state.
    """
    matrix = state.matrix if isinstance(state, DensityOperator) else np.asarray(state)
    if decomposition is None:
        decomposition = eigh(matrix, hermitian_tol=1e-8)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    vals = decomposition.eigenvalues
    cutoff = _RANK_CUTOFF * float(np.max(np.abs(vals))) if vals.size else 0.0
    out = np.zeros((psi.shape[0], psi.shape[0]), dtype=np.float64)
    for lam, vec in zip(vals, decomposition.eigenvectors.T):
        if abs(lam) <= cutoff:
            continue
        v = stft(psi, vec)
        out += lam * (v.real**2 + v.imag**2)
    return out


def accumulate(result: LocalizationResult, state: DensityOperator,
               state_decomposition: EigenDecomposition | None = None) -> AccumulatedDistribution:
    """Sum Q_S over the top A_Omega eigenfunctions of the analyzed operator.

    The result must have been produced from the same state (labels are
    compared) and lattice; carries the degeneracy flag through.
    """
    if result.state_label != state.label:
        raise MismatchedState(
            f"analysis was for state {result.state_label!r}, got {state.label!r}")
    n = state.n
    if result.operator.shape[0] != n:
        raise MismatchedState(
            f"analysis lattice N={result.operator.shape[0]} vs state N={n}")
    if state_decomposition is None:
        state_decomposition = eigh(state.matrix, hermitian_tol=1e-8)
    grid = np.zeros((n, n), dtype=np.float64)
    for k in range(result.a_omega):
        grid += cohen_distribution(state, result.eig.eigenvectors[:, k],
                                   decomposition=state_decomposition)
    return AccumulatedDistribution(grid, result.domain, result.a_omega,
                                   result.degenerate, state.label)


def l1_error(rho: AccumulatedDistribution) -> float:
    """w * sum |rho - chi_Omega|, the L1 distance to the domain indicator."""
    diff = np.abs(rho.grid - rho.domain.indicator())
    return float(diff.sum() / rho.domain.lattice.n)


def levelset_measure(rho: AccumulatedDistribution, delta: float) -> float:
    """Measure of {z : |rho(z) - chi_Omega(z)| > delta}; empty for delta > 2."""
    if delta <= 0:
        raise BadDelta(f"delta must be positive, got {delta}")
    diff = np.abs(rho.grid - rho.domain.indicator())
    return float(np.count_nonzero(diff > delta) / rho.domain.lattice.n)


def reconstruction_identity_check(domain: Domain, state: DensityOperator) -> float:
    """Max pointwise deviation between chi_Omega * S~ (cyclic convolution)
    and the full eigen-expansion sum_k lambda_k Q_S(h_k).

    The two sides exercise disjoint code paths (FFT convolution vs
    eigendecomposition plus spectrogram sums); both equal the same function
    exactly, so the deviation is pure rounding noise.
    """
    stilde = s_tilde(state.matrix)
    left = fun_fun_conv(domain.indicator(), np.real(stilde))
    result = analyze(domain, state)
    sdec = eigh(state.matrix, hermitian_tol=1e-8)
    right = np.zeros_like(left)
    for lam, vec in zip(result.eig.eigenvalues, result.eig.eigenvectors.T):
        right += lam * cohen_distribution(state, vec, decomposition=sdec)
    return float(np.max(np.abs(left - right)))
