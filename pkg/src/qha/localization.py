"""Mixed-state localization operators and their spectral diagnostics.

The localization operator of a domain Omega and a state S is the weighted sum
of translated copies of S over the domain,

    L(Omega, S) = w * sum_{z in Omega} pi(z) S pi(z)*,

a Hermitian positive semidefinite matrix with eigenvalues in [0, 1] and trace
equal to the measure of Omega. Its spectrum concentrates near 1 inside and
near 0 outside, with a plunge region whose width scales with the perimeter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .convolution import fun_op_conv, s_tilde
from .errors import BadDelta, ConsistencyFailure, EmptyDomain
from .lattice import Domain
from .operators import EigenDecomposition, eigh
from .states import DensityOperator

__all__ = [
    "LocalizationResult",
    "localization_operator",
    "analyze",
    "plunge_count",
    "second_moment",
    "projection_functional",
    "deficiency",
    "summarize",
]

# eigenvalues this close across the truncation index A are flagged degenerate
TIE_TOL = 1e-8
# |Omega| within this of an integer counts as that integer when taking ceil
CEIL_GUARD = 1e-9


@dataclass(frozen=True)
class LocalizationResult:
    """Operator, spectrum, and bookkeeping for one (domain, state) pair."""

    operator: np.ndarray
    domain: Domain
    state_label: str
    eig: EigenDecomposition
    measure: float
    a_omega: int

    @property
    def degenerate(self) -> bool:
        return self.eig.degenerate

    @property
    def top_sum(self) -> float:
        """Sum of the eigenvalues above the truncation index."""
        return float(self.eig.eigenvalues[: self.a_omega].sum())


def localization_operator(domain: Domain, state: DensityOperator) -> np.ndarray:
    """w * sum over the domain of translated state copies; zero for empty Omega."""
    return fun_op_conv(domain.indicator(), state.matrix)


def ceil_measure(measure: float) -> int:
    """ceil(|Omega|) with a guard so near-integer measures do not jump up."""
    return int(math.ceil(measure - CEIL_GUARD))


def analyze(domain: Domain, state: DensityOperator,
            hermitian_tol: float = 1e-8) -> LocalizationResult:
    """Build the localization operator and decompose it.

    Sets the degeneracy flag when the eigenvalues on either side of the
    truncation index A = ceil(|Omega|) are within tie tolerance, in which
    case any truncated quantity depends on the (deterministic but arbitrary)
    eigenbasis choice inside the tied cluster.
    """
    op = localization_operator(domain, state)
    eig = eigh(op, hermitian_tol=hermitian_tol)
    measure = domain.measure()
    a_omega = ceil_measure(measure)
    vals = eig.eigenvalues
    if 1 <= a_omega < vals.shape[0]:
        degenerate = bool(abs(vals[a_omega - 1] - vals[a_omega]) < TIE_TOL)
    else:
        degenerate = False
    if degenerate:
        eig = replace(eig, degenerate=True)
    return LocalizationResult(op, domain, state.label, eig, measure, a_omega)


def plunge_count(result: LocalizationResult, delta: float) -> int:
    """#{k : lambda_k > 1 - delta} for 0 < delta < 1."""
    if not 0 < delta < 1:
        raise BadDelta(f"delta must be in (0, 1), got {delta}")
    return int(np.count_nonzero(result.eig.eigenvalues > 1 - delta))


def second_moment(domain: Domain, state: DensityOperator,
                  stilde: np.ndarray | None = None) -> float:
    """w^2 * double sum over Omega x Omega of S~(z - z').

    Equals tr(L^2); computed from the autocorrelation grid and the integer
    displacement counts of the mask, without forming the operator.
    """
    if stilde is None:
        stilde = s_tilde(state.matrix)
    counts = backend.mask_autocorr(domain.mask)
    w = domain.lattice.weight
    return float(w * w * np.sum(np.real(stilde) * counts))


def projection_functional(domain: Domain, state: DensityOperator,
                          stilde: np.ndarray | None = None,
                          operator: np.ndarray | None = None,
                          tol: float | None = None) -> float:
    """tr(L) - tr(L^2), computed two independent ways.

    Spectral route: traces of the operator matrix. Cross-boundary route:
    w^2 * sum over z in Omega, z' outside of S~(z - z'). The routes must
    agree within tol (default 1e-9 * N); disagreement raises
    ConsistencyFailure. Returns the spectral value.
    """
    n = domain.lattice.n
    if tol is None:
        tol = 1e-9 * n
    if operator is None:
        operator = localization_operator(domain, state)
    sym = (operator + operator.conj().T) / 2
    tr = float(np.trace(sym).real)
    tr_sq = float(np.vdot(sym, sym).real)
    spectral = tr - tr_sq

    if stilde is None:
        stilde = s_tilde(state.matrix)
    counts = backend.mask_autocorr(domain.mask)
    npts = domain.point_count
    w = domain.lattice.weight
    literal = float(w * w * np.sum(np.real(stilde) * (npts - counts)))

    if abs(spectral - literal) > tol:
        raise ConsistencyFailure(
            f"projection functional routes disagree: spectral {spectral!r} vs "
            f"cross-boundary {literal!r} (tol {tol:.3e})"
        )
    return spectral


def deficiency(result: LocalizationResult) -> float:
    """E(Omega) = 1 - (sum of top A eigenvalues) / |Omega|; always >= 0."""
    if result.measure <= 0:
        raise EmptyDomain("deficiency requires a domain of positive measure")
    return 1.0 - result.top_sum / result.measure


def summarize(result: LocalizationResult, state: DensityOperator,
              stilde: np.ndarray | None = None) -> dict:
    """Summary record used by the CLI export."""
    return {
        "measure": result.measure,
        "A_Omega": result.a_omega,
        "trace": float(np.trace(result.operator).real),
        "second_moment": second_moment(result.domain, state, stilde=stilde),
        "projection_functional": projection_functional(
            result.domain, state, stilde=stilde, operator=result.operator),
        "degenerate": result.degenerate,
    }
