"""Density operators and the window constructions that generate them.

A density operator is Hermitian, positive semidefinite, and has unit trace.
Shipped constructors: rank-one projections (in particular onto the periodized
Gaussian window), convex mixtures, thermal mixtures over a discrete Hermite
family, and smoothed states f (*) S for a nonnegative unit-mass grid f. The
parity operator is provided as the classical nonexample: it is unitary and
Hermitian but not positive, and the quadratic time-frequency distribution it
generates takes negative values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .convolution import fun_op_conv, s_tilde
from .errors import (
    BadSmoother,
    BadWeights,
    ConfigError,
    InvalidDensity,
    ZeroVector,
)
from .lattice import PhaseLattice
from .operators import eigh

__all__ = [
    "DensityOperator",
    "ValidationReport",
    "WindowFamily",
    "gaussian_window",
    "hermite_family",
    "rank_one_state",
    "gaussian_state",
    "mixture",
    "thermal_state",
    "smoothed_state",
    "parity_operator",
    "validate_density",
    "mstar_norm_sq",
    "parse_state_spec",
]


@dataclass(frozen=True)
class DensityOperator:
    """A validated state: Hermitian, positive, unit-trace N x N matrix."""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def lattice(self) -> PhaseLattice:
        return PhaseLattice(self.n)


@dataclass(frozen=True)
class ValidationReport:
    """Measured residuals of the three density-operator invariants."""

    hermitian_residual: float
    min_eigenvalue: float
    trace_error: float
    tol: float

    @property
    def hermitian_ok(self) -> bool:
        return self.hermitian_residual <= self.tol

    @property
    def positive_ok(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def trace_ok(self) -> bool:
        return self.trace_error <= self.tol

    @property
    def accepted(self) -> bool:
        return self.hermitian_ok and self.positive_ok and self.trace_ok

    def as_dict(self) -> dict:
        return {
            "hermitian_residual": self.hermitian_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "trace_error": self.trace_error,
            "tol": self.tol,
            "accepted": self.accepted,
        }


def validate_density(matrix: np.ndarray, tol: float = 1e-10) -> ValidationReport:
    """Check Hermiticity, positivity, and unit trace; report the residuals."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    herm = float(np.max(np.abs(matrix - matrix.conj().T)))
    sym = (matrix + matrix.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    trace_err = abs(complex(np.trace(matrix)) - 1.0)
    return ValidationReport(herm, min_eig, float(trace_err), tol)


def _make_density(matrix: np.ndarray, label: str, tol: float = 1e-9) -> DensityOperator:
    report = validate_density(matrix, tol)
    if not report.accepted:
        raise InvalidDensity(f"{label}: {report.as_dict()}")
    return DensityOperator(matrix, label)


def _periodization_copies(lattice: PhaseLattice) -> int:
    # enough torus periods that the dropped Gaussian tail, including the
    # polynomial growth of high-order Hermite factors, stays below 1e-14
    return max(4, math.ceil(12 / math.sqrt(lattice.n)) + 1)


def gaussian_window(lattice: PhaseLattice) -> np.ndarray:
    """Unit-norm periodized Gaussian g(t) = sum_j exp(-pi l^2 (t + jN)^2).

    Even under t -> -t mod N; its spectrogram against itself peaks at the
    origin of phase space.
    """
    n = lattice.n
    copies = _periodization_copies(lattice)
    t = np.arange(n)
    j = np.arange(-copies, copies + 1)
    x = lattice.unit * (t[None, :] + n * j[:, None])
    g = np.exp(-np.pi * x**2).sum(axis=0)
    return g / np.linalg.norm(g)


@dataclass(frozen=True)
class WindowFamily:
    """Orthonormal signal vectors; vectors[k] is the k-th window."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.vectors.shape[0]


def hermite_family(lattice: PhaseLattice, count: int) -> WindowFamily:
    """First `count` periodized Hermite functions, orthonormalized in order.

    Samples the normalized Hermite functions at spacing l via the stable
    three-term recurrence, periodizes over the torus, then Gram-Schmidts in
    index order (sampled Hermites are not exactly orthogonal on Z_N). Parity
    alternates even/odd with k, since periodized sampling preserves it.
    """
    n = lattice.n
    if not 1 <= count <= n:
        raise ValueError(f"family size must be in [1, {n}], got {count}")
    copies = _periodization_copies(lattice)
    t = np.arange(n)
    j = np.arange(-copies, copies + 1)
    x = lattice.unit * (t[None, :] + n * j[:, None])
    y = math.sqrt(2 * math.pi) * x
    rows = np.empty((count, n), dtype=np.float64)
    prev2 = np.zeros_like(y)
    prev1 = np.exp(-(y**2) / 2)
    rows[0] = prev1.sum(axis=0)
    for k in range(1, count):
        cur = math.sqrt(2.0 / k) * y * prev1 - math.sqrt((k - 1) / k) * prev2
        rows[k] = cur.sum(axis=0)
        prev2, prev1 = prev1, cur
    return WindowFamily(_orthonormalize(rows))


def _orthonormalize(rows: np.ndarray) -> np.ndarray:
    out = np.empty_like(rows)
    for k, v in enumerate(rows):
        v = v.copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for e in out[:k]:
                v -= np.dot(e, v) * e
        norm = np.linalg.norm(v)
        if norm < 1e-10:
            raise ValueError(f"window {k} is numerically dependent on its predecessors")
        out[k] = v / norm
    return out


def rank_one_state(phi: np.ndarray, label: str = "rankone") -> DensityOperator:
    """The projection phi (x) phi onto a unit vector (renormalized internally)."""
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(phi)
    if norm < 1e-12:
        raise ZeroVector("cannot project onto a zero vector")
    phi = phi / norm
    return _make_density(np.outer(phi, phi.conj()), label)


def gaussian_state(lattice: PhaseLattice) -> DensityOperator:
    return rank_one_state(gaussian_window(lattice), label="rankone:gaussian")


def mixture(states, weights, label: str | None = None) -> DensityOperator:
    """Convex combination sum_i w_i S_i of density operators."""
    states = list(states)
    weights = np.asarray(weights, dtype=np.float64)
    if len(states) == 0 or len(states) != weights.shape[0]:
        raise BadWeights(f"{len(states)} states vs {weights.shape[0]} weights")
    if np.any(weights < 0):
        raise BadWeights("weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-10:
        raise BadWeights(f"weights sum to {weights.sum()!r}, expected 1")
    n = states[0].n
    if any(s.n != n for s in states):
        raise ValueError("mixture components live on different lattices")
    acc = np.zeros((n, n), dtype=np.complex128)
    for w, s in zip(weights, states):
        acc += w * s.matrix
    if label is None:
        label = "mixture(" + ",".join(f"{s.label}*{w!r}" for w, s in zip(weights, states)) + ")"
    return _make_density(acc, label)


def thermal_state(lattice: PhaseLattice, lam: float, count: int,
                  label: str | None = None) -> DensityOperator:
    """Truncated thermal mixture: weights proportional to lam^k over the
    first `count` Hermite windows."""
    if not 0 < lam < 1:
        raise BadWeights(f"thermal parameter must be in (0, 1), got {lam}")
    family = hermite_family(lattice, count)
    weights = lam ** np.arange(count)
    weights /= weights.sum()
    components = [rank_one_state(v, label=f"hermite[{k}]") for k, v in enumerate(family.vectors)]
    if label is None:
        label = f"thermal:lambda={lam!r},K={count}"
    return mixture(components, weights, label=label)


def smoothed_state(f: np.ndarray, state: DensityOperator,
                   label: str | None = None) -> DensityOperator:
    """f (*) S for a nonnegative grid f of unit mass w * sum f = 1."""
    f = np.asarray(f)
    if np.iscomplexobj(f):
        if np.max(np.abs(f.imag)) > 0:
            raise BadSmoother("smoothing function must be real")
        f = f.real
    if f.shape != (state.n, state.n):
        raise BadSmoother(f"smoother shape {f.shape} does not match state ({state.n})")
    if f.min() < 0:
        raise BadSmoother(f"smoothing function has negative values (min {f.min()!r})")
    mass = f.sum() / state.n
    if abs(mass - 1.0) > 1e-10:
        raise BadSmoother(f"smoothing function has mass {mass!r}, expected 1")
    if label is None:
        label = f"smoothed({state.label})"
    return _make_density(fun_op_conv(f, state.matrix), label)


def parity_operator(lattice: PhaseLattice) -> np.ndarray:
    """Permutation matrix of t -> -t mod N. Hermitian and unitary, with
    eigenvalues +-1, hence NOT a density operator; its quadratic distribution
    is the classical phase-space distribution that goes negative."""
    n = lattice.n
    p = np.zeros((n, n), dtype=np.float64)
    t = np.arange(n)
    p[t, (-t) % n] = 1.0
    return p


def mstar_norm_sq(state) -> float:
    """First absolute moment w * sum_z S~(z) |z| of the autocorrelation.

    |z| is the torus distance to the origin. Exactly invariant under
    conjugating the state by a time-frequency shift, because the
    autocorrelation grid itself is translation invariant.
    """
    matrix = state.matrix if isinstance(state, DensityOperator) else np.asarray(state)
    lattice = PhaseLattice(matrix.shape[0])
    grid = np.real(s_tilde(matrix))
    return float(lattice.weight * np.sum(grid * lattice.distance_grid()))


def state_decomposition(state: DensityOperator):
    """Spectral decomposition of the state, for reuse across many evaluations."""
    return eigh(state.matrix, hermitian_tol=1e-8)


# -- state spec grammar ----------------------------------------------------------

def parse_state_spec(spec: str, lattice: PhaseLattice,
                     search_dir: Path | None = None) -> DensityOperator:
    """Build a state from a spec string.

    Forms: ``rankone:gaussian``; ``thermal:lambda=<x>,K=<k>``;
    ``mixture:<file>`` (JSON with "weights" and "components" spec lists);
    ``smoothed:<f-file>,<base-spec>`` (grid CSV, then a nested spec);
    ``matrix:<file>`` (operator-matrix JSON, validated as a density).
    Relative file paths resolve against ``search_dir`` (default: cwd).
    """
    from . import serialize

    base = Path(search_dir) if search_dir is not None else Path.cwd()
    head, _, rest = spec.partition(":")
    try:
        if head == "rankone":
            if rest != "gaussian":
                raise ConfigError(f"unknown rankone window {rest!r} (expected 'gaussian')")
            return gaussian_state(lattice)
        if head == "thermal":
            params = dict(item.split("=", 1) for item in rest.split(",") if item)
            try:
                lam = float(params.pop("lambda"))
                count = int(params.pop("K"))
            except KeyError as missing:
                raise ConfigError(f"thermal spec needs lambda and K, missing {missing}")
            if params:
                raise ConfigError(f"unknown thermal parameters {sorted(params)}")
            return thermal_state(lattice, lam, count)
        if head == "mixture":
            return _mixture_from_file(base / rest, lattice, base)
        if head == "smoothed":
            f_file, _, base_spec = rest.partition(",")
            if not base_spec:
                raise ConfigError("smoothed spec needs '<f-file>,<base-spec>'")
            f = serialize.load_grid_csv(base / f_file)
            return smoothed_state(f, parse_state_spec(base_spec, lattice, search_dir))
        if head == "matrix":
            matrix = serialize.load_operator_json(base / rest)
            if matrix.shape[0] != lattice.n:
                raise ConfigError(
                    f"matrix file is {matrix.shape[0]}x{matrix.shape[0]}, lattice is N={lattice.n}")
            return _make_density(matrix, label=f"matrix:{rest}")
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot build state {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown state spec {spec!r}")


def _mixture_from_file(path: Path, lattice: PhaseLattice, base: Path) -> DensityOperator:
    import json

    payload = json.loads(Path(path).read_text())
    weights = payload["weights"]
    components = [parse_state_spec(c, lattice, base) for c in payload["components"]]
    return mixture(components, weights, label=f"mixture:{path.name}")
