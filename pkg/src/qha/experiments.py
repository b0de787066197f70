"""Experiment runner: exact-identity suites and dilation sweeps.

Two kinds of runs. The identity suite draws seeded random (state, domain)
pairs and measures the residual of every exact identity in the calculus;
all residuals are rounding noise, so a residual above tolerance means a
broken kernel (or an injected fault). The sweeps dilate a base shape
through a grid of scales and record, per scale, the spectral and
accumulation metrics together with the finite inequalities that the
asymptotic theory rests on; every row is checked against those bounds
before it is written.

Configs are plain JSON; see ExperimentConfig.from_mapping for the schema.
Rows of a sweep are independent and run on a thread pool; results are
assembled in grid order, so outputs are identical for any thread count.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .accumulation import accumulate, l1_error, levelset_measure, reconstruction_identity_check
from .backend import mask_autocorr
from .convolution import fun_fun_conv, fun_op_conv, op_op_conv, s_tilde
from .errors import BoundViolation, ConfigError, NotABall
from .lattice import (
    Ball,
    Domain,
    ExplicitMask,
    PhaseLattice,
    Rectangle,
    ShapeSpec,
    rasterize,
    shape_fits,
)
from .localization import analyze, deficiency, localization_operator, plunge_count
from .serialize import fmt
from .states import DensityOperator, mixture, mstar_norm_sq, parse_state_spec, rank_one_state, state_decomposition

__all__ = [
    "Tolerances",
    "ExperimentConfig",
    "parse_shape",
    "shape_to_mapping",
    "random_vector",
    "random_state",
    "random_domain",
    "IdentityRecord",
    "IdentityReport",
    "run_identities",
    "SweepRow",
    "SweepRecord",
    "compute_sweep_row",
    "run_plunge_sweep",
    "run_convergence_sweep",
    "run_sharpness",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances; every field can be overridden from the config."""

    identity: float = 1e-8
    bound_slack: float = 1e-8
    eig_range: float = 1e-10
    trace: float = 1e-9
    trend_factor: float = 1.5
    band_ratio: float = 6.0

    @classmethod
    def from_mapping(cls, payload) -> "Tolerances":
        if payload is None:
            return cls()
        known = {f: getattr(cls, f) for f in cls.__dataclass_fields__}
        unknown = set(payload) - set(known)
        if unknown:
            raise ConfigError(f"unknown tolerance overrides {sorted(unknown)}")
        values = {}
        for key, value in payload.items():
            value = float(value)
            if not value > 0:
                raise ConfigError(f"tolerance {key!r} must be positive, got {value!r}")
            values[key] = value
        return cls(**values)

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


def parse_shape(payload) -> ShapeSpec:
    """Shape from its JSON form. Coordinates and sizes are in length units.

    Kinds: {"kind": "ball", "center": [x, y], "radius": r} (center optional,
    default origin); {"kind": "rectangle", "corner": [x, y], "widths":
    [wx, wy]}; {"kind": "explicit", "points": [[m, n], ...]} (lattice
    indices; only scale 1 rasterizes).
    """
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ConfigError(f"shape must be an object with a 'kind', got {payload!r}")
    kind = payload["kind"]
    extra = set(payload) - {"kind", "center", "radius", "corner", "widths", "points"}
    if extra:
        raise ConfigError(f"unknown shape keys {sorted(extra)}")
    try:
        if kind == "ball":
            center = payload.get("center", (0.0, 0.0))
            return Ball(center=(float(center[0]), float(center[1])),
                        radius=float(payload["radius"]))
        if kind == "rectangle":
            corner = payload["corner"]
            widths = payload["widths"]
            return Rectangle(corner=(float(corner[0]), float(corner[1])),
                             widths=(float(widths[0]), float(widths[1])))
        if kind == "explicit":
            return ExplicitMask(points=tuple((int(m), int(n)) for m, n in payload["points"]))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind!r} shape: {exc}") from exc
    raise ConfigError(f"unknown shape kind {kind!r}")


def shape_to_mapping(shape: ShapeSpec) -> dict:
    if isinstance(shape, Ball):
        return {"kind": "ball", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, Rectangle):
        return {"kind": "rectangle", "corner": list(shape.corner), "widths": list(shape.widths)}
    if isinstance(shape, ExplicitMask):
        return {"kind": "explicit", "points": [list(p) for p in shape.points]}
    raise TypeError(f"unknown shape {shape!r}")


_CONFIG_KEYS = {"N", "state", "shape", "r_grid", "deltas", "seed", "out", "tolerances"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep description.

    r_grid entries are dilation scales applied to the base shape, so a unit
    ball with r_grid [8, 16] sweeps disks of radius 8 and 16 length units.
    deltas feed both plunge counts and level-set measures and must lie in
    (0, 1). Validation rasterizes every scale up front: each must fit the
    torus guard and produce a nonempty domain.
    """

    n: int
    state: str
    shape: ShapeSpec
    r_grid: tuple
    deltas: tuple
    seed: int = 0
    out: str | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_mapping(cls, payload: dict, base_dir=None) -> "ExperimentConfig":
        if not isinstance(payload, dict):
            raise ConfigError(f"config must be a JSON object, got {type(payload).__name__}")
        unknown = set(payload) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        missing = {"N", "state", "shape", "r_grid", "deltas"} - set(payload)
        if missing:
            raise ConfigError(f"config missing required keys {sorted(missing)}")
        n = payload["N"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError(f"N must be a positive integer, got {n!r}")
        state = payload["state"]
        if not isinstance(state, str) or not state:
            raise ConfigError(f"state must be a nonempty spec string, got {state!r}")
        shape = parse_shape(payload["shape"])
        r_grid = tuple(float(r) for r in payload["r_grid"])
        if not r_grid:
            raise ConfigError("r_grid must be nonempty")
        if any(r <= 0 for r in r_grid):
            raise ConfigError(f"r_grid entries must be positive, got {list(r_grid)}")
        if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
            raise ConfigError(f"r_grid must be strictly increasing, got {list(r_grid)}")
        deltas = tuple(float(d) for d in payload["deltas"])
        if not deltas:
            raise ConfigError("deltas must be nonempty")
        if any(not 0 < d < 1 for d in deltas):
            raise ConfigError(f"deltas must lie in (0, 1), got {list(deltas)}")
        seed = payload.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        out = payload.get("out")
        if out is not None and not isinstance(out, str):
            raise ConfigError(f"out must be a directory string, got {out!r}")
        tolerances = Tolerances.from_mapping(payload.get("tolerances"))

        lattice = PhaseLattice(n)
        for r in r_grid:
            if not shape_fits(shape, r, lattice):
                raise ConfigError(
                    f"shape does not fit the N={n} torus at scale {r} "
                    f"(must stay within half the extent {lattice.extent / 2:.4g})")
            try:
                domain = rasterize(shape, r, lattice)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if domain.point_count == 0:
                raise ConfigError(f"shape rasterizes to an empty domain at scale {r}")
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        return cls(n=n, state=state, shape=shape, r_grid=r_grid, deltas=deltas,
                   seed=seed, out=out, tolerances=tolerances, base_dir=base)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_mapping(payload, base_dir=path.parent)

    def lattice(self) -> PhaseLattice:
        return PhaseLattice(self.n)

    def build_state(self) -> DensityOperator:
        return parse_state_spec(self.state, self.lattice(), search_dir=self.base_dir)

    def config_echo(self) -> dict:
        """JSON-able copy of the config, echoed into manifests."""
        return {
            "N": self.n,
            "state": self.state,
            "shape": shape_to_mapping(self.shape),
            "r_grid": list(self.r_grid),
            "deltas": list(self.deltas),
            "seed": self.seed,
            "out": self.out,
            "tolerances": self.tolerances.as_dict(),
        }


# -- seeded randomness --------------------------------------------------------------

def random_vector(rng, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_state(rng, lattice: PhaseLattice, rank: int = 3) -> DensityOperator:
    """Mixture of projectors onto random unit vectors, validated on build."""
    rank = min(rank, lattice.n)
    parts = [rank_one_state(random_vector(rng, lattice.n), label=f"random[{k}]")
             for k in range(rank)]
    weights = rng.random(rank) + 0.2
    return mixture(parts, weights / weights.sum(), label="random-mixture")


def random_domain(rng, lattice: PhaseLattice, fill: float | None = None) -> Domain:
    if fill is None:
        fill = rng.uniform(0.2, 0.6)
    mask = rng.random((lattice.n, lattice.n)) < fill
    if not mask.any():
        mask[rng.integers(lattice.n), rng.integers(lattice.n)] = True
    return Domain(lattice, mask)


# -- exact-identity suite -------------------------------------------------------------

@dataclass(frozen=True)
class IdentityRecord:
    name: str
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass(frozen=True)
class IdentityReport:
    n: int
    seed: int
    pairs: int
    records: tuple

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def csv_lines(self) -> list[str]:
        lines = ["identity,max_residual,tolerance,pass"]
        for r in self.records:
            lines.append(f"{r.name},{fmt(r.max_residual)},{fmt(r.tolerance)},{int(r.passed)}")
        return lines


def run_identities(n: int, seed: int = 0, pairs: int = 20,
                   tolerance: float = 1e-8, corrupt: bool = False) -> IdentityReport:
    """Measure every exact identity on seeded random states and domains.

    Per pair: two random mixed states S, T, a random domain, and a random
    real grid f. The identities checked, with the max residual over pairs:

      moyal_integral           w sum S*T = tr(S) tr(T)
      resolution_identity      1*S = tr(S) I
      basis_summation          sum_t S*(delta_t x delta_t) = tr(S)
      trace_identity           tr(chi*S) = |Omega| tr(S)
      second_moment_identity   tr(L^2) = w^2 sum counts(u) S~(u)
      cross_boundary_identity  tr(L) - tr(L^2) via spectra vs boundary sum
      reconstruction_identity  chi (*) S~ = sum_k lambda_k Q_S(h_k)
      associativity            (f*S)*T = f (*) (S*T)

    With corrupt=True a fault of size 1e-5 is injected into the computed
    localization operator, driving the three operator-derived rows above
    tolerance; this is the harness self-test behind the --corrupt flag.
    """
    lattice = PhaseLattice(n)
    rng = np.random.default_rng(seed)
    w = lattice.weight
    eye = np.eye(n)
    worst: dict[str, float] = {}

    def record(name, residual):
        worst[name] = max(worst.get(name, 0.0), float(residual))

    for _ in range(pairs):
        s = random_state(rng, lattice)
        t = random_state(rng, lattice)
        domain = random_domain(rng, lattice)
        f = rng.random((n, n))

        grid_st = op_op_conv(s.matrix, t.matrix)
        tr_s = complex(np.trace(s.matrix))
        tr_t = complex(np.trace(t.matrix))
        record("moyal_integral", abs(w * grid_st.sum() - tr_s * tr_t))

        res = fun_op_conv(np.ones((n, n)), s.matrix)
        record("resolution_identity", np.max(np.abs(res - tr_s * eye)))

        total = np.zeros((n, n), dtype=np.complex128)
        for tt in range(n):
            basis = np.zeros((n, n))
            basis[tt, tt] = 1.0
            total += op_op_conv(s.matrix, basis)
        record("basis_summation", np.max(np.abs(total - tr_s)))

        locop = localization_operator(domain, s)
        if corrupt:
            locop = locop.copy()
            locop[0, 0] += 1e-5
        record("trace_identity", abs(np.trace(locop) - domain.measure() * tr_s))

        sym = (locop + locop.conj().T) / 2
        stilde = np.real(s_tilde(s.matrix))
        counts = mask_autocorr(domain.mask)
        record("second_moment_identity",
               abs(float(np.vdot(sym, sym).real) - w * w * float(np.sum(stilde * counts))))

        spectral = float(np.trace(sym).real) - float(np.vdot(sym, sym).real)
        literal = w * w * float(np.sum(stilde * (domain.point_count - counts)))
        record("cross_boundary_identity", abs(spectral - literal))

        record("reconstruction_identity", reconstruction_identity_check(domain, s))

        lhs = op_op_conv(fun_op_conv(f, s.matrix), t.matrix)
        rhs = fun_fun_conv(f, op_op_conv(s.matrix, t.matrix))
        record("associativity", np.max(np.abs(lhs - rhs)))

    records = tuple(IdentityRecord(name, worst[name], tolerance) for name in
                    ("moyal_integral", "resolution_identity", "basis_summation",
                     "trace_identity", "second_moment_identity", "cross_boundary_identity",
                     "reconstruction_identity", "associativity"))
    return IdentityReport(n=n, seed=seed, pairs=pairs, records=records)


# -- dilation sweeps ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    r: float
    measure: float
    perimeter: float
    a_omega: int
    plunge: tuple
    deficiency: float
    l1_error: float
    rel_l1: float
    smoothed_l1: float
    levelsets: tuple
    projection_functional: float
    mstar_sq: float
    degenerate: bool


@dataclass(frozen=True)
class SweepRecord:
    deltas: tuple
    rows: tuple

    def header(self) -> str:
        plunge = ",".join(f"plunge_{d!r}" for d in self.deltas)
        levels = ",".join(f"levelset_{d!r}" for d in self.deltas)
        return (f"r,measure,perimeter,a_omega,{plunge},deficiency,l1_error,rel_l1,"
                f"smoothed_l1,{levels},projection_functional,mstar_sq,degenerate")

    def csv_lines(self) -> list[str]:
        lines = [self.header()]
        for row in self.rows:
            cells = [fmt(row.r), fmt(row.measure), fmt(row.perimeter), str(row.a_omega)]
            cells += [str(c) for c in row.plunge]
            cells += [fmt(row.deficiency), fmt(row.l1_error), fmt(row.rel_l1),
                      fmt(row.smoothed_l1)]
            cells += [fmt(v) for v in row.levelsets]
            cells += [fmt(row.projection_functional), fmt(row.mstar_sq),
                      str(int(row.degenerate))]
            lines.append(",".join(cells))
        return lines

    def column(self, name: str) -> list:
        return [getattr(row, name) for row in self.rows]


def _violation(r, name, detail):
    return BoundViolation(f"scale {r}: {name} violated: {detail}")


def compute_sweep_row(lattice: PhaseLattice, state: DensityOperator, sdec,
                      stilde_grid: np.ndarray, msq: float, shape: ShapeSpec,
                      deltas, tol: Tolerances, r: float) -> SweepRow:
    """Analyze one dilation scale and enforce the per-row inequalities.

    Checks, in order: eigenvalue range and trace, the plunge count bound
    (threshold form with constant max(1/delta, 1/(1-delta))), deficiency
    nonnegativity, the ceiling bound rho <= 1 and mass identity, the
    smoothed comparison bound l1(rho, chi conv S~) <= 1 + 2 E |Omega|, the
    deficiency estimate E <= 2 sqrt(msq |dOmega| / |Omega|) and its stated
    relative form, and the lower chain l1 >= tr - tr^2. Violations raise
    BoundViolation; the caller applies the sweep-wide epsilon bound.
    """
    n = lattice.n
    domain = rasterize(shape, r, lattice)
    result = analyze(domain, state)
    vals = result.eig.eigenvalues
    if vals.min() < -tol.eig_range or vals.max() > 1 + tol.eig_range:
        raise _violation(r, "eigenvalue range",
                         f"spectrum [{vals.min()!r}, {vals.max()!r}] outside [0, 1]")
    measure = result.measure
    if abs(float(vals.sum()) - measure) > tol.trace * n:
        raise _violation(r, "trace identity",
                         f"sum {vals.sum()!r} vs measure {measure!r}")
    per = domain.perimeter()

    sym = (result.operator + result.operator.conj().T) / 2
    pf = float(np.trace(sym).real) - float(np.vdot(sym, sym).real)

    counts = tuple(plunge_count(result, d) for d in deltas)
    for d, count in zip(deltas, counts):
        bound = max(1 / d, 1 / (1 - d)) * pf + tol.bound_slack
        if abs(count - measure) > bound:
            raise _violation(r, f"plunge count bound (delta={d})",
                             f"|{count} - {measure!r}| > {bound!r}")

    e = deficiency(result)
    if e < -tol.bound_slack:
        raise _violation(r, "deficiency nonnegativity", f"E = {e!r}")

    rho = accumulate(result, state, state_decomposition=sdec)
    if float(rho.grid.max()) > 1 + 1e-10:
        raise _violation(r, "accumulation ceiling", f"max rho = {rho.grid.max()!r}")
    if abs(rho.mass() - result.a_omega) > tol.bound_slack:
        raise _violation(r, "accumulation mass", f"{rho.mass()!r} vs {result.a_omega}")

    l1 = l1_error(rho)
    rel = l1 / measure
    chi_smooth = fun_fun_conv(domain.indicator(), stilde_grid)
    smoothed = float(np.abs(rho.grid - chi_smooth).sum()) / n
    if smoothed > 1 + 2 * e * measure + tol.bound_slack:
        raise _violation(r, "smoothed comparison bound",
                         f"{smoothed!r} > 1 + 2*{e!r}*{measure!r}")
    if e > 2 * math.sqrt(msq * per / measure) + tol.bound_slack:
        raise _violation(r, "deficiency estimate",
                         f"E = {e!r} vs 2*sqrt({msq!r}*{per!r}/{measure!r})")
    if smoothed / measure > 1 / measure + 4 * math.sqrt(msq * per / measure) + tol.bound_slack:
        raise _violation(r, "relative smoothed bound", f"{smoothed / measure!r}")
    if l1 + tol.bound_slack < pf:
        raise _violation(r, "lower chain", f"l1 {l1!r} < tr - tr^2 {pf!r}")

    levels = tuple(levelset_measure(rho, d) for d in deltas)
    return SweepRow(r=r, measure=measure, perimeter=per, a_omega=result.a_omega,
                    plunge=counts, deficiency=e, l1_error=l1, rel_l1=rel,
                    smoothed_l1=smoothed, levelsets=levels,
                    projection_functional=pf, mstar_sq=msq,
                    degenerate=result.degenerate)


def _sweep_rows(cfg: ExperimentConfig, threads: int = 1) -> SweepRecord:
    lattice = cfg.lattice()
    state = cfg.build_state()
    sdec = state_decomposition(state)
    stilde_grid = np.real(s_tilde(state.matrix))
    msq = mstar_norm_sq(state)

    def row(r):
        return compute_sweep_row(lattice, state, sdec, stilde_grid, msq,
                                 cfg.shape, cfg.deltas, cfg.tolerances, r)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(row, cfg.r_grid))
    else:
        rows = tuple(row(r) for r in cfg.r_grid)

    # dilation bound with epsilon = smallest perimeter in the sweep
    eps = min(row.perimeter for row in rows)
    if eps > 0:
        for row_ in rows:
            limit = (1 / eps + 2 * row_.mstar_sq) * row_.perimeter + cfg.tolerances.bound_slack
            if row_.l1_error > limit:
                raise _violation(row_.r, "dilation l1 bound",
                                 f"{row_.l1_error!r} > {limit!r}")
    return SweepRecord(deltas=cfg.deltas, rows=rows)


def run_plunge_sweep(cfg: ExperimentConfig, threads: int = 1) -> SweepRecord:
    """Sweep the R grid and check the plunge trend at delta = 0.5.

    The trend (ratio of plunge count to domain measure approaches 1, with
    at most one non-monotone step) is only asserted when the config lists
    delta 0.5 and has more than one scale; every other delta still gets the
    row-wise count bound.
    """
    record = _sweep_rows(cfg, threads=threads)
    if 0.5 in cfg.deltas and len(record.rows) > 1:
        k = cfg.deltas.index(0.5)
        ratios = [row.plunge[k] / row.measure for row in record.rows]
        drops = sum(1 for a, b in zip(ratios, ratios[1:]) if b < a)
        if drops > 1:
            raise BoundViolation(
                f"plunge ratio not increasing: {drops} non-monotone steps in {ratios}")
        if abs(1 - ratios[-1]) > abs(1 - ratios[0]) + 1e-9:
            raise BoundViolation(
                f"plunge ratio drifts away from 1: {ratios[0]!r} -> {ratios[-1]!r}")
    return record


def run_convergence_sweep(cfg: ExperimentConfig, threads: int = 1) -> SweepRecord:
    """Sweep the R grid and require the relative l1 error to shrink.

    With more than one scale, the first-row relative error must exceed the
    last-row one by the configured trend factor (default 1.5).
    """
    record = _sweep_rows(cfg, threads=threads)
    if len(record.rows) > 1:
        first = record.rows[0].rel_l1
        last = record.rows[-1].rel_l1
        if last * cfg.tolerances.trend_factor > first + cfg.tolerances.bound_slack:
            raise BoundViolation(
                f"relative l1 error fell only {first!r} -> {last!r}, "
                f"needs factor {cfg.tolerances.trend_factor}")
    return record


def run_sharpness(cfg: ExperimentConfig, threads: int = 1):
    """Ball-only sweep reporting the two-sided linear band of l1/R.

    Returns (record, band) where band maps the effective radii to l1/R
    ratios and carries their min/max and ratio; the ratio must stay within
    the configured band (default 6). The lower chain l1 >= tr - tr^2 is
    enforced per row by the shared row computation.
    """
    if not isinstance(cfg.shape, Ball):
        raise NotABall(f"sharpness sweep requires a ball shape, got {type(cfg.shape).__name__}")
    record = _sweep_rows(cfg, threads=threads)
    r_eff = [row.r * cfg.shape.radius for row in record.rows]
    ratios = [row.l1_error / re for row, re in zip(record.rows, r_eff)]
    band = {
        "r_eff": r_eff,
        "l1_over_r": ratios,
        "min": min(ratios),
        "max": max(ratios),
        "ratio": max(ratios) / min(ratios),
    }
    if band["ratio"] > cfg.tolerances.band_ratio:
        raise BoundViolation(
            f"sharpness band ratio {band['ratio']!r} exceeds {cfg.tolerances.band_ratio}")
    return record, band
