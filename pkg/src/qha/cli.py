"""Command line entry points.

Subcommands: identities (exact-identity suite on random pairs), plunge,
converge, sharpness (config-driven dilation sweeps), accumulate (one-shot
export of an accumulated distribution), state-info (validate a state and
export its autocorrelation). Exit codes: 0 success, 1 computational
assertion failure (identity residual over tolerance, violated bound,
inconsistent dual routes), 2 usage or config errors.

Artifacts are only written when an output directory is known (--out flag
or the config's "out" entry); each artifact-writing run also writes
manifest.json with the config echo, artifact hashes and library versions.
Without an output directory results go to stdout.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from .accumulation import accumulate, l1_error
from .errors import (
    BadDelta,
    BadSmoother,
    BadWeights,
    BoundViolation,
    ConfigError,
    ConsistencyFailure,
    EmptyDomain,
    InvalidDensity,
    MismatchedState,
    NotABall,
    NotHermitian,
    ShapeTooLarge,
    ZeroVector,
)
from .experiments import (
    ExperimentConfig,
    run_convergence_sweep,
    run_identities,
    run_plunge_sweep,
    run_sharpness,
)
from .lattice import PhaseLattice, rasterize
from .localization import analyze, summarize
from .serialize import (
    save_eigenvalues_csv,
    save_grid_csv,
    write_manifest,
)
from .states import mstar_norm_sq, parse_state_spec, validate_density
from .convolution import s_tilde

_USAGE_ERRORS = (ConfigError, ShapeTooLarge, NotHermitian, ZeroVector, BadWeights,
                 BadSmoother, InvalidDensity, BadDelta, EmptyDomain, MismatchedState,
                 NotABall, OSError)
_COMPUTE_ERRORS = (BoundViolation, ConsistencyFailure)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qha",
        description="Phase-space convolution experiments: identity suites, "
                    "localization sweeps, accumulation exports.")
    sub = parser.add_subparsers(dest="command", required=True)

    ident = sub.add_parser("identities", help="run the exact-identity suite")
    ident.add_argument("--n", type=int, default=8, help="lattice size (default 8)")
    ident.add_argument("--seed", type=int, default=0)
    ident.add_argument("--pairs", type=int, default=20,
                       help="random (state, domain) pairs (default 20)")
    ident.add_argument("--tolerance", type=float, default=1e-8)
    ident.add_argument("--corrupt", action="store_true",
                       help="inject a fault to verify the suite detects it")
    ident.add_argument("--out", help="directory for identities.csv + manifest")
    ident.add_argument("--threads", type=int, default=None)

    for name, help_text in (("plunge", "eigenvalue plunge profile over dilations"),
                            ("converge", "accumulated distribution convergence sweep"),
                            ("sharpness", "two-sided linear error band for balls"),
                            ("accumulate", "export rho, chi and diff grids for one scale"),
                            ("state-info", "validate a state and export its autocorrelation")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, default=None, help="override config seed")
        cmd.add_argument("--threads", type=int, default=None,
                         help="sweep worker threads (default env QHA_THREADS or 1)")
    return parser


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        threads = args.threads
    else:
        raw = os.environ.get("QHA_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f"QHA_THREADS must be an integer, got {raw!r}")
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    return threads


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)
    return cfg


def _out_dir(cfg_out) -> Path | None:
    if cfg_out is None:
        return None
    path = Path(cfg_out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_lines(path: Path, lines: list[str]) -> Path:
    path.write_text("\n".join(lines) + "\n")
    return path


def _cmd_identities(args) -> int:
    report = run_identities(args.n, seed=args.seed, pairs=args.pairs,
                            tolerance=args.tolerance, corrupt=args.corrupt)
    for rec in report.records:
        status = "pass" if rec.passed else "FAIL"
        print(f"{rec.name}: max residual {rec.max_residual:.3e} "
              f"(tolerance {rec.tolerance:.1e}) {status}")
    out = _out_dir(args.out)
    if out is not None:
        csv_path = _write_lines(out / "identities.csv", report.csv_lines())
        echo = {"n": args.n, "seed": args.seed, "pairs": args.pairs,
                "tolerance": args.tolerance, "corrupt": args.corrupt}
        write_manifest(out, "identities", echo, [csv_path],
                       extra={"csv_schema": {"identities_columns":
                              report.csv_lines()[0].split(","), "version": 1}})
        print(f"wrote {csv_path}")
    return 0 if report.ok else 1


def _emit_sweep(command: str, cfg: ExperimentConfig, record, extra_artifacts=None,
                extra_manifest=None) -> None:
    out = _out_dir(cfg.out)
    if out is None:
        for line in record.csv_lines():
            print(line)
        return
    artifacts = [_write_lines(out / "sweep.csv", record.csv_lines())]
    if extra_artifacts:
        artifacts.extend(extra_artifacts(out))
    manifest_extra = {"csv_schema": {"sweep_columns": record.header().split(","),
                                     "version": 1}}
    if extra_manifest:
        manifest_extra.update(extra_manifest)
    write_manifest(out, command, cfg.config_echo(), artifacts, extra=manifest_extra)
    for path in artifacts:
        print(f"wrote {path}")


def _cmd_plunge(args) -> int:
    cfg = _load_config(args)
    record = run_plunge_sweep(cfg, threads=_resolve_threads(args))
    _emit_sweep("plunge", cfg, record)
    return 0


def _cmd_converge(args) -> int:
    cfg = _load_config(args)
    record = run_convergence_sweep(cfg, threads=_resolve_threads(args))
    _emit_sweep("converge", cfg, record)
    return 0


def _cmd_sharpness(args) -> int:
    cfg = _load_config(args)
    record, band = run_sharpness(cfg, threads=_resolve_threads(args))

    def band_artifact(out: Path):
        path = out / "band.json"
        path.write_text(json.dumps(band, sort_keys=True) + "\n")
        return [path]

    _emit_sweep("sharpness", cfg, record, extra_artifacts=band_artifact,
                extra_manifest={"band": band})
    print(f"band ratio {band['ratio']!r} (min {band['min']!r}, max {band['max']!r})")
    return 0


def _cmd_accumulate(args) -> int:
    cfg = _load_config(args)
    if len(cfg.r_grid) != 1:
        raise ConfigError(
            f"accumulate expects exactly one r_grid entry, got {len(cfg.r_grid)}")
    lattice = cfg.lattice()
    state = cfg.build_state()
    domain = rasterize(cfg.shape, cfg.r_grid[0], lattice)
    result = analyze(domain, state)
    rho = accumulate(result, state)
    l1 = l1_error(rho)
    summary = summarize(result, state)
    metrics = {"l1_error": l1, "rel_l1": l1 / result.measure,
               "mass": rho.mass(), "max_rho": float(rho.grid.max())}

    out = _out_dir(cfg.out)
    if out is None:
        print(json.dumps({"summary": summary, "metrics": metrics}, sort_keys=True))
        return 0
    artifacts = [
        save_grid_csv(out / "rho.csv", rho.grid),
        save_grid_csv(out / "chi.csv", domain.indicator()),
        save_grid_csv(out / "diff.csv", rho.grid - domain.indicator()),
        save_eigenvalues_csv(out / "eigenvalues.csv", result.eig.eigenvalues),
    ]
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True) + "\n")
    artifacts.append(summary_path)
    write_manifest(out, "accumulate", cfg.config_echo(), artifacts,
                   extra={"metrics": metrics})
    for path in artifacts:
        print(f"wrote {path}")
    return 0


_STATE_CONFIG_KEYS = {"N", "state", "out", "seed"}


def _cmd_state_info(args) -> int:
    # state-info only needs N and the state spec; sweep keys are not required
    path = Path(args.config)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(payload) - _STATE_CONFIG_KEYS - {"shape", "r_grid", "deltas", "tolerances"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    missing = {"N", "state"} - set(payload)
    if missing:
        raise ConfigError(f"config missing required keys {sorted(missing)}")
    n = payload["N"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"N must be a positive integer, got {n!r}")
    spec = payload["state"]
    if not isinstance(spec, str) or not spec:
        raise ConfigError(f"state must be a nonempty spec string, got {spec!r}")

    lattice = PhaseLattice(n)
    state = parse_state_spec(spec, lattice, search_dir=path.parent)
    report = validate_density(state.matrix)
    msq = mstar_norm_sq(state)
    info = dict(report.as_dict())
    info.update({"label": state.label, "N": n, "mstar_sq": msq,
                 "trace": float(np.trace(state.matrix).real)})
    print(f"{state.label}: accepted={report.accepted} mstar_sq={msq!r}")

    out_name = args.out if args.out is not None else payload.get("out")
    out = _out_dir(out_name)
    if out is None:
        print(json.dumps(info, sort_keys=True))
        return 0
    info_path = out / "state.json"
    info_path.write_text(json.dumps(info, sort_keys=True) + "\n")
    grid = np.real(s_tilde(state.matrix))
    artifacts = [info_path, save_grid_csv(out / "stilde.csv", grid)]
    echo = {"N": n, "state": spec, "out": out_name}
    write_manifest(out, "state-info", echo, artifacts)
    for p in artifacts:
        print(f"wrote {p}")
    return 0


_HANDLERS = {
    "identities": _cmd_identities,
    "plunge": _cmd_plunge,
    "converge": _cmd_converge,
    "sharpness": _cmd_sharpness,
    "accumulate": _cmd_accumulate,
    "state-info": _cmd_state_info,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except _COMPUTE_ERRORS as exc:
        print(f"qha: check failed: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"qha: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
