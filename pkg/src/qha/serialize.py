"""File formats: operator matrices, phase-space grids, domains, manifests.

All floating-point values are written with repr() (shortest round-trip
representation), so every format round-trips bit-exactly and repeated runs
produce byte-identical files. Manifests are JSON with sorted keys and carry
no timestamps.
"""
from __future__ import annotations

import hashlib
import json
import platform
from pathlib import Path

import numpy as np

from .lattice import Domain, PhaseLattice, domain_from_points

__all__ = [
    "fmt",
    "save_operator_json",
    "load_operator_json",
    "save_operator_csv",
    "load_operator_csv",
    "save_grid_csv",
    "load_grid_csv",
    "save_phase_function",
    "save_grid_json",
    "load_grid_json",
    "save_domain_json",
    "load_domain_json",
    "save_eigenvalues_csv",
    "load_eigenvalues_csv",
    "sha256_file",
    "write_manifest",
    "versions",
]


def fmt(x: float) -> str:
    """Shortest decimal representation that round-trips to the same float."""
    return repr(float(x))


def _grid_rows(a: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(a, dtype=np.float64)]


# -- operator matrices (row-major re/im pairs) --------------------------------

def save_operator_json(path, matrix: np.ndarray) -> Path:
    matrix = np.asarray(matrix, dtype=np.complex128)
    n = matrix.shape[0]
    entries = [[float(v.real), float(v.imag)] for v in matrix.reshape(-1)]
    payload = {"N": n, "entries": entries}
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path

def load_operator_json(path) -> np.ndarray:
    payload = json.loads(Path(path).read_text())
    n = int(payload["N"])
    entries = payload["entries"]
    if len(entries) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return flat.reshape(n, n)

def save_operator_csv(path, matrix: np.ndarray) -> Path:
    """One matrix row per line; entries as alternating re,im columns."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    lines = []
    for row in matrix:
        cells = []
        for v in row:
            cells.append(fmt(v.real))
            cells.append(fmt(v.imag))
        lines.append(",".join(cells))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path

def load_operator_csv(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().strip().splitlines():
        vals = [float(c) for c in line.split(",")]
        rows.append([complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)])
    return np.array(rows, dtype=np.complex128)


# -- phase-space function grids ------------------------------------------------

def save_grid_csv(path, grid: np.ndarray) -> Path:
    """N rows by N columns of real values, no header."""
    grid = np.asarray(grid, dtype=np.float64)
    lines = [",".join(fmt(v) for v in row) for row in grid]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path

def load_grid_csv(path) -> np.ndarray:
    rows = [[float(c) for c in line.split(",")]
            for line in Path(path).read_text().strip().splitlines()]
    return np.array(rows, dtype=np.float64)

def save_phase_function(directory, stem: str, grid: np.ndarray) -> list[Path]:
    """Write <stem>.csv with the real part, plus <stem>_imag.csv when the
    imaginary part is not identically zero. Returns the written paths."""
    directory = Path(directory)
    grid = np.asarray(grid)
    written = [save_grid_csv(directory / f"{stem}.csv", np.real(grid))]
    if np.iscomplexobj(grid) and np.any(grid.imag != 0.0):
        written.append(save_grid_csv(directory / f"{stem}_imag.csv", grid.imag))
    return written

def save_grid_json(path, grid: np.ndarray) -> Path:
    grid = np.asarray(grid)
    payload = {"N": grid.shape[0], "real": _grid_rows(np.real(grid))}
    if np.iscomplexobj(grid) and np.any(grid.imag != 0.0):
        payload["imag"] = _grid_rows(grid.imag)
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path

def load_grid_json(path) -> np.ndarray:
    payload = json.loads(Path(path).read_text())
    real = np.array(payload["real"], dtype=np.float64)
    if "imag" in payload:
        return real + 1j * np.array(payload["imag"], dtype=np.float64)
    return real


# -- domains -------------------------------------------------------------------

def save_domain_json(path, domain: Domain) -> Path:
    payload = {"N": domain.lattice.n, "points": [list(p) for p in domain.points()]}
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True) + "\n")
    return path

def load_domain_json(path) -> Domain:
    payload = json.loads(Path(path).read_text())
    lattice = PhaseLattice(int(payload["N"]))
    return domain_from_points(lattice, [tuple(p) for p in payload["points"]])


# -- eigenvalue lists ------------------------------------------------------------

def save_eigenvalues_csv(path, eigenvalues: np.ndarray) -> Path:
    lines = ["k,lambda"]
    for k, lam in enumerate(np.asarray(eigenvalues, dtype=np.float64), start=1):
        lines.append(f"{k},{fmt(lam)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path

def load_eigenvalues_csv(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()[1:]
    return np.array([float(line.split(",")[1]) for line in lines], dtype=np.float64)


# -- manifests -------------------------------------------------------------------

def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()

def versions() -> dict:
    from . import __version__
    try:
        import numba
        numba_version = numba.__version__
    except ImportError:
        numba_version = None
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba_version,
    }

def write_manifest(directory, command: str, config_echo: dict,
                   artifact_paths: list[Path], extra: dict | None = None) -> Path:
    """JSON manifest: config echo, sha256 per artifact, library versions."""
    from . import backend
    directory = Path(directory)
    manifest = {
        "command": command,
        "config": config_echo,
        "backend": backend.active_backend(),
        "artifacts": {p.name: sha256_file(p) for p in artifact_paths},
        "versions": versions(),
        "schema_version": 1,
    }
    if extra:
        manifest.update(extra)
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
