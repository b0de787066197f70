from __future__ import annotations

import json

import numpy as np

from qha import PhaseLattice, load_grid_csv
from qha.cli import main


def _write_config(tmp_path, n=16, **over):
    lat = PhaseLattice(n)
    payload = {
        "N": n,
        "state": "rankone:gaussian",
        "shape": {"kind": "ball", "radius": lat.unit},
        "r_grid": [3.0, 5.0],
        "deltas": [0.25, 0.5],
    }
    payload.update(over)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return path


def test_no_arguments_is_a_usage_error(capsys):
    assert main([]) == 2
    capsys.readouterr()


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_identities_success_and_report(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["identities", "--n", "8", "--pairs", "2", "--out", str(out)])
    text = capsys.readouterr().out
    assert code == 0
    assert "moyal_integral" in text and "associativity" in text
    csv = (out / "identities.csv").read_text().splitlines()
    assert csv[0] == "identity,max_residual,tolerance,pass"
    assert len(csv) == 9
    manifest = json.loads((out / "manifest.json").read_text())
    assert "identities.csv" in manifest["artifacts"]
    assert manifest["command"] == "identities"


def test_identities_corrupt_exits_nonzero(capsys):
    assert main(["identities", "--n", "8", "--pairs", "1", "--corrupt"]) == 1
    capsys.readouterr()


def test_identities_trivial_lattice(capsys):
    assert main(["identities", "--n", "1", "--pairs", "1"]) == 0
    capsys.readouterr()


def test_missing_and_malformed_configs_are_usage_errors(tmp_path, capsys):
    assert main(["plunge"]) == 2
    assert main(["plunge", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["plunge", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_rectangle_config_fails_sharpness_with_usage_exit(tmp_path, capsys):
    cfg = _write_config(tmp_path, shape={"kind": "rectangle",
                                         "corner": [-0.25, -0.25],
                                         "widths": [0.5, 0.5]})
    assert main(["sharpness", "--config", str(cfg)]) == 2
    assert "ball" in capsys.readouterr().err


def test_plunge_writes_sweep_and_manifest(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["plunge", "--config", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("r,measure,perimeter,a_omega")
    assert len(lines) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "plunge"
    assert manifest["config"]["N"] == 16
    assert "sweep.csv" in manifest["artifacts"]


def test_sweep_without_out_prints_csv(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["converge", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("r,measure")
    assert len(out.strip().splitlines()) == 3


def test_sweep_csv_is_deterministic_across_runs_and_threads(tmp_path, capsys):
    cfg = _write_config(tmp_path, r_grid=[2.0, 4.0, 6.0])
    outs = [tmp_path / f"run{i}" for i in range(3)]
    assert main(["plunge", "--config", str(cfg), "--out", str(outs[0])]) == 0
    assert main(["plunge", "--config", str(cfg), "--out", str(outs[1])]) == 0
    assert main(["plunge", "--config", str(cfg), "--out", str(outs[2]),
                 "--threads", "3"]) == 0
    capsys.readouterr()
    blobs = [(p / "sweep.csv").read_bytes() for p in outs]
    assert blobs[0] == blobs[1] == blobs[2]


def test_threads_env_variable_is_honored(tmp_path, capsys, monkeypatch):
    cfg = _write_config(tmp_path)
    monkeypatch.setenv("QHA_THREADS", "2")
    assert main(["plunge", "--config", str(cfg)]) == 0
    monkeypatch.setenv("QHA_THREADS", "zero")
    assert main(["plunge", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_sharpness_writes_band(tmp_path, capsys):
    cfg = _write_config(tmp_path, n=32,
                        shape={"kind": "ball", "radius": PhaseLattice(32).unit},
                        r_grid=[4.0, 6.0, 8.0], deltas=[0.5])
    out = tmp_path / "out"
    assert main(["sharpness", "--config", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()
    band = json.loads((out / "band.json").read_text())
    assert band["ratio"] <= 6.0
    assert len(band["r_eff"]) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert "band.json" in manifest["artifacts"]


def test_accumulate_requires_a_single_scale(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["accumulate", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_accumulate_writes_distribution_artifacts(tmp_path, capsys):
    cfg = _write_config(tmp_path, r_grid=[4.0])
    out = tmp_path / "out"
    assert main(["accumulate", "--config", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()
    rho = load_grid_csv(out / "rho.csv")
    chi = load_grid_csv(out / "chi.csv")
    diff = load_grid_csv(out / "diff.csv")
    assert rho.shape == (16, 16)
    assert set(np.unique(chi)) <= {0.0, 1.0}
    assert np.allclose(diff, rho - chi, atol=0)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["A_Omega"] >= 1
    eig_lines = (out / "eigenvalues.csv").read_text().splitlines()
    assert eig_lines[0] == "k,lambda"
    assert len(eig_lines) == 17
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["metrics"]["l1_error"] >= 0


def test_accumulate_without_out_prints_json(tmp_path, capsys):
    cfg = _write_config(tmp_path, r_grid=[4.0])
    assert main(["accumulate", "--config", str(cfg)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["summary"]["A_Omega"] >= 1
    assert payload["metrics"]["max_rho"] <= 1 + 1e-10


def test_state_info_reports_validation(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"N": 16, "state": "thermal:lambda=0.5,K=4"}))
    out = tmp_path / "out"
    assert main(["state-info", "--config", str(path), "--out", str(out)]) == 0
    capsys.readouterr()
    info = json.loads((out / "state.json").read_text())
    assert info["accepted"] is True
    assert info["N"] == 16
    assert info["label"] == "thermal:lambda=0.5,K=4"
    assert info["mstar_sq"] > 0
    stilde = load_grid_csv(out / "stilde.csv")
    assert abs(stilde.sum() / 16 - 1.0) < 1e-9


def test_state_info_tolerates_sweep_keys(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["state-info", "--config", str(cfg)]) == 0
    # a human-readable line precedes the JSON payload
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["accepted"] is True


def test_seed_override_changes_identities_output(tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["identities", "--n", "8", "--pairs", "2", "--seed", "1",
                 "--out", str(out1)]) == 0
    assert main(["identities", "--n", "8", "--pairs", "2", "--seed", "2",
                 "--out", str(out2)]) == 0
    capsys.readouterr()
    assert (out1 / "identities.csv").read_text() != (out2 / "identities.csv").read_text()
