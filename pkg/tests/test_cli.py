import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from symvar.cli import run_config


def _write(tmp_path, name, cfg):
    p = tmp_path / name
    p.write_text(json.dumps(cfg, indent=1))
    return p


def _grid1d(n=4):
    return {"dimension": 1, "n": n, "radius": 1.0, "p": 2, "qW": 4}


def test_polarize_demo_swap(tmp_path):
    cfg = _write(tmp_path, "c.json", {
        "schema": "symvar-config/1",
        "subcommand": "polarize",
        "grid": _grid1d(),
        "parameters": {"values": [0, 0, 1, 0], "axis": [1.0], "offset": 0.0},
        "seed": 0,
    })
    code = run_config(cfg, out_dir=str(tmp_path))
    assert code == 0
    out = json.loads((tmp_path / "polarize_function.json").read_text())
    assert out["values"] == [0.0, 1.0, 0.0, 0.0]


def test_zhong_radius_ten_digits(tmp_path, capsys):
    cfg = _write(tmp_path, "z.json", {
        "schema": "symvar-config/1",
        "subcommand": "zhong_radius",
        "grid": _grid1d(2),
        "parameters": {"weight": "linear", "rho": 1.0},
        "seed": 0,
    })
    code = run_config(cfg, out_dir=str(tmp_path))
    assert code == 0
    printed = capsys.readouterr().out
    assert f"{np.e - 1:.10f}" in printed
    csv = (tmp_path / "zhong_radius.csv").read_text()
    assert "linear" in csv


def test_unknown_keys_rejected(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", {
        "schema": "symvar-config/1",
        "subcommand": "polarize",
        "grid": _grid1d(),
        "parameters": {"values": [0, 0, 1, 0]},
        "bogus": 1,
    })
    code = run_config(cfg, out_dir=str(tmp_path))
    assert code == 1
    assert "bogus" in capsys.readouterr().err


def test_bad_schema_and_bad_json(tmp_path, capsys):
    cfg = _write(tmp_path, "bad2.json", {"schema": "other/9",
                                         "subcommand": "polarize",
                                         "grid": _grid1d()})
    assert run_config(cfg, out_dir=str(tmp_path)) == 1
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run_config(p, out_dir=str(tmp_path)) == 1
    err = capsys.readouterr().err
    assert "line" in err


def _engine_cfg(tmp_path, seed=3):
    return _write(tmp_path, f"eng{seed}.json", {
        "schema": "symvar-config/1",
        "subcommand": "symmetric_ekeland",
        "grid": _grid1d(),
        "functional": {"name": "double_well"},
        "parameters": {"u0": [0.4, 0.7, 0.55, 0.3], "sigma": 0.3,
                       "rho": 0.3, "variant": "V"},
        "seed": seed,
        "output": {"certificate": "cert.json"},
    })


def test_engine_run_and_determinism(tmp_path):
    cfg = _engine_cfg(tmp_path)
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert run_config(cfg, out_dir=str(d1)) == 0
    assert run_config(cfg, out_dir=str(d2)) == 0
    b1 = (d1 / "cert.json").read_bytes()
    b2 = (d2 / "cert.json").read_bytes()
    assert b1 == b2
    assert (d1 / "symmetric_ekeland.csv").read_bytes() == \
        (d2 / "symmetric_ekeland.csv").read_bytes()
    cert = json.loads(b1)
    assert cert["status"] == "PASS"
    assert cert["schema"] == "symvar-certificate/1"


def test_verify_subcommand_detects_corruption(tmp_path):
    cfg = _engine_cfg(tmp_path, seed=5)
    rundir = tmp_path / "run"
    assert run_config(cfg, out_dir=str(rundir)) == 0
    cert_path = rundir / "cert.json"
    cert = json.loads(cert_path.read_text())

    verify_cfg = _write(tmp_path, "verify.json", {
        "schema": "symvar-config/1",
        "subcommand": "verify_certificate",
        "grid": _grid1d(),
        "functional": {"name": "double_well"},
        "parameters": {"certificate_path": str(cert_path)},
        "seed": 0,
    })
    assert run_config(verify_cfg, out_dir=str(tmp_path)) == 0

    # corrupt the output point: shift v by 10·rho
    cert["v"]["values"] = [x + 3.0 for x in cert["v"]["values"]]
    bad_path = rundir / "cert_bad.json"
    bad_path.write_text(json.dumps(cert))
    verify_bad = _write(tmp_path, "verify_bad.json", {
        "schema": "symvar-config/1",
        "subcommand": "verify_certificate",
        "grid": _grid1d(),
        "functional": {"name": "double_well"},
        "parameters": {"certificate_path": str(bad_path)},
        "seed": 0,
    })
    assert run_config(verify_bad, out_dir=str(tmp_path)) == 2


def test_console_entry_point(tmp_path):
    cfg = _write(tmp_path, "c.json", {
        "schema": "symvar-config/1",
        "subcommand": "schwarz",
        "grid": _grid1d(),
        "parameters": {"values": [0.2, 0.0, 0.9, 0.5]},
        "seed": 0,
    })
    proc = subprocess.run([sys.executable, "-m", "symvar.cli", "run",
                           str(cfg), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    out = json.loads((tmp_path / "schwarz_function.json").read_text())
    assert out["values"] == [0.2, 0.9, 0.5, 0.0]


def test_sqps_csv_table(tmp_path):
    cfg = _write(tmp_path, "s.json", {
        "schema": "symvar-config/1",
        "subcommand": "sqps_sequence",
        "grid": _grid1d(),
        "functional": {"name": "quadratic"},
        "parameters": {"eps_schedule": [0.1, 0.05]},
        "seed": 1,
    })
    assert run_config(cfg, out_dir=str(tmp_path), n_samples=300) == 0
    rows = (tmp_path / "sqps_sequence.csv").read_text().strip().splitlines()
    assert rows[0].startswith("eps_h,status,symmetry_residual")
    assert len(rows) == 3


def test_lower_derivative_csv(tmp_path):
    cfg = _write(tmp_path, "ld.json", {
        "schema": "symvar-config/1",
        "subcommand": "lower_derivative",
        "grid": _grid1d(2),
        "parameters": {"g": "abs", "s": 0.0, "delta": 1e-3},
        "seed": 0,
    })
    assert run_config(cfg, out_dir=str(tmp_path)) == 0
    rows = (tmp_path / "lower_derivative.csv").read_text().strip().splitlines()
    assert len(rows) == 4
    assert float(rows[-1].split(",")[1]) == pytest.approx(-1.0, abs=0.01)


def test_env_var_output_dir(tmp_path, monkeypatch):
    outdir = tmp_path / "envout"
    monkeypatch.setenv("SYMVAR_OUT", str(outdir))
    cfg = _write(tmp_path, "e.json", {
        "schema": "symvar-config/1",
        "subcommand": "theta",
        "grid": _grid1d(2),
        "parameters": {"values": [-1.0, 2.0]},
        "seed": 0,
    })
    assert run_config(cfg) == 0
    out = json.loads((outdir / "theta_function.json").read_text())
    assert out["values"] == [1.0, 2.0]


def test_approx_symmetrize_subcommand_writes_word(tmp_path):
    cfg = _write(tmp_path, "a.json", {
        "schema": "symvar-config/1",
        "subcommand": "approx_symmetrize",
        "grid": _grid1d(4),
        "parameters": {"values": [0, 0, 1, 0], "rho": 0.01},
        "seed": 0,
    })
    assert run_config(cfg, out_dir=str(tmp_path)) == 0
    out = json.loads((tmp_path / "approx_symmetrize_function.json").read_text())
    assert out["values"] == [0.0, 1.0, 0.0, 0.0]
    assert out["polarizer_sequence"] == [{"axis": [1.0], "offset": 0.0}]


def test_shipped_schema_matches_registry():
    import symvar.cli as cli
    schema = json.loads(cli.CONFIG_SCHEMA_PATH.read_text())
    assert schema["$id"] == cli.SCHEMA
    assert set(schema["properties"]["subcommand"]["enum"]) == set(cli.HANDLERS)
    grid_keys = set(schema["properties"]["grid"]["properties"])
    assert grid_keys == {"dimension", "n", "radius", "p", "qW", "qV"}
