"""End-to-end checks of the command-line interface (in-process via main())."""

import filecmp
import json
import subprocess
import sys

import pytest

from ferro2d import parse_config
from ferro2d.cli import main

TINY = """
model.l1_prime = 0.01
model.l2 = 0.01
model.c1 = 2.0
model.c2 = 8.0
model.c3 = 2.0
model.xi = 1.0
model.eta1 = 1.0
model.eta2 = 1.0
grid.n = 9
solver.delta_t = 1e-4
solver.max_time = 4e-4
scenario.kind = degree_k
output.snapshot_every = 2
"""

ARTIFACTS = (
    "config.txt",
    "snapshot_initial.csv",
    "snapshot_000002.csv",
    "snapshot_final.csv",
    "energy.csv",
    "iterations.csv",
    "summary.json",
)


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_writes_all_artifacts(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TINY)
    out = tmp_path / "out"
    assert main(["run", cfg, "--output-dir", str(out)]) == 0
    for name in ARTIFACTS:
        assert (out / name).is_file(), name
    report = capsys.readouterr().out
    assert "steps=4" in report and "steady=false" in report

    # config.txt reparses to the executed configuration
    cfg_back = parse_config((out / "config.txt").read_text())
    assert cfg_back.output_dir == str(out)
    assert cfg_back.n == 9 and cfg_back.snapshot_every == 2

    summary = json.loads((out / "summary.json").read_text())
    assert summary["steps"] == 4 and summary["grid_n"] == 9


def test_run_is_deterministic_byte_for_byte(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--output-dir", str(a)]) == 0
    assert main(["run", cfg, "--output-dir", str(b)]) == 0
    for name in ARTIFACTS:
        if name == "config.txt":
            continue  # embeds the differing output directory
        assert filecmp.cmp(a / name, b / name, shallow=False), name


def test_config_error_exit_code_and_messages(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "model.l2 = 0.01\nmodel.bogus = 1\n")
    assert main(["run", cfg]) == 1
    err = capsys.readouterr().err
    lines = [l for l in err.splitlines() if l.strip()]
    assert lines and all(l.startswith("config error: ") for l in lines)
    assert any("unknown key 'model.bogus'" in l for l in lines)
    assert any("missing required key" in l for l in lines)


def test_solver_failure_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TINY + "solver.max_inner_iters = 1\n")
    assert main(["run", cfg, "--output-dir", str(tmp_path / "out")]) == 2
    assert "solver failure:" in capsys.readouterr().err


def test_io_error_exit_codes(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TINY)
    assert main(["energy", str(tmp_path / "missing.csv"), cfg]) == 3
    assert "i/o error:" in capsys.readouterr().err

    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,snapshot\n")
    assert main(["energy", str(bad), cfg]) == 3
    assert "file format error:" in capsys.readouterr().err


def test_energy_subcommand_matches_recorded_series(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TINY)
    out = tmp_path / "out"
    assert main(["run", cfg, "--output-dir", str(out)]) == 0
    capsys.readouterr()
    assert main(["energy", str(out / "snapshot_final.csv"), cfg]) == 0
    got = capsys.readouterr().out.splitlines()
    series_lines = (out / "energy.csv").read_text().splitlines()
    assert got[0] == series_lines[0]  # same header
    assert got[1] == series_lines[-1]  # recomputed row is bit-identical


def test_energy_grid_mismatch_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TINY)
    out = tmp_path / "out"
    assert main(["run", cfg, "--output-dir", str(out)]) == 0
    capsys.readouterr()
    cfg11 = write_cfg(tmp_path, TINY.replace("grid.n = 9", "grid.n = 11"), "c11.cfg")
    assert main(["energy", str(out / "snapshot_final.csv"), cfg11]) == 1
    assert "does not match config grid.n=11" in capsys.readouterr().err


def test_reproduce_unknown_figure_id(capsys):
    assert main(["reproduce", "fig99"]) == 1
    assert "unknown figure id 'fig99'" in capsys.readouterr().err


def test_reproduce_runs_every_variant(tmp_path, capsys, monkeypatch):
    import ferro2d.cli as cli_mod

    base = parse_config(TINY)
    variants = [
        ("v-low", base),
        ("v-high", base.with_overrides(max_time=2e-4)),
    ]
    monkeypatch.setattr(cli_mod, "get_preset", lambda fid: variants)
    assert main(["reproduce", "anything", "--output-dir", str(tmp_path)]) == 0
    report = capsys.readouterr().out.splitlines()
    assert len(report) == 2
    assert report[0].startswith("anything/v-low:")
    for name, _ in variants:
        assert (tmp_path / "anything" / name / "summary.json").is_file()


def test_converge_zero_horizon_writes_report(tmp_path, capsys):
    text = TINY.replace("scenario.kind = degree_k", "scenario.kind = smooth").replace(
        "solver.max_time = 4e-4", "solver.max_time = 0.0"
    )
    cfg = write_cfg(tmp_path, text)
    out = tmp_path / "conv"
    assert main(["converge", cfg, "--output-dir", str(out)]) == 0
    assert "spatial order" in capsys.readouterr().out
    payload = json.loads((out / "convergence.json").read_text())
    assert [dx for dx, _ in payload["grid_errors"]] == [0.04, 0.02, 0.01]
    assert all(err == 0.0 for _, err in payload["grid_errors"])
    assert abs(payload["estimated_spatial_order"]) < 1e-10
    assert abs(payload["estimated_temporal_order"]) < 1e-10


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, TINY)
    proc = subprocess.run(
        [sys.executable, "-m", "ferro2d", "run", cfg, "--output-dir", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "steps=4" in proc.stdout
