"""Command-line interface: output shapes, exit codes, and determinism.

Every command is exercised through ``main(argv)`` with captured stdout,
the same path the console script takes, so the JSON schemas, CSV
headers, and exit-code contract asserted here are exactly what a caller
sees.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from surfride import NoSolutionError, WaveScatterTable
from surfride.cli import main
from surfride.thresholds import ALL_METHODS, ThresholdResult

SAMPLE_DIR = Path(__file__).resolve().parent.parent / "ships"
MODEL_SHIP = str(SAMPLE_DIR / "dtmb5415_model.json")
FULL_SHIP = str(SAMPLE_DIR / "frigate_full.json")

# Wave force pinned to the lower tangent bifurcation at Fn 0.2602 (the
# calibrated_fw fixture value); used where the dynamics, not the hull
# integral, are under test.
CALIBRATED_FW = "29.12792413484061"

WAVE_ARGS = ["--lambda-ratio", "1.25", "--steepness", "0.04"]

# An overwhelming wave force: every analytic splitting condition loses
# its real root and the heteroclinic section never changes sign.
HUGE_FW = "512.3180711862"


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# fk
# ---------------------------------------------------------------------------

def test_fk_text_lists_force_phase_and_stations(capsys):
    code, out, err = run_cli(capsys, ["fk", "--ship", MODEL_SHIP, *WAVE_ARGS])
    assert code == 0
    assert err == ""
    lines = out.splitlines()
    assert lines[0].startswith("f_w = ") and lines[0].endswith(" N")
    assert lines[1].startswith("eps = ") and lines[1].endswith(" rad")
    assert lines[2] == "station contributions (x, cos moment, sin moment):"
    assert len(lines) == 3 + 41
    f_w = float(lines[0].split()[2])
    assert f_w == pytest.approx(34.15453808, rel=1e-8)


def test_fk_json_schema(capsys):
    code, out, _ = run_cli(capsys, ["fk", "--ship", MODEL_SHIP, *WAVE_ARGS, "--json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "surfride.v1"
    assert doc["command"] == "fk"
    assert doc["lambda_ratio"] == 1.25
    assert doc["steepness"] == 0.04
    assert doc["f_w"] == pytest.approx(34.15453808, rel=1e-8)
    assert doc["k_w"] == pytest.approx(2.0 * math.pi / (1.25 * 2.75), rel=1e-9)
    assert doc["amplitude"] == pytest.approx(0.04 * 1.25 * 2.75 / 2.0, rel=1e-9)
    assert len(doc["stations"]) == 41
    assert set(doc["stations"][0]) == {"x", "cos_moment", "sin_moment"}
    # station moments recombine to the emitted force amplitude
    fc = sum(st["cos_moment"] for st in doc["stations"])
    fs = sum(st["sin_moment"] for st in doc["stations"])
    scale = 1000.0 * 9.81 * doc["amplitude"] * doc["k_w"]
    assert scale * math.hypot(fc, fs) == pytest.approx(doc["f_w"], rel=1e-7)


# ---------------------------------------------------------------------------
# equilibria
# ---------------------------------------------------------------------------

def test_equilibria_json_reports_both_fixed_points(capsys):
    code, out, _ = run_cli(
        capsys,
        ["equilibria", "--ship", MODEL_SHIP, *WAVE_ARGS, "--fn", "0.30", "--json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "equilibria"
    assert doc["n_p"] > 0.0
    assert -1.0 < doc["r_bar"] < 0.0
    kinds = [pt["kind"] for pt in doc["equilibria"]]
    assert sorted(kinds) == ["saddle", "stable"]
    for pt in doc["equilibria"]:
        assert math.sin(pt["y"]) == pytest.approx(doc["r_bar"], abs=1e-9)


def test_equilibria_text_reports_escape(capsys):
    # below the lower tangent the net thrust deficit exceeds the wave force
    code, out, _ = run_cli(
        capsys,
        [
            "equilibria", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--fn", "0.25", "--fw", CALIBRATED_FW,
        ],
    )
    assert code == 0
    assert "no equilibria" in out
    assert float(out.splitlines()[1].split()[2]) < -1.0  # r_bar


def test_equilibria_rejects_nonpositive_rate(capsys):
    code, out, err = run_cli(
        capsys, ["equilibria", "--ship", MODEL_SHIP, *WAVE_ARGS, "--n", "-5"]
    )
    assert code == 2
    assert out == ""
    assert err.startswith("error:")
    assert "propeller rate" in err


# ---------------------------------------------------------------------------
# threshold
# ---------------------------------------------------------------------------

def test_threshold_single_method_json(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "threshold", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--method", "melnikov5", "--json",
        ],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "threshold"
    assert doc["branch"] == "surf"
    (row,) = doc["rows"]
    assert row["method"] == "melnikov5"
    assert row["fn_cr"] == pytest.approx(0.3198048981, rel=1e-9)
    assert -1.0 < row["r_bar"] < 0.0
    assert row["residual"] is None and row["iterations"] is None


def test_threshold_all_methods_in_registry_order(capsys):
    code, out, _ = run_cli(
        capsys, ["threshold", "--ship", MODEL_SHIP, *WAVE_ARGS, "--json"]
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["method"] for row in rows] == list(ALL_METHODS)
    newton = rows[0]
    assert newton["residual"] <= 1e-8
    assert newton["iterations"] >= 1
    fns = [row["fn_cr"] for row in rows]
    assert all(0.25 < fn < 0.40 for fn in fns)


def test_threshold_isolates_failing_method(capsys, monkeypatch):
    from surfride import thresholds

    def patched(method, *args, **kwargs):
        if method == "melnikov1":
            raise NoSolutionError("separatrix splitting has no real rate")
        return ThresholdResult(
            method=method, branch=kwargs.get("branch", "surf"),
            n_p=19.0, fn_cr=0.32, r_bar=-0.6,
        )

    monkeypatch.setattr("surfride.cli.compute_threshold", patched)
    code, out, _ = run_cli(
        capsys, ["threshold", "--ship", MODEL_SHIP, *WAVE_ARGS, "--json"]
    )
    assert code == 0  # one failure among ten does not fail the run
    rows = json.loads(out)["rows"]
    by_method = {row["method"]: row for row in rows}
    assert by_method["melnikov1"]["error_kind"] == "NoSolutionError"
    assert "no real rate" in by_method["melnikov1"]["error"]
    assert "n_cr" not in by_method["melnikov1"]
    for method in ALL_METHODS:
        if method != "melnikov1":
            assert by_method[method]["fn_cr"] == 0.32


def test_threshold_exit_4_when_no_solution(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "threshold", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--method", "melnikov1", "--fw", HUGE_FW, "--json",
        ],
    )
    assert code == 4
    (row,) = json.loads(out)["rows"]
    assert row["error_kind"] == "NoSolutionError"
    assert "no real rate" in row["error"]


def test_threshold_exit_3_when_newton_finds_no_sign_change(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "threshold", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--method", "newton", "--fw", HUGE_FW, "--json",
        ],
    )
    assert code == 3
    (row,) = json.loads(out)["rows"]
    assert row["error_kind"] == "ConvergenceError"
    assert "no section sign change" in row["error"]


def test_threshold_sweep_emits_csv_curve(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "threshold", "--ship", MODEL_SHIP, "--steepness", "0.04",
            "--lambda-ratio", "1.25", "--method", "melnikov5",
            "--sweep-lambda", "1.0:1.5:0.25",
        ],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "method,lambda_ratio,n_cr,fn_cr"
    cells = [line.split(",") for line in lines[1:]]
    assert [row[1] for row in cells] == ["1", "1.25", "1.5"]
    fns = [float(row[3]) for row in cells]
    assert fns == sorted(fns)  # longer waves are faster: threshold rises


def test_threshold_sweep_rejects_forced_amplitude(capsys):
    code, out, err = run_cli(
        capsys,
        [
            "threshold", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--sweep-lambda", "1.0:1.5:0.25", "--fw", "30",
        ],
    )
    assert code == 2
    assert "--sweep-lambda" in err


def test_threshold_rejects_unknown_method(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["threshold", "--ship", MODEL_SHIP, *WAVE_ARGS, "--method", "simpson"])
    assert excinfo.value.code == 2
    assert "invalid choice" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# phase-portrait
# ---------------------------------------------------------------------------

def test_phase_portrait_empty_grid_is_header_only(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "phase-portrait", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--fn", "0.30", "--ny", "0", "--nv", "0",
        ],
    )
    assert code == 0
    assert out == "tau,y,v,trajectory_id,class\n"


def test_phase_portrait_classifies_grid(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "phase-portrait", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--fn", "0.36", "--fw", CALIBRATED_FW,
            "--ny", "2", "--nv", "2", "--tau-end", "20", "--stride", "100",
        ],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "tau,y,v,trajectory_id,class"
    rows = [line.split(",") for line in lines[1:]]
    assert {row[4] for row in rows} == {"surf_riding"}
    assert {row[3] for row in rows} == {"0", "1", "2", "3"}


def test_phase_portrait_json_samples_start_at_initial_point(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "phase-portrait", "--ship", MODEL_SHIP, *WAVE_ARGS,
            "--fn", "0.25", "--fw", CALIBRATED_FW,
            "--ny", "1", "--nv", "1", "--tau-end", "10", "--stride", "200",
            "--json",
        ],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "phase-portrait"
    (traj,) = doc["trajectories"]
    assert traj["trajectory_id"] == 0
    assert traj["class"] == "overtaken_periodic"
    assert traj["samples"][0] == [0.0, -3.0, -2.0]


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def test_compare_runs_every_method(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "compare", "--ship", MODEL_SHIP, "--steepness", "0.04",
            "--sweep-lambda", "1.25:1.25:0.5",
        ],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "method,lambda_ratio,fn_cr"
    cells = [line.split(",") for line in lines[1:]]
    assert [row[0] for row in cells] == list(ALL_METHODS)
    fns = {row[0]: float(row[2]) for row in cells}
    assert fns["bisection"] == pytest.approx(fns["newton"], rel=1e-3)
    assert all(0.25 < fn < 0.40 for fn in fns.values())


# ---------------------------------------------------------------------------
# sgisc
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "length, fn, verdict",
    [
        ("142.17", "0.36", "vulnerable"),
        ("250", "0.36", "not_vulnerable"),
        ("142.17", "0.25", "not_vulnerable"),
    ],
)
def test_sgisc_level1_json(capsys, length, fn, verdict):
    code, out, _ = run_cli(
        capsys, ["sgisc", "level1", "--length", length, "--fn", fn, "--json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"schema", "command", "length", "fn", "verdict"}
    assert doc["command"] == "sgisc level1"
    assert doc["length"] == float(length)
    assert doc["fn"] == float(fn)
    assert doc["verdict"] == verdict


def test_sgisc_level1_text(capsys):
    code, out, _ = run_cli(
        capsys, ["sgisc", "level1", "--length", "250", "--fn", "0.36"]
    )
    assert code == 0
    assert "verdict: not_vulnerable" in out


def test_sgisc_level2_json(capsys):
    code, out, _ = run_cli(
        capsys, ["sgisc", "level2", "--ship", FULL_SHIP, "--fn", "0.30", "--json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {
        "schema", "command", "fn", "C", "R_SR", "verdict",
        "cells_no_root", "monotonicity_violations",
    }
    assert doc["command"] == "sgisc level2"
    assert doc["R_SR"] == 0.005
    assert doc["C"] == pytest.approx(0.002142645715, rel=1e-6)
    assert doc["verdict"] == "not_vulnerable"
    assert doc["cells_no_root"] == 0
    assert doc["monotonicity_violations"] == 0


def test_sgisc_level2_writes_cell_grid(capsys, tmp_path):
    cells = tmp_path / "cells.csv"
    code, out, _ = run_cli(
        capsys,
        [
            "sgisc", "level2", "--ship", FULL_SHIP, "--fn", "0.30",
            "--cells", str(cells), "--json",
        ],
    )
    assert code == 0
    lines = cells.read_text().splitlines()
    assert lines[0] == "r,s,fn_cr"
    assert len(lines) == 1 + 81 * 101
    first = lines[1].split(",")
    assert first[0] == "1" and first[1] == "0.03"
    assert 0.0 < float(first[2]) < 1.0
    last = lines[-1].split(",")
    assert last[0] == "3" and last[1] == "0.15"


def test_sgisc_level2_accepts_scatter_csv(capsys, tmp_path):
    table = WaveScatterTable.standard()
    path = tmp_path / "scatter.csv"
    rows = ["hs," + ",".join(str(float(t)) for t in table.tz)]
    for h, counts in zip(table.hs, table.counts):
        rows.append(str(float(h)) + "," + ",".join(str(float(c)) for c in counts))
    path.write_text("\n".join(rows) + "\n")

    base = run_cli(
        capsys, ["sgisc", "level2", "--ship", FULL_SHIP, "--fn", "0.30", "--json"]
    )
    custom = run_cli(
        capsys,
        [
            "sgisc", "level2", "--ship", FULL_SHIP, "--fn", "0.30",
            "--scatter", str(path), "--json",
        ],
    )
    assert base == custom


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_repeated_runs_are_byte_identical(capsys):
    argv = [
        "threshold", "--ship", MODEL_SHIP, *WAVE_ARGS,
        "--method", "melnikov5", "--json",
    ]
    first = run_cli(capsys, argv)
    second = run_cli(capsys, argv)
    assert first == second
