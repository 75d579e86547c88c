"""Command-line front end.

Wires ship definition files, wave conditions, and method selection to
the computation modules, emitting fixed-format tables, versioned JSON,
and plot-ready CSV.  Output is a pure function of the inputs: repeated
runs are byte-identical.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
4 no solution in range.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .dynamics import classify_asymptotics, integrate
from .errors import ConvergenceError, NoSolutionError, ValidationError
from .hull import _fk_moments, fk_amplitude
from .sgisc import Level2Evaluator, WaveScatterTable, level1_check
from .shipfile import load_ship
from .surge import (
    PhasePoint,
    build_system,
    equilibria,
    rate_for_froude,
    wave_for_ship,
)
from .thresholds import ALL_METHODS, compute_threshold

SCHEMA = "surfride.v1"


def _fmt(value: float) -> str:
    """Floating output with 10 significant digits."""
    return format(float(value), ".10g")


def _round_floats(obj):
    """Round every float in a JSON-ready structure to 10 significant
    digits so machine output matches the printed tables."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {key: _round_floats(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(val) for val in obj]
    return obj


def _emit_json(doc: dict) -> None:
    print(json.dumps(_round_floats(doc), indent=2))


def _csv_writer():
    return csv.writer(sys.stdout, lineterminator="\n")


def _load_ship_arg(args):
    return load_ship(args.ship)


def _wave_arg(ship, args):
    return wave_for_ship(ship, args.lambda_ratio, args.steepness)


def _rate_arg(ship, res, prop, args) -> float:
    if args.n is not None:
        if args.n <= 0.0:
            raise ValidationError(f"propeller rate must be > 0, got {args.n}")
        return args.n
    return rate_for_froude(ship, res, prop, args.fn)


def _parse_sweep(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(
            f"--sweep-lambda must be start:stop:step, got {text!r}"
        )
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(
            f"--sweep-lambda must be numeric start:stop:step, got {text!r}"
        ) from exc
    if step <= 0.0 or stop < start or start <= 0.0:
        raise ValidationError(
            f"--sweep-lambda needs 0 < start <= stop and step > 0, got {text!r}"
        )
    count = int(math.floor((stop - start) / step + 1.0e-9)) + 1
    return [start + i * step for i in range(count)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fk(args) -> int:
    ship, _res, _prop = _load_ship_arg(args)
    wave = _wave_arg(ship, args)
    f_w, eps = fk_amplitude(ship, wave.k_w, wave.amplitude)
    k = np.array([wave.k_w])
    rows = []
    for st in ship.stations:
        fc, fs = _fk_moments((st,), k)
        rows.append((st.x, float(fc[0]), float(fs[0])))
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "fk",
                "lambda_ratio": wave.lambda_ratio,
                "steepness": wave.steepness,
                "k_w": wave.k_w,
                "amplitude": wave.amplitude,
                "f_w": f_w,
                "eps": eps,
                "stations": [
                    {"x": x, "cos_moment": fc, "sin_moment": fs}
                    for x, fc, fs in rows
                ],
            }
        )
        return 0
    print(f"f_w = {_fmt(f_w)} N")
    print(f"eps = {_fmt(eps)} rad")
    print("station contributions (x, cos moment, sin moment):")
    for x, fc, fs in rows:
        print(f"  {_fmt(x)} {_fmt(fc)} {_fmt(fs)}")
    return 0


def cmd_equilibria(args) -> int:
    ship, res, prop = _load_ship_arg(args)
    wave = _wave_arg(ship, args)
    n_p = _rate_arg(ship, res, prop, args)
    system = build_system(ship, res, prop, wave, n_p, order=args.order, f_w=args.fw)
    points = equilibria(system)
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "equilibria",
                "n_p": n_p,
                "r_bar": system.rbar,
                "equilibria": [{"y": y, "kind": kind} for y, kind in points],
            }
        )
        return 0
    print(f"n_p = {_fmt(n_p)} 1/s")
    print(f"r_bar = {_fmt(system.rbar)}")
    if not points:
        print("no equilibria (|r_bar| > 1: wave force cannot hold the ship)")
    for y, kind in points:
        print(f"  y = {_fmt(y)}  {kind}")
    return 0


def _threshold_row(ship, res, prop, wave, method, branch, order, f_w) -> dict:
    """One threshold result as a plain dict; failures are captured in
    an 'error' field so other methods still report."""
    row = {"method": method, "branch": branch}
    try:
        result = compute_threshold(
            method, ship, res, prop, wave, branch=branch, order=order, f_w=f_w
        )
    except (ValidationError, ConvergenceError, NoSolutionError) as exc:
        row["error"] = str(exc)
        row["error_kind"] = type(exc).__name__
        return row
    row["n_cr"] = result.n_p
    row["fn_cr"] = result.fn_cr
    row["r_bar"] = result.r_bar
    row["residual"] = result.details.get("residual")
    row["iterations"] = result.details.get("iterations")
    return row


def cmd_threshold(args) -> int:
    ship, res, prop = _load_ship_arg(args)
    methods = list(ALL_METHODS) if args.method == "all" else [args.method]

    if args.sweep_lambda is not None:
        if args.fw is not None:
            raise ValidationError(
                "--fw fixes one wave's force; it cannot be combined with "
                "--sweep-lambda"
            )
        lambdas = _parse_sweep(args.sweep_lambda)
        rows = []
        for lam in lambdas:
            wave = wave_for_ship(ship, lam, args.steepness)
            for method in methods:
                row = _threshold_row(
                    ship, res, prop, wave, method, args.branch, args.order, None
                )
                rows.append(
                    {
                        "method": method,
                        "lambda_ratio": lam,
                        "n_cr": row.get("n_cr", float("nan")),
                        "fn_cr": row.get("fn_cr", float("nan")),
                    }
                )
        if args.json:
            _emit_json(
                {
                    "schema": SCHEMA,
                    "command": "threshold",
                    "branch": args.branch,
                    "steepness": args.steepness,
                    "rows": rows,
                }
            )
            return 0
        writer = _csv_writer()
        writer.writerow(["method", "lambda_ratio", "n_cr", "fn_cr"])
        for row in rows:
            writer.writerow(
                [
                    row["method"],
                    _fmt(row["lambda_ratio"]),
                    _fmt(row["n_cr"]),
                    _fmt(row["fn_cr"]),
                ]
            )
        return 0

    wave = _wave_arg(ship, args)
    rows = [
        _threshold_row(ship, res, prop, wave, method, args.branch, args.order, args.fw)
        for method in methods
    ]
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "threshold",
                "branch": args.branch,
                "lambda_ratio": wave.lambda_ratio,
                "steepness": wave.steepness,
                "rows": rows,
            }
        )
    else:
        for row in rows:
            if "error" in row:
                print(f"{row['method']}: {row['error_kind']}: {row['error']}")
                continue
            extras = ""
            if row.get("residual") is not None:
                extras += f"  residual={_fmt(row['residual'])}"
            if row.get("iterations") is not None:
                extras += f"  iterations={row['iterations']}"
            print(
                f"{row['method']}: n_cr={_fmt(row['n_cr'])}"
                f"  fn_cr={_fmt(row['fn_cr'])}  r_bar={_fmt(row['r_bar'])}{extras}"
            )
    failures = [row for row in rows if "error" in row]
    if failures and len(failures) == len(rows):
        kind = failures[0]["error_kind"]
        return {
            "ValidationError": 2,
            "ConvergenceError": 3,
            "NoSolutionError": 4,
        }.get(kind, 3)
    return 0


def cmd_phase_portrait(args) -> int:
    ship, res, prop = _load_ship_arg(args)
    wave = _wave_arg(ship, args)
    n_p = _rate_arg(ship, res, prop, args)
    system = build_system(ship, res, prop, wave, n_p, order=args.order, f_w=args.fw)
    if args.ny < 0 or args.nv < 0:
        raise ValidationError("grid counts must be >= 0")
    ys = np.linspace(args.y_min, args.y_max, args.ny) if args.ny else np.array([])
    vs = np.linspace(args.v_min, args.v_max, args.nv) if args.nv else np.array([])

    trajectories = []
    traj_id = 0
    for y0 in ys:
        for v0 in vs:
            p0 = PhasePoint(y=float(y0), v=float(v0))
            try:
                label = classify_asymptotics(system, p0).value
            except ConvergenceError:
                label = "undecided"
            try:
                path = integrate(system, p0, args.tau_end, stride=args.stride)
                samples = zip(path.taus, path.ys, path.vs)
            except ConvergenceError:
                samples = [(0.0, p0.y, p0.v)]
                label = "undecided"
            trajectories.append((traj_id, label, list(samples)))
            traj_id += 1

    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "phase-portrait",
                "n_p": n_p,
                "r_bar": system.rbar,
                "trajectories": [
                    {
                        "trajectory_id": tid,
                        "class": label,
                        "samples": [
                            [float(t), float(y), float(v)] for t, y, v in samples
                        ],
                    }
                    for tid, label, samples in trajectories
                ],
            }
        )
        return 0
    writer = _csv_writer()
    writer.writerow(["tau", "y", "v", "trajectory_id", "class"])
    for tid, label, samples in trajectories:
        for t, y, v in samples:
            writer.writerow([_fmt(t), _fmt(y), _fmt(v), tid, label])
    return 0


def cmd_compare(args) -> int:
    ship, res, prop = _load_ship_arg(args)
    lambdas = _parse_sweep(args.sweep_lambda)
    rows = []
    for method in ALL_METHODS:
        for lam in lambdas:
            wave = wave_for_ship(ship, lam, args.steepness)
            row = _threshold_row(
                ship, res, prop, wave, method, args.branch, args.order, None
            )
            rows.append(
                {
                    "method": method,
                    "lambda_ratio": lam,
                    "fn_cr": row.get("fn_cr", float("nan")),
                }
            )
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "compare",
                "branch": args.branch,
                "steepness": args.steepness,
                "rows": rows,
            }
        )
        return 0
    writer = _csv_writer()
    writer.writerow(["method", "lambda_ratio", "fn_cr"])
    for row in rows:
        writer.writerow(
            [row["method"], _fmt(row["lambda_ratio"]), _fmt(row["fn_cr"])]
        )
    return 0


def cmd_sgisc_level1(args) -> int:
    from .hull import ShipModel

    ship = ShipModel(length=args.length, mass=1.0)
    result = level1_check(ship, args.fn)
    verdict = "not_vulnerable" if result.not_vulnerable else "vulnerable"
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "sgisc level1",
                "length": result.length,
                "fn": result.fn_service,
                "verdict": verdict,
            }
        )
        return 0
    print(f"length = {_fmt(result.length)} m")
    print(f"fn_service = {_fmt(result.fn_service)}")
    print(f"verdict: {verdict}")
    return 0


def cmd_sgisc_level2(args) -> int:
    ship, res, prop = _load_ship_arg(args)
    scatter = (
        WaveScatterTable.from_csv(args.scatter) if args.scatter else None
    )
    evaluator = Level2Evaluator(ship, res, prop, scatter=scatter)
    result = evaluator.assess(args.fn)
    verdict = "not_vulnerable" if result.not_vulnerable else "vulnerable"
    if args.cells:
        with open(args.cells, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["r", "s", "fn_cr"])
            grid = evaluator.grid
            for i, r in enumerate(grid.r):
                for j, s in enumerate(grid.s):
                    writer.writerow(
                        [_fmt(r), _fmt(s), _fmt(result.fn_cr_grid[i, j])]
                    )
    if args.json:
        _emit_json(
            {
                "schema": SCHEMA,
                "command": "sgisc level2",
                "fn": result.fn_service,
                "C": result.c_value,
                "R_SR": result.r_sr,
                "verdict": verdict,
                "cells_no_root": result.no_root_cells,
                "monotonicity_violations": result.monotonicity_violations,
            }
        )
        return 0
    print(f"fn_service = {_fmt(result.fn_service)}")
    print(f"C = {_fmt(result.c_value)}")
    print(f"R_SR = {_fmt(result.r_sr)}")
    print(f"verdict: {verdict}")
    print(f"cells without critical rate: {result.no_root_cells}")
    print(f"monotonicity violations: {result.monotonicity_violations}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_ship(parser) -> None:
    parser.add_argument("--ship", required=True, help="ship definition JSON file")


def _add_wave(parser) -> None:
    parser.add_argument(
        "--lambda-ratio",
        type=float,
        required=True,
        help="wavelength over ship length",
    )
    parser.add_argument(
        "--steepness", type=float, required=True, help="wave height over wavelength"
    )


def _add_rate(parser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=float, help="propeller rate [1/s]")
    group.add_argument(
        "--fn", type=float, help="nominal Froude number (calm-water speed)"
    )


def _add_common(parser) -> None:
    parser.add_argument(
        "--order",
        type=int,
        default=5,
        choices=range(1, 6),
        help="resistance polynomial order used in the surge model",
    )
    parser.add_argument(
        "--fw",
        type=float,
        default=None,
        help="override the wave force amplitude [N] (skips the hull integral)",
    )
    parser.add_argument(
        "--json", action="store_true", help="emit versioned JSON instead of text"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfride",
        description=(
            "Surf-riding and wave-blocking thresholds for a ship in "
            "following seas, and the related vulnerability criteria."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fk = sub.add_parser("fk", help="wave force amplitude and phase")
    _add_ship(p_fk)
    _add_wave(p_fk)
    p_fk.add_argument("--json", action="store_true")
    p_fk.set_defaults(func=cmd_fk)

    p_eq = sub.add_parser("equilibria", help="surf-riding equilibria and kinds")
    _add_ship(p_eq)
    _add_wave(p_eq)
    _add_rate(p_eq)
    _add_common(p_eq)
    p_eq.set_defaults(func=cmd_equilibria)

    p_th = sub.add_parser("threshold", help="critical propeller rate / Froude number")
    _add_ship(p_th)
    _add_wave(p_th)
    p_th.add_argument(
        "--method",
        default="all",
        choices=("all",) + ALL_METHODS,
        help="threshold method (default: all)",
    )
    p_th.add_argument(
        "--branch",
        default="surf",
        choices=("surf", "block"),
        help="surf-riding or wave-blocking threshold",
    )
    p_th.add_argument(
        "--sweep-lambda",
        default=None,
        metavar="A:B:STEP",
        help="sweep wavelength ratios, emitting a CSV curve",
    )
    _add_common(p_th)
    p_th.set_defaults(func=cmd_threshold)

    p_pp = sub.add_parser(
        "phase-portrait", help="classified trajectories on an initial-condition grid"
    )
    _add_ship(p_pp)
    _add_wave(p_pp)
    _add_rate(p_pp)
    p_pp.add_argument("--ny", type=int, default=4, help="grid points in y")
    p_pp.add_argument("--nv", type=int, default=4, help="grid points in v")
    p_pp.add_argument("--y-min", type=float, default=-3.0)
    p_pp.add_argument("--y-max", type=float, default=3.0)
    p_pp.add_argument("--v-min", type=float, default=-2.0)
    p_pp.add_argument("--v-max", type=float, default=2.0)
    p_pp.add_argument(
        "--tau-end", type=float, default=60.0, help="sample window length"
    )
    p_pp.add_argument(
        "--stride",
        type=int,
        default=None,
        help="keep every stride-th integrator step (default: about 4000 samples)",
    )
    _add_common(p_pp)
    p_pp.set_defaults(func=cmd_phase_portrait)

    p_cmp = sub.add_parser(
        "compare", help="all methods over a wavelength sweep (CSV)"
    )
    _add_ship(p_cmp)
    p_cmp.add_argument(
        "--steepness", type=float, required=True, help="wave height over wavelength"
    )
    p_cmp.add_argument(
        "--sweep-lambda",
        required=True,
        metavar="A:B:STEP",
        help="wavelength ratios to sweep",
    )
    p_cmp.add_argument(
        "--branch", default="surf", choices=("surf", "block")
    )
    p_cmp.add_argument(
        "--order", type=int, default=5, choices=range(1, 6)
    )
    p_cmp.add_argument("--json", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)

    p_sg = sub.add_parser("sgisc", help="broaching vulnerability criteria")
    sg_sub = p_sg.add_subparsers(dest="level", required=True)

    p_l1 = sg_sub.add_parser("level1", help="length / Froude number screen")
    p_l1.add_argument("--length", type=float, required=True, help="ship length [m]")
    p_l1.add_argument("--fn", type=float, required=True, help="service Froude number")
    p_l1.add_argument("--json", action="store_true")
    p_l1.set_defaults(func=cmd_sgisc_level1)

    p_l2 = sg_sub.add_parser("level2", help="weighted wave-scatter index C")
    _add_ship(p_l2)
    p_l2.add_argument("--fn", type=float, required=True, help="service Froude number")
    p_l2.add_argument(
        "--scatter", default=None, help="scatter table CSV (default: built-in)"
    )
    p_l2.add_argument(
        "--cells", default=None, help="write the per-cell critical-Fn CSV here"
    )
    p_l2.add_argument("--json", action="store_true")
    p_l2.set_defaults(func=cmd_sgisc_level2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoSolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
