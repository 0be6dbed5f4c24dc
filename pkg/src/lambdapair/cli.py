"""Command-line front end.

    lambdapair couplings --phi 1.0
    lambdapair spectrum --preset eq7
    lambdapair stirap --config run.json --out results/
    lambdapair sweep --config sweep.json --jobs 4 --out results/

Exit codes: 0 success, 2 config error, 3 solver error, 4 degenerate steady state.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from lambdapair.config import UNITS, ConfigError, RunConfig, config_echo, load_config, parse_config
from lambdapair.hilbert import PRODUCT_LABELS
from lambdapair.rddi import GeometryConfig, SystemConfig, couplings_for_pair
from lambdapair.schemes import (
    SCHEME_DEFAULT_PRESET,
    TRACKED_STATES,
    ValidityWarning,
    resonance_table,
    run_preset,
    sweep,
)
from lambdapair.solvers import DegenerateSteadyStateError, SolverError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_DEGENERATE = 0, 2, 3, 4
COMMAND_SCHEME = {"raman": "raman", "stirap": "stirap", "pump": "pumping", "sweep": None}
TRAJECTORY_COLUMNS = ("t",) + tuple(f"P_{lbl}" for lbl in PRODUCT_LABELS) + tuple(
    f"F_{lbl}" for lbl in TRACKED_STATES
)


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return "" if x is None else str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=False) + "\n")


def write_trajectory_csv(path: Path, traj) -> None:
    pops = traj.populations()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for n, t in enumerate(traj.times):
            row = [fmt(t)] + [fmt(p) for p in pops[n]]
            row += [fmt(traj.observables[f"F_{lbl}"][n]) for lbl in TRACKED_STATES]
            w.writerow(row)


def read_table_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_sweep_csv(path: Path, axes: list[str], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(axes) + ["final_fidelity", "error"])
        for row in rows:
            w.writerow([fmt(row[a]) for a in axes] + [fmt(row["final_fidelity"]), row["error"]])


# --- commands --------------------------------------------------------------


def _load(args, command: str) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config({})
    updates = {}
    if args.preset:
        updates["preset"] = args.preset
    scheme = COMMAND_SCHEME.get(command)
    if scheme is not None:
        if cfg.scheme and cfg.scheme != scheme:
            raise ConfigError(f"config scheme {cfg.scheme!r} does not match command {command!r}")
        updates["scheme"] = scheme
    if updates:
        data = cfg.model_dump(exclude_none=True)
        if "preset" in updates and "scheme" not in updates:
            data.pop("scheme", None)
        if "scheme" in updates and "preset" not in updates and cfg.preset is None:
            updates["preset"] = SCHEME_DEFAULT_PRESET[updates["scheme"]]
        cfg = parse_config({**data, **updates})
    if args.auto_resonance is not None:
        data = cfg.model_dump(exclude_none=True)
        data.setdefault("drive", {})["auto_resonance"] = args.auto_resonance == "on"
        cfg = parse_config(data)
    return cfg


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.out or cfg.output.dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_couplings(args) -> int:
    geometry = GeometryConfig()
    if not args.perp and (args.e1 or args.e2 or args.eR):
        geometry = GeometryConfig(
            e1=args.e1 or geometry.e1, e2=args.e2 or geometry.e2, eR=args.eR or geometry.eR
        )
    system = SystemConfig(
        gamma13=args.gamma13, gamma23=args.gamma23, phi13=args.phi,
        freq_ratio=args.freq_ratio, geometry=geometry,
    )
    c = couplings_for_pair(system)
    out = {"units": UNITS, "phi13": system.phi13, "phi23": system.phi23,
           "geometry": geometry.to_dict(), **c.to_dict()}
    print(json.dumps(_jsonable(out), indent=2))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _load(args, "spectrum")
    preset = cfg.build_preset()
    table = resonance_table(preset)
    out = {
        "units": UNITS,
        "preset": preset.name,
        "eigenstates": [{"label": lbl, "energy": float(e)} for lbl, e in zip(table.labels, table.energies)],
        "ambiguous": table.ambiguous,
        "resonant_deltas": list(preset.deltas()),
        "nominal_deltas": list(preset.nominal_deltas),
        "lines": [line.to_dict() for line in table.lines],
    }
    text = json.dumps(_jsonable(out), indent=2)
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "spectrum.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_run(args, command: str) -> int:
    cfg = _load(args, command)
    preset = cfg.build_preset()
    integ = cfg.integrator_config()
    out = _out_dir(args, cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        result = run_preset(preset, integ)
    summary = {
        "units": UNITS,
        "scheme": preset.scheme,
        "preset": preset.name,
        "target": result.target,
        "final_fidelity": result.final_fidelity,
        "warnings": [str(w.message) for w in caught],
        "diagnostics": result.diagnostics,
        "config": config_echo(preset, integ),
    }
    if result.trajectory is not None:
        write_trajectory_csv(out / "trajectory.csv", result.trajectory)
    write_json(out / "summary.json", summary)
    print(json.dumps({"final_fidelity": result.final_fidelity, "target": result.target,
                      "out": str(out)}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args, "sweep")
    grid = cfg.grid or {}
    base = cfg.preset_params()
    if "phi13" in grid and cfg.drive.f13 is None:
        base["f13"] = None
    out = _out_dir(args, cfg)
    started = time.perf_counter()
    rows = sweep(cfg.preset_name(), grid, jobs=args.jobs or 1, base=base, cfg=cfg.integrator_config())
    axes = list(grid) if rows else list(grid)
    write_sweep_csv(out / "sweep.csv", axes, rows)
    failed = sum(1 for r in rows if r["error"])
    print(json.dumps({"points": len(rows), "failed": failed, "out": str(out / "sweep.csv"),
                      "wall_time": time.perf_counter() - started}))
    if rows and failed == len(rows):
        if all("DegenerateSteadyStateError" in r["error"] for r in rows):
            return EXIT_DEGENERATE
        return EXIT_SOLVER
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="JSON run configuration")
    parser.add_argument("--out", metavar="DIR", default=default, help="output directory")
    parser.add_argument("--jobs", metavar="N", type=int, default=default, help="parallel sweep workers")
    parser.add_argument("--preset", choices=["eq5", "eq6", "eq7", "eq8sym", "eq8asym"], default=default)
    parser.add_argument("--auto-resonance", choices=["on", "off"], default=default,
                        help="resonant detunings from the spectrum (on) or the preset nominal values (off)")


def _vector(text: str):
    parts = [float(x) for x in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three components, got {text!r}")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambdapair", description=__doc__.split("\n")[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("couplings", help="print f, g, chi and gamma12 for a separation")
    _global_flags(p, suppress=True)
    p.add_argument("--phi", type=float, required=True, help="dimensionless distance k13 R")
    p.add_argument("--perp", action="store_true", help="collinear dipoles perpendicular to R (default)")
    p.add_argument("--e1", type=_vector)
    p.add_argument("--e2", type=_vector)
    p.add_argument("--eR", type=_vector)
    p.add_argument("--gamma13", type=float, default=1.0)
    p.add_argument("--gamma23", type=float, default=1.0)
    p.add_argument("--freq-ratio", type=float, default=1.0)

    for name, help_ in (
        ("spectrum", "dump the resonance table of a preset"),
        ("raman", "resonant Raman pulse pair (full master equation)"),
        ("stirap", "STIRAP with counterintuitive Gaussian pulses"),
        ("pump", "optical pumping steady state"),
        ("sweep", "run a preset over a parameter grid"),
    ):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "couplings":
            return cmd_couplings(args)
        if args.command == "spectrum":
            return cmd_spectrum(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_run(args, args.command)
    except DegenerateSteadyStateError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
