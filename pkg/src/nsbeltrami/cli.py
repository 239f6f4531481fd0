"""
Command line entry point.

Subcommands::

    simulate       --config F [--out D]
    diagnose       --run D --cylinder I [I ...] [--config F] [--out CSV] [--extra]
    ledger         --run D --cylinder I --t T [--config F] [--quadrature Q] ...
    verify-cutoff  --config F [--cylinder I ...] [--n N]
    selftest

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import logging
from pathlib import Path
import shutil
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .cutoff import build_cutoff, verify_cutoff
from .diagnostics import COLUMNS, EXTRA_COLUMNS, diagnostics_series
from .ledger import OMEGA_T_MODES, QUADRATURES, Ledger, LedgerConfig
from .selftest import run_selftest
from .snapshot_io import ManifestError, SnapshotFormatError, read_run, write_run
from .solver import SolverError, simulate
from .spectral import _workers

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VALIDATION", "EXIT_RUNTIME", "EXIT_IO"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

CONFIG_COPY = "config.txt"

log = logging.getLogger("nsbeltrami")


class NumericalFailure(RuntimeError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])


def _run_config(args) -> RunConfig:
    path = Path(args.config) if args.config else Path(args.run) / CONFIG_COPY
    return load_config(path)


def _fan_out(func, items):
    """Map ``func`` over ``items`` with up to NSE_THREADS workers; results keep input order."""
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out) if args.out else cfg.output_dir
    ic = cfg.initial_condition.build(cfg.grid)
    traj = simulate(cfg.solver, ic)
    write_run(traj, out)
    shutil.copyfile(args.config, out / CONFIG_COPY)
    print(f"{len(traj.snapshots)} snapshots written to {out} (status: {traj.status})")
    if traj.status != "complete":
        raise NumericalFailure(f"simulation stopped early: {traj.message}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    cfg = _run_config(args)
    traj = read_run(args.run)
    M = cfg.M if args.M is None else args.M
    grid = traj.grid
    columns = COLUMNS + (EXTRA_COLUMNS if args.extra else ())

    def one(i):
        cyl = cfg.cylinder(i)
        cyl.validate(grid, t_min=-np.inf)
        pair = build_cutoff(cfg.cutoff_spec(i), grid)
        return diagnostics_series(traj, cyl.ball(grid), pair.phi, M, cfg.eps_reg, norm=args.norm)

    series = _fan_out(one, args.cylinder)
    for i, s in zip(args.cylinder, series):
        if args.out and len(args.cylinder) == 1:
            path = Path(args.out)
        else:
            path = Path(args.run) / f"diagnostics_cyl{i}.csv"
        _write_csv(path, columns, s.rows())
        print(f"cylinder {i}: {len(s)} rows written to {path}")
    return EXIT_OK


def cmd_ledger(args) -> int:
    cfg = _run_config(args)
    traj = read_run(args.run)
    M = cfg.M if args.M is None else args.M
    i = args.cylinder
    pair = build_cutoff(cfg.cutoff_spec(i), traj.grid)
    lcfg = LedgerConfig(
        cfg.cylinder(i), M, pair,
        time_quadrature=args.quadrature,
        omega_t_mode=args.omega_t,
        padding=args.padding,
        eps_reg=cfg.eps_reg,
    )
    t = cfg.cylinder(i).t0 if args.t is None else args.t
    report = Ledger(traj, lcfg).report(t, stride=args.stride)
    stem = Path(args.out) if args.out else Path(args.run) / f"ledger_cyl{i}_t{t:.6g}"
    row = {"cylinder": i, **report.as_row()}
    _write_csv(Path(f"{stem}.csv"), list(row), [row])
    text = report.text()
    Path(f"{stem}.txt").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_verify_cutoff(args) -> int:
    cfg = load_config(args.config)
    grid = cfg.grid if args.n is None else type(cfg.grid)(args.n, cfg.grid.box_length, cfg.grid.nu)
    indices = args.cylinder or list(range(len(cfg.cylinders)))
    if not indices:
        raise ConfigError("config defines no cylinders")
    ok = True
    for i in indices:
        report = verify_cutoff(build_cutoff(cfg.cutoff_spec(i), grid))
        print(f"cylinder {i}: {cfg.cylinder(i)}")
        for line in report.lines():
            print("  " + line)
        ok &= report.passed
    if not ok:
        raise NumericalFailure("cutoff contract violated")
    return EXIT_OK


def cmd_selftest(args) -> int:
    if not run_selftest():
        raise NumericalFailure("selftest failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsbeltrami", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a configured run and store its snapshots")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="run directory (default: output.dir from the config)")
    p.set_defaults(func=cmd_simulate)

    def run_args(p):
        p.add_argument("--run", required=True, help="run directory written by simulate")
        p.add_argument("--config", help="config file (default: the copy stored in the run directory)")
        p.add_argument("--M", type=float, help="override diagnostics.M")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("diagnose", help="alignment and criterion time series for cylinders")
    run_args(p)
    p.add_argument("--cylinder", type=int, nargs="+", required=True)
    p.add_argument("--norm", choices=("frobenius", "operator"), default="frobenius")
    p.add_argument("--extra", action="store_true", help="append the alpha_S and whole-ball variants")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("ledger", help="localized energy ledger for one cylinder and endpoint")
    run_args(p)
    p.add_argument("--cylinder", type=int, required=True)
    p.add_argument("--t", type=float, help="endpoint time (default: t0 of the cylinder)")
    p.add_argument("--quadrature", choices=QUADRATURES, default="trapezoid")
    p.add_argument("--omega-t", choices=OMEGA_T_MODES, default="semi-discrete-rhs")
    p.add_argument("--padding", type=float, default=1.5)
    p.add_argument("--stride", type=int, default=1, help="use every stride-th snapshot")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("verify-cutoff", help="check the cutoff contract for configured cylinders")
    p.add_argument("--config", required=True)
    p.add_argument("--cylinder", type=int, nargs="*")
    p.add_argument("--n", type=int, help="sample on this resolution instead of solver.n")
    p.set_defaults(func=cmd_verify_cutoff)

    p = sub.add_parser("selftest", help="run the oracle suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SnapshotFormatError, ManifestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalFailure, SolverError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
