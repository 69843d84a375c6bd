"""Command-line entry point: simulate, path, compare, plot."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .path import closed_path, write_csv
from .plots import emit_plots
from .sim import (
    build_path,
    compare_scenarios,
    load_config,
    parse_number,
    read_telemetry,
    run_scenario,
    write_coeffs,
    write_comparison,
    write_telemetry,
)

log = logging.getLogger("lanerep")

OUT_ENV = "LANEREP_OUT_DIR"


def _out_path(arg: str, is_dir: bool) -> Path:
    """Apply the output-directory override, keeping the file name for file outputs."""
    env = os.environ.get(OUT_ENV)
    p = Path(arg)
    if env:
        p = Path(env) if is_dir else Path(env) / p.name
    if is_dir:
        p.mkdir(parents=True, exist_ok=True)
    else:
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = _out_path(args.out, True)
    path = build_path(cfg)
    res = run_scenario(cfg, path)
    write_telemetry(res.rows, out / cfg.telemetry_name)
    write_coeffs(res.coeff_rows, out / cfg.coeffs_name)
    write_csv(path, out / cfg.path_name)
    m = res.metrics
    log.info("completed=%s max|eps|=%.4g m steady offset=%.4g m", m.completed, m.max_abs_eps, m.steady_offset)
    if not m.completed:
        log.error("run diverged: %s", m.reason)
        return 1
    return 0


def cmd_path(args) -> int:
    table = closed_path(parse_number(args.kappa_max), parse_number(args.s_period), args.corners, args.h)
    target = _out_path(args.out, False)
    write_csv(table, target)
    log.info("wrote %d samples to %s", len(table), target)
    return 0


def cmd_compare(args) -> int:
    cfgs = [load_config(c) for c in args.configs]
    table = compare_scenarios(cfgs)
    target = _out_path(args.out, False)
    write_comparison(table, target)
    for r in table:
        log.info("T=%g steady offset=%.4g m completed=%s", r["T"], r["steady_offset"], r["completed"])
    return 0 if all(r["completed"] for r in table) else 1


def _read_path_csv(path) -> tuple:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1], data[:, 2]


def cmd_plot(args) -> int:
    rows = read_telemetry(args.inp)
    path_csv = Path(args.path) if args.path else Path(args.inp).with_name("path.csv")
    xy = _read_path_csv(path_csv) if path_csv.exists() else None
    for f in emit_plots(rows, _out_path(args.out, True), xy):
        log.info("wrote %s", f)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lanerep", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write telemetry CSVs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("path", help="write the closed cosine-curvature path as CSV")
    p.add_argument("--kappa-max", required=True, help="peak curvature, e.g. 0.004pi")
    p.add_argument("--s-period", required=True)
    p.add_argument("--corners", type=int, required=True)
    p.add_argument("--h", type=float, default=0.01, help="integration step [m]")
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("compare", help="steady-state offsets for configs differing only in T")
    p.add_argument("--configs", nargs="+", required=True)
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render SVG panels from a telemetry CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--path", help="path CSV; defaults to path.csv next to the telemetry")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
