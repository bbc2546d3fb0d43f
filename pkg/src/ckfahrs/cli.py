"""Command line entry point: ``ckfahrs simulate|estimate|compare|init-config``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import config as config_mod
from .errors import CkfAhrsError, DataError, FormatError, InitFailed
from .evaluate import LABELS, compare, estimates_csv, format_table, plot_csv, report_csv, run_filter
from .sim import Profile, load_csv, simulate, write_csv

log = logging.getLogger("ckfahrs")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_FILTER = 3

CONFIG_NAME = "ckfahrs.cfg"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, *, seed=True, filt=True, inject=True) -> None:
    p.add_argument("--config", type=Path, help="configuration file (see init-config)")
    if seed:
        p.add_argument("--seed", type=int, help="override the scenario seed")
    if filt:
        p.add_argument("--filter", choices=("ckf", "svdckf", "both"), help="filters to run (default from config)")
    if inject:
        p.add_argument(
            "--inject-rank-deficiency", type=int, metavar="STEP", dest="inject",
            help="zero one covariance row/column before sample STEP",
        )
    p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ckfahrs", description="Cubature-filter AHRS: simulation and CKF/SVDCKF comparison.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate a synthetic IMU/MAG log with attitude truth")
    _add_common(p, filt=False, inject=False)
    p.add_argument("--profile", choices=[m.value for m in Profile], help="override the scenario profile")

    p = sub.add_parser("estimate", help="run the filter(s) over a CSV log")
    p.add_argument("input", type=Path, help="sensor log CSV")
    _add_common(p, seed=False)

    p = sub.add_parser("compare", help="RMSE comparison of CKF, SVDCKF and open-loop integration")
    p.add_argument("input", type=Path, nargs="?", help="sensor log CSV with truth (default: simulate from config)")
    _add_common(p)
    p.add_argument("--profile", choices=[m.value for m in Profile], help="override the scenario profile")

    p = sub.add_parser("init-config", help="write the documented default configuration")
    p.add_argument("--out", type=Path, help=f"directory or file to write (default: print); a directory gets {CONFIG_NAME}")
    return parser


def _load_config(args) -> config_mod.RunConfig:
    try:
        cfg = config_mod.load(args.config) if args.config else config_mod.default()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"{args.config}: {exc}") from exc
    scenario = cfg.scenario
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, seed=args.seed)
    if getattr(args, "profile", None):
        scenario = replace(scenario, profile=Profile(args.profile), name=args.profile)
    filters = config_mod.parse_filters(args.filter) if getattr(args, "filter", None) else cfg.filters
    inject = getattr(args, "inject", None)
    if inject is not None and inject < 1:
        raise UsageError("--inject-rank-deficiency needs a step >= 1")
    return config_mod.RunConfig(scenario, cfg.ahrs, filters)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", path)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    imu, truth = simulate(cfg.scenario)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"{cfg.scenario.name}.csv"
    write_csv(path, imu, truth)
    print(f"{path}: {len(imu)} samples, {cfg.scenario.duration:g} s at {cfg.scenario.rate:g} Hz, seed {cfg.scenario.seed}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _load_config(args)
    imu, _ = load_csv(args.input)
    status = EXIT_OK
    for method in cfg.filters:
        run = run_filter(imu, cfg.ahrs, method, args.inject)
        path = args.out / f"{args.input.stem}_{LABELS[method].lower()}.csv"
        _write(path, estimates_csv(imu.t, run))
        print(f"{LABELS[method]:>7}: {run.status}  {int(run.updated.sum())} updates  {1e3 * run.runtime_s:.1f} ms -> {path}")
        if run.failed_at is not None:
            print(f"         {run.error}", file=sys.stderr)
            status = EXIT_FILTER
    return status


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    if args.input is not None:
        imu, truth = load_csv(args.input)
        if truth is None:
            raise DataError(f"{args.input}: compare needs truth columns")
        name = args.input.stem
    else:
        imu, truth = simulate(cfg.scenario)
        name = cfg.scenario.name
    cmp = compare(imu, truth, cfg.ahrs, cfg.filters, scenario=name, inject_step=args.inject)
    reports = cmp.reports()
    # files stay free of wall-clock numbers so reruns are byte-identical
    _write(args.out / "report.txt", format_table(reports))
    _write(args.out / "report.csv", report_csv(reports))
    _write(args.out / "plot.csv", plot_csv(cmp))
    sys.stdout.write(format_table(reports, timing=True))
    failed = [r for r in cmp.runs if r.failed_at is not None]
    for run in failed:
        print(f"{run.label} failed at step {run.failed_at}: {run.error}", file=sys.stderr)
    return EXIT_FILTER if failed else EXIT_OK


def cmd_init_config(args) -> int:
    if args.out is None:
        sys.stdout.write(config_mod.DEFAULT_CONFIG)
        return EXIT_OK
    path = args.out / CONFIG_NAME if args.out.is_dir() or not args.out.suffix else args.out
    _write(path, config_mod.DEFAULT_CONFIG)
    print(path)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "compare": cmd_compare,
    "init-config": cmd_init_config,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ckfahrs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, DataError, InitFailed, OSError) as exc:
        print(f"ckfahrs: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CkfAhrsError as exc:
        print(f"ckfahrs: {exc}", file=sys.stderr)
        return EXIT_FILTER


if __name__ == "__main__":
    sys.exit(main())
