"""Command line entry point: ``koop run | list | print-defaults``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .config import ConfigError, load_config, print_defaults
from .gallery import GALLERY, ScenarioResult, UnknownScenario, list_gallery, run_scenario

__all__ = ["main", "write_report", "execute"]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_report(result: ScenarioResult, config: dict, out_dir: str, seconds: float) -> dict:
    """Write verdicts, tables and report for one scenario; return the report dict."""
    root = os.path.join(out_dir, result.name)
    tables_dir = os.path.join(root, "tables")
    os.makedirs(tables_dir, exist_ok=True)
    for stale in os.listdir(tables_dir):
        if stale.endswith(".csv"):
            os.remove(os.path.join(tables_dir, stale))

    verdicts = result.sorted_verdicts()
    with open(os.path.join(root, "verdicts.jsonl"), "w") as fh:
        for v in verdicts:
            fh.write(v.to_json() + "\n")
    tables = {}
    for name in sorted(result.tables):
        rel = f"tables/{name}.csv"
        with open(os.path.join(root, rel), "w") as fh:
            fh.write(result.tables[name])
        tables[name] = rel
    report = {
        "scenario": result.name,
        "version": __version__,
        "config": config,
        "verdicts": [v.to_dict() for v in verdicts],
        "tables": tables,
        "artifacts": result.artifacts,
        "ok": result.ok,
    }
    with open(os.path.join(root, "report.json"), "w") as fh:
        fh.write(_dump(report))
    # wall-clock lives apart from the report so reports stay reproducible
    with open(os.path.join(root, "timing.json"), "w") as fh:
        fh.write(_dump({"scenario": result.name, "wall_clock_seconds": seconds}))
    return report


def _timed(name, config):
    start = time.perf_counter()
    result = run_scenario(name, config)
    return result, time.perf_counter() - start


def execute(names, config, out_dir, parallel=False):
    """Run scenarios and write their reports; returns ``[(result, report), ...]`` in input order."""
    if parallel and len(names) > 1:
        with ProcessPoolExecutor() as pool:
            runs = list(pool.map(_timed, names, [config] * len(names)))
    else:
        runs = [_timed(n, config) for n in names]
    return [(res, write_report(res, config, out_dir, sec)) for res, sec in runs]


def _summary_line(result: ScenarioResult) -> str:
    bad = [v.name for v in result.verdicts if not v.ok]
    n_exp = sum(1 for v in result.verdicts if not v.expected)
    status = "ok" if not bad else "FAIL " + ",".join(sorted(bad))
    return f"{result.name}: {len(result.verdicts)} verdicts ({n_exp} expected-fail) {status}"


def _build_parser():
    p = argparse.ArgumentParser(prog="koop", description=__doc__)
    p.add_argument("--print-defaults", action="store_true", help="print the default config and exit")
    p.add_argument("--version", action="version", version=f"koop {__version__}")
    sub = p.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run a gallery scenario (or 'all')")
    run.add_argument("scenario")
    run.add_argument("--config", default=None, help="JSON config file")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--parallel", action="store_true", help="run independent scenarios concurrently")
    sub.add_parser("list", help="list gallery scenarios")
    sub.add_parser("print-defaults", help="print the default config")
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults or args.command == "print-defaults":
        sys.stdout.write(print_defaults() + "\n")
        return 0
    if args.command == "list":
        for name, desc in list_gallery():
            print(f"{name}\t{desc}")
        return 0
    if args.command != "run":
        parser.print_help()
        return 2
    try:
        config = load_config(args.config)
        names = list(GALLERY) if args.scenario == "all" else [args.scenario]
        for n in names:
            if n not in GALLERY:
                raise UnknownScenario(f"unknown scenario {n!r}; valid: {', '.join(GALLERY)}")
        out_dir = args.out or config["output_dir"]
        runs = execute(names, config, out_dir, args.parallel)
    except (ConfigError, UnknownScenario, OSError) as exc:
        print(f"koop: error: {exc}", file=sys.stderr)
        return 2
    for res, _ in runs:
        print(_summary_line(res))
    return 0 if all(res.ok for res, _ in runs) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
