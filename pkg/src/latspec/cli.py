"""Command-line runner for the experiment registry.

``latspec run config.json`` validates the config, executes the named
experiment, writes ``report.json`` plus per-sweep CSV files (and SVG
log-log charts unless disabled), prints one line per gate and exits 0
only if every gate passed.  ``latspec list`` prints the registry;
``latspec export-kernel`` dumps a walk-power kernel as CSV.

Exit codes: 0 all gates pass, 1 a gate failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import difflib
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .experiments import (
    REGISTRY,
    ConfigError,
    resolve_workers,
    validate_params,
)
from .lattice import GridSpec, kernel_to_csv, walk_power_kernel
from .svgplot import loglog_svg

_TOP_LEVEL_KEYS = {"schema", "experiment", "params", "seed", "workers",
                   "out_dir", "svg"}


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 2


def _line_of(text: str, key: str) -> int:
    """Best-effort line number of a config key, for diagnostics."""
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _csv_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_csv(path, header, rows) -> None:
    """RFC-4180 output: CRLF rows, header first, shortest float repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(cell) for cell in row])


def cmd_run(args) -> int:
    path = args.config
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _fail(f"error: cannot read {path}: {exc}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        return _fail(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")
    if not isinstance(cfg, dict):
        return _fail(f"{path}:1: config must be a JSON object")
    for key in cfg:
        if key not in _TOP_LEVEL_KEYS:
            return _fail(f"{path}:{_line_of(text, key)}: unknown field '{key}'")
    schema = cfg.get("schema", 1)
    if schema != 1:
        return _fail(
            f"{path}:{_line_of(text, 'schema')}: unsupported schema "
            f"version {schema!r} (this runner reads version 1)"
        )
    name = cfg.get("experiment")
    if not isinstance(name, str):
        return _fail(f"{path}:1: missing field 'experiment'")
    if name not in REGISTRY:
        message = f"{path}:{_line_of(text, 'experiment')}: " \
                  f"unknown experiment '{name}'"
        nearest = difflib.get_close_matches(name, list(REGISTRY), n=1)
        if nearest:
            message += f"; did you mean '{nearest[0]}'?"
        return _fail(message)
    experiment = REGISTRY[name]

    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        return _fail(f"{path}:{_line_of(text, 'seed')}: seed must be a "
                     "non-negative integer")
    workers_cfg = args.workers if args.workers is not None else cfg.get("workers")
    if workers_cfg is not None and (
        not isinstance(workers_cfg, int) or workers_cfg < 1
    ):
        return _fail(f"{path}:{_line_of(text, 'workers')}: workers must be "
                     "a positive integer")
    workers = resolve_workers(workers_cfg)
    out_dir = args.out_dir if args.out_dir is not None else cfg.get("out_dir", ".")
    svg = cfg.get("svg", True)
    if not isinstance(svg, bool):
        return _fail(f"{path}:{_line_of(text, 'svg')}: svg must be a boolean")
    overrides = cfg.get("params", {})
    if not isinstance(overrides, dict):
        return _fail(f"{path}:{_line_of(text, 'params')}: params must be "
                     "an object")
    try:
        params = validate_params(experiment, overrides)
    except ConfigError as exc:
        return _fail(f"{path}:{_line_of(text, exc.key)}: {exc}")

    try:
        result = experiment.runner(params, np.random.SeedSequence(seed), workers)
    except ValueError as exc:
        return _fail(f"config error in experiment '{name}': {exc}")

    os.makedirs(out_dir, exist_ok=True)
    artifacts = []
    for table_name, (header, rows) in sorted(result.tables.items()):
        csv_path = os.path.join(out_dir, f"{name}-{table_name}.csv")
        write_csv(csv_path, header, rows)
        artifacts.append(os.path.basename(csv_path))
    if svg:
        for plot_name, plot in sorted(result.plots.items()):
            svg_path = os.path.join(out_dir, f"{name}-{plot_name}.svg")
            loglog_svg(
                plot["series"], svg_path, title=plot.get("title", ""),
                xlabel=plot.get("xlabel", ""), ylabel=plot.get("ylabel", ""),
            )
            artifacts.append(os.path.basename(svg_path))
    report = {
        "schema": 1,
        "experiment": name,
        "claim": experiment.claim,
        "seed": seed,
        "workers": workers,
        "params": params,
        "gates": result.gates,
        "fits": {key: fit.as_dict() for key, fit in result.fits.items()},
        "reports": result.reports,
        "artifacts": artifacts,
        "passed": result.passed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")

    for gate in result.gates:
        verdict = "pass" if gate["passed"] else "FAIL"
        print(f"gate {gate['name']}: {verdict} ({gate['detail']})")
    if result.passed:
        print(f"{name}: all {len(result.gates)} gates passed; "
              f"report in {report_path}")
        return 0
    print(f"{name}: gate '{result.failing_gate()}' failed; "
          f"report in {report_path}")
    return 1


def cmd_list(args) -> int:
    width = max(len(name) for name in REGISTRY)
    for name, experiment in REGISTRY.items():
        print(f"{name:<{width}}  {experiment.claim}")
    return 0


def cmd_export_kernel(args) -> int:
    try:
        kernel = walk_power_kernel(GridSpec(args.n, args.M), args.k)
    except ValueError as exc:
        return _fail(f"error: {exc}")
    kernel_to_csv(kernel, args.out)
    print(f"wrote A^{args.k} on the {args.M}^{args.n} window to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latspec",
        description="Run decay-law experiments on the lattice walk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--out-dir", help="artifact directory (overrides config)")
    run.add_argument("--seed", type=int, help="seed override")
    run.add_argument("--workers", type=int, help="worker-count override")
    run.set_defaults(func=cmd_run)

    lister = sub.add_parser("list", help="print the experiment registry")
    lister.set_defaults(func=cmd_list)

    export = sub.add_parser("export-kernel", help="dump a walk power as CSV")
    export.add_argument("--n", type=int, required=True, help="dimension")
    export.add_argument("--M", type=int, required=True, help="window edge")
    export.add_argument("--k", type=int, required=True, help="walk power")
    export.add_argument("--out", required=True, help="output CSV path")
    export.set_defaults(func=cmd_export_kernel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
