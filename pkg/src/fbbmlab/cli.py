"""Command line front end: run scenarios, validate configs, print schemas.

Output contract: for a fixed config the CSV, JSON and plot-data files are
byte-identical across reruns; the manifest is the only file allowed to
differ (it records wall-clock time).  The manifest is written atomically
and the exit status is nonzero exactly when an asserted check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from importlib import resources

import jsonschema

from . import __version__
from .config import SCENARIOS, ConfigError, ScenarioConfig, load_config
from .scenarios import Check, ScenarioResult, Table, run_scenario

SCHEMA_NAMES = SCENARIOS + ("manifest",)

EXIT_OK = 0
EXIT_ERROR = 1  # a runner raised; manifest records the error
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3


def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise ValueError(f"no schema named {name!r}; know {', '.join(SCHEMA_NAMES)}")
    path = resources.files("fbbmlab").joinpath(f"schemas/{name}.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def _fmt(value) -> str:
    # repr of a float is the shortest round-trip form; strings pass through
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def write_csv(path: str, table: Table, config_hash: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# config-hash: {config_hash}\n")
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_plotdata(path: str, table: Table, config_hash: str) -> None:
    xi, yi = table.plot
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# config-hash: {config_hash}\n")
        fh.write(f"# {table.columns[xi]} vs {table.columns[yi]}\n")
        for row in table.rows:
            fh.write(f"{_fmt(row[xi])} {_fmt(row[yi])}\n")


def write_summary(path: str, summary: dict, scenario: str) -> None:
    jsonschema.validate(summary, load_schema(scenario))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(path: str, manifest: dict) -> None:
    jsonschema.validate(manifest, load_schema("manifest"))
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".manifest-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _out_dir(cfg: ScenarioConfig, cli_out: str | None) -> str:
    if cli_out:
        return cli_out
    if cfg.out:
        return cfg.out
    base = os.environ.get("FBBMLAB_OUT", "runs")
    return os.path.join(base, f"{cfg.scenario}-{cfg.config_hash()[:12]}")


def _checks_to_json(checks: list[Check]) -> list[dict]:
    return [
        {
            "name": c.name,
            "passed": bool(c.passed),
            "value": None if c.value is None else float(c.value),
            "threshold": c.threshold,
        }
        for c in checks
    ]


def _run(args) -> int:
    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"no such config file: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as e:
        print("config invalid:", file=sys.stderr)
        for v in e.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = ScenarioConfig(
            scenario=cfg.scenario,
            params=cfg.params,
            seed=args.seed,
            out=cfg.out,
            emit=cfg.emit,
        )

    out_dir = _out_dir(cfg, args.out)
    os.makedirs(out_dir, exist_ok=True)
    config_hash = cfg.config_hash()

    t0 = time.perf_counter()
    error = None
    result = ScenarioResult()
    try:
        result = run_scenario(cfg, threads=args.threads)
    except Exception as e:  # runner failures land in the manifest
        error = f"{type(e).__name__}: {e}"
    wall = time.perf_counter() - t0

    outputs = []
    if error is None:
        if cfg.emit["csv"]:
            for table in result.tables:
                name = f"{table.name}.csv"
                write_csv(os.path.join(out_dir, name), table, config_hash)
                outputs.append(name)
        if cfg.emit["json"]:
            name = "summary.json"
            write_summary(os.path.join(out_dir, name), result.summary, cfg.scenario)
            outputs.append(name)
        if cfg.emit["plotdata"]:
            for table in result.tables:
                if table.plot is None:
                    continue
                name = f"{table.name}.dat"
                write_plotdata(os.path.join(out_dir, name), table, config_hash)
                outputs.append(name)

    manifest = {
        "tool": "fbbmlab",
        "version": __version__,
        "scenario": cfg.scenario,
        "config_hash": config_hash,
        "config": {
            "scenario": cfg.scenario,
            "params": cfg.params,
            "seed": cfg.seed,
            "emit": cfg.emit,
        },
        "grid": result.grid,
        "checks": _checks_to_json(result.checks),
        "outputs": outputs,
        "wall_clock_s": wall,
        "error": error,
    }
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)

    for c in result.checks:
        status = "PASS" if c.passed else "FAIL"
        val = "n/a" if c.value is None else f"{c.value:.6g}"
        print(f"check {c.name}: {status} ({val} {c.threshold})")
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
        print(f"manifest: {os.path.join(out_dir, 'manifest.json')}")
        return EXIT_ERROR
    print(f"manifest: {os.path.join(out_dir, 'manifest.json')}")
    if not all(c.passed for c in result.checks):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"no such config file: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as e:
        print("config invalid:", file=sys.stderr)
        for v in e.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"config valid: scenario {cfg.scenario!r}, hash {cfg.config_hash()[:12]}")
    return EXIT_OK


def _schema(args) -> int:
    if args.name is None:
        print("\n".join(SCHEMA_NAMES))
        return EXIT_OK
    try:
        schema = load_schema(args.name)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(schema, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbbmlab",
        description="Spectral laboratory for a fractional BBM equation.",
    )
    parser.add_argument("--version", action="version", version=f"fbbmlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a JSON config")
    p_run.add_argument("config", help="path to the JSON config file")
    p_run.add_argument("--out", default=None, help="output directory (overrides config and FBBMLAB_OUT)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--threads", type=int, default=1, help="worker threads for corpus sweeps")
    p_run.set_defaults(func=_run)

    p_val = sub.add_parser("validate", help="validate a config and exit")
    p_val.add_argument("config", help="path to the JSON config file")
    p_val.set_defaults(func=_validate)

    p_sch = sub.add_parser("schema", help="print a shipped output schema")
    p_sch.add_argument("name", nargs="?", default=None, help="schema name (omit to list)")
    p_sch.set_defaults(func=_schema)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
