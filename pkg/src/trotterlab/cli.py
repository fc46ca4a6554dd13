"""Command-line front end: ``trotterlab run <config.json>``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from trotterlab import __version__, landau
from trotterlab.errors import ConfigError, TrotterLabError
from trotterlab.experiments import EXPERIMENTS, resolve_parameters, run_experiment
from trotterlab.io import FORMATS, dumps_csv, dumps_json, to_plain

CONFIG_KEYS = ("experiment", "parameters", "output")
OUTPUT_KEYS = ("path", "format")

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict
    output_path: str | None = None
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None, output: str | None = None, fmt: str | None = None):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        for key in raw:
            if key not in CONFIG_KEYS:
                raise ConfigError("unknown config key", key)
        if "experiment" not in raw:
            raise ConfigError("missing config key", "experiment")
        params = dict(raw.get("parameters") or {})
        if seed is not None:
            params["seed"] = seed
        resolved = resolve_parameters(raw["experiment"], params)
        out = raw.get("output") or {}
        if not isinstance(out, dict):
            raise ConfigError("output must be an object", "output")
        for key in out:
            if key not in OUTPUT_KEYS:
                raise ConfigError("unknown output key", key)
        fmt = fmt or out.get("format") or "csv"
        if fmt not in FORMATS:
            raise ConfigError("unknown output format", fmt)
        return cls(raw["experiment"], resolved, output or out.get("path"), fmt)

    def echo(self) -> dict:
        return {"experiment": self.experiment, "parameters": self.parameters, "format": self.output_format}


@dataclass
class RunReport:
    config: ExperimentConfig
    checks: list[tuple[str, bool]]
    passed: bool
    duration: float
    version: str = __version__
    text: str = field(default="", repr=False)

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks if not ok]


def run(config: ExperimentConfig) -> RunReport:
    """Execute the experiment, render its table and write it if a path is set.

    The rendered file is a pure function of the config; the wall-clock
    duration lives only on the returned report.
    """
    start = time.perf_counter()
    out = run_experiment(config.experiment, config.parameters)
    header = {
        "config": config.echo(),
        "constants": out.constants,
        "thresholds": landau.thresholds(),
        "checks_total": len(out.checks),
        "checks_passed": sum(ok for _, ok in out.checks),
        "passed": out.passed,
        "version": __version__,
    }
    text = dumps_csv(out.rows, header) if config.output_format == "csv" else dumps_json(out.rows, header)
    if config.output_path:
        path = Path(config.output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return RunReport(config, out.checks, out.passed, time.perf_counter() - start, text=text)


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trotterlab", description=__doc__)
    parser.add_argument("--list-experiments", action="store_true", help="list experiment names and exit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    p_run = sub.add_parser("run", help="run an experiment described by a JSON config file")
    p_run.add_argument("config", help="path to the JSON config")
    p_run.add_argument("--output", help="output file (default: config value, else stdout)")
    p_run.add_argument("--format", choices=FORMATS, help="output format")
    p_run.add_argument("--seed", type=_u64, help="override the random seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_experiments:
        for name, exp in EXPERIMENTS.items():
            print(f"{name}\t{exp.summary}")
        return 0
    if args.command != "run":
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        config = ExperimentConfig.from_dict(load_config(args.config), args.seed, args.output, args.format)
    except (ConfigError, OSError) as exc:
        print(f"trotterlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run(config)
    except TrotterLabError as exc:
        print(f"trotterlab: {config.experiment} failed in {type(exc).__module__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not config.output_path:
        sys.stdout.write(report.text)
    for name in report.failures:
        print(f"FAIL {name}", file=sys.stderr)
    summary = {
        "experiment": config.experiment,
        "passed": report.passed,
        "checks": len(report.checks),
        "failures": len(report.failures),
        "duration_s": round(report.duration, 3),
        "version": report.version,
    }
    print(json.dumps(to_plain(summary), sort_keys=True), file=sys.stderr)
    return 0 if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
