"""Command line entry point: ``afdm-isac run|validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import PRESETS, ConfigError, ExperimentConfig, from_dict, load_raw, merge, preset, validate
from .runner import THREADS_ENV, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afdm-isac", description="AFDM radar sensing experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and write result files")
    p_run.add_argument("config", nargs="?", help="YAML/JSON config file (keys override the preset)")
    p_run.add_argument("--preset", choices=sorted(PRESETS))
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or CPU count)")
    p_run.add_argument("--trials", type=int)
    p_run.add_argument("--format", choices=("csv", "json"))
    p_run.add_argument("--svg", action="store_true", help="also write SVG plots")

    p_val = sub.add_parser("validate", help="check a config and print diagnostics")
    p_val.add_argument("config", nargs="?")
    p_val.add_argument("--preset", choices=sorted(PRESETS))
    return parser


def _resolve(args) -> ExperimentConfig:
    if not args.config and not args.preset:
        raise ConfigError("give a config file, --preset, or both")
    cfg = preset(args.preset) if args.preset else ExperimentConfig()
    if args.config:
        raw = load_raw(args.config)
        # only keys present in the file override the preset
        cfg = merge(cfg, raw) if args.preset else from_dict(raw)
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    output = {}
    if getattr(args, "out", None):
        output["dir"] = args.out
    if getattr(args, "format", None):
        output["format"] = args.format
    if getattr(args, "svg", False):
        output["svg"] = True
    if output:
        overrides["output"] = output
    return merge(cfg, overrides) if overrides else cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    diags = validate(cfg)
    for d in diags:
        print(d, file=sys.stderr)
    if any(d.level == "error" for d in diags):
        return EXIT_CONFIG
    if args.command == "validate":
        if not diags:
            print("ok")
        return EXIT_OK

    try:
        bundle = run(cfg, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in bundle.files:
        print(path)
    return EXIT_OK
