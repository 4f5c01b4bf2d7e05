"""Command-line front end: run or validate experiment configs and
materialize preset configs.

Exit codes: 0 success, 2 unwritable output path, 3 invalid preset or config.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    PRESETS,
    default_config,
    parse_config,
    run,
    serialize_config,
    validate,
    version,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ogp-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", type=Path)

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("config", type=Path)

    p_pre = sub.add_parser("preset", help="write a preset config file")
    p_pre.add_argument("name")
    p_pre.add_argument("--out", type=Path, required=True)

    sub.add_parser("version", help="print the version")

    args = parser.parse_args(argv)

    if args.command == "version":
        print(version())
        return EXIT_OK

    if args.command == "preset":
        if args.name not in PRESETS:
            print(f"error: unknown preset {args.name!r}; choose from {', '.join(PRESETS)}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            args.out.mkdir(parents=True, exist_ok=True)
            path = args.out / f"{args.name}.cfg"
            path.write_text(serialize_config(default_config(args.name)))
        except OSError as e:
            print(f"error: cannot write preset: {e}", file=sys.stderr)
            return EXIT_IO
        print(str(path))
        return EXIT_OK

    try:
        cfg = parse_config(args.config.read_text())
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    problems = validate(cfg)
    if args.command == "validate":
        if problems:
            for p in problems:
                print(f"error: {p}", file=sys.stderr)
            return EXIT_CONFIG
        print("ok")
        return EXIT_OK

    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        files = run(cfg)
    except PermissionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    for f in files:
        print(str(f))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
