"""plot-figures --in <dir> --out <dir>: render all recognized outputs under
the input tree and build the HTML report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .report import report


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot-figures")
    parser.add_argument("--in", dest="in_dir", type=Path, required=True)
    parser.add_argument("--out", dest="out_dir", type=Path, required=True)
    args = parser.parse_args(argv)
    if not args.in_dir.is_dir():
        print(f"error: input directory {args.in_dir} does not exist", file=sys.stderr)
        return 2
    out = report(args.in_dir, args.out_dir)
    print(str(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
