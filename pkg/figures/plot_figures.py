#!/usr/bin/env python3
"""Entry script: plot_figures.py --in <dir> --out <dir>."""

import sys

from ogp_figures.cli import main

if __name__ == "__main__":
    sys.exit(main())
