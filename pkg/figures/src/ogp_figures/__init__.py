"""Rendering layer for ogp-lab outputs.

Every number plotted here comes straight out of a CSV column or JSON field
produced by the simulation CLI; this package performs no numerical
computation beyond axis transforms, so auditing results reduces to diffing
the CSVs.
"""

__version__ = "0.1.0"

from .plots import PlotSpec, plot
from .report import report
