"""Figure kinds for the simulation CSVs.

Each plot reads one or two CSV files, checks the columns it needs, and
writes a single PNG or SVG. Theory overlays come from the r_theory column
emitted by the simulation; nothing is recomputed here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("fig1", "heatmap-pair", "curves", "phase")


class MissingColumnError(ValueError):
    pass


@dataclass
class PlotSpec:
    inputs: list[Path]
    kind: str
    out: Path
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    group_by: str = ""
    x: str = ""
    y: str = ""


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(x) if x != "" else np.nan for x in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return cols


def _need(cols: dict[str, np.ndarray], names: list[str], path: Path) -> None:
    for name in names:
        if name not in cols:
            raise MissingColumnError(f"{path}: missing column {name!r}")


def plot(spec: PlotSpec) -> Path:
    """Render one figure; raises (and writes nothing) on schema problems."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r}")
    fig = {
        "fig1": _plot_fig1,
        "heatmap-pair": _plot_heatmap_pair,
        "curves": _plot_curves,
        "phase": _plot_phase,
    }[spec.kind](spec)
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return spec.out


def _plot_fig1(spec: PlotSpec):
    cols = read_csv(spec.inputs[0])
    _need(cols, ["seed", "gamma", "r_tilde", "r_theory", "path_overlap"], spec.inputs[0])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    for seed in np.unique(cols["seed"]):
        mask = cols["seed"] == seed
        order = np.argsort(cols["gamma"][mask])
        ax1.plot(
            cols["gamma"][mask][order],
            cols["r_tilde"][mask][order],
            "o-",
            alpha=0.6,
            label=f"run {int(seed)}",
        )
        ax2.plot(
            cols["gamma"][mask][order],
            cols["path_overlap"][mask][order],
            "o-",
            alpha=0.6,
        )
    order = np.argsort(cols["gamma"])
    ax1.plot(cols["gamma"][order], cols["r_theory"][order], "k-", lw=2, label="theory")
    ax1.set_xlabel(spec.xlabel or "correlation survival")
    ax1.set_ylabel("tree overlap")
    ax1.legend(fontsize=8)
    ax2.set_xlabel(spec.xlabel or "correlation survival")
    ax2.set_ylabel("path overlap")
    ax1.set_ylim(-0.02, 1.02)
    ax2.set_ylim(-0.02, 1.02)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def _grid_from_long(cols, xname, yname, path):
    _need(cols, [xname, yname, "value"], path)
    xs = np.unique(cols[xname])
    ys = np.unique(cols[yname])
    grid = np.full((ys.size, xs.size), np.nan)
    xi = np.searchsorted(xs, cols[xname])
    yi = np.searchsorted(ys, cols[yname])
    grid[yi, xi] = cols["value"]
    return xs, ys, grid


def _plot_heatmap_pair(spec: PlotSpec):
    top = read_csv(spec.inputs[0])
    bottom = read_csv(spec.inputs[1])
    xs1, ys1, g1 = _grid_from_long(top, "lambda", "gamma", spec.inputs[0])
    xs2, ys2, g2 = _grid_from_long(bottom, "lambda", "rho", spec.inputs[1])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 8), sharex=True)
    im1 = ax1.pcolormesh(xs1, ys1, g1, vmin=0, vmax=1, shading="nearest")
    ax2.pcolormesh(xs2, ys2, g2, vmin=0, vmax=1, shading="nearest")
    ax1.set_ylabel("correlation survival")
    ax2.set_ylabel("retention")
    ax2.set_xlabel(spec.xlabel or "limit fraction at the far layer")
    fig.colorbar(im1, ax=(ax1, ax2), label="tree overlap")
    if spec.title:
        fig.suptitle(spec.title)
    return fig


def _plot_curves(spec: PlotSpec):
    cols = read_csv(spec.inputs[0])
    x = spec.x or "r"
    y = spec.y or "value"
    _need(cols, [x, y] + ([spec.group_by] if spec.group_by else []), spec.inputs[0])
    fig, ax = plt.subplots(figsize=(6, 4))
    if spec.group_by:
        for key in np.unique(cols[spec.group_by]):
            mask = cols[spec.group_by] == key
            order = np.argsort(cols[x][mask])
            ax.plot(cols[x][mask][order], cols[y][mask][order], label=f"{spec.group_by}={key}")
        ax.legend(fontsize=8)
    else:
        order = np.argsort(cols[x])
        ax.plot(cols[x][order], cols[y][order])
    ax.set_xlabel(spec.xlabel or x)
    ax.set_ylabel(spec.ylabel or y)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig


def _plot_phase(spec: PlotSpec):
    cols = read_csv(spec.inputs[0])
    _need(cols, ["delta", "kappa", "beta_c"], spec.inputs[0])
    fig, ax = plt.subplots(figsize=(6, 4))
    for kappa in np.unique(cols["kappa"]):
        mask = cols["kappa"] == kappa
        order = np.argsort(cols["delta"][mask])
        ax.plot(cols["delta"][mask][order], cols["beta_c"][mask][order], label=f"kappa={kappa}")
    ax.set_xlabel("depth gap")
    ax.set_ylabel("critical inverse temperature")
    ax.legend(fontsize=8)
    ax.set_ylim(-1.5, 1.5)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig
