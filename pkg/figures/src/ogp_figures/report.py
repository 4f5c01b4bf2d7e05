"""Collate rendered figures and run provenance into one HTML report."""

from __future__ import annotations

import html
import json
import sys
from pathlib import Path

from .plots import PlotSpec, plot

# per-directory recipe: which CSVs exist -> which figures to render
RECIPES = [
    ("fig1_overlap.csv", None, "fig1", "fig1.png", {}),
    ("heatmap_gamma.csv", "heatmap_rho.csv", "heatmap-pair", "heatmaps.png", {}),
    ("phase_diagram.csv", None, "phase", "phase_diagram.png", {}),
    ("fpp_curves.csv", None, "curves", "fpp_curves.png", {"group_by": "beta", "x": "r", "y": "value"}),
    ("replica.csv", None, "curves", "replica.png", {"group_by": "", "x": "seed", "y": "overlap_emp"}),
    ("appendixF_fpp.csv", None, "curves", "appendixF_fpp.png", {"group_by": "", "x": "r", "y": "ising_fpp"}),
    ("appendixF_flow.csv", None, "curves", "appendixF_flow.png", {"group_by": "", "x": "t", "y": "x"}),
]


def render_dir(in_dir: Path, out_dir: Path) -> list[Path]:
    """Render every recognized CSV in one run directory."""
    written = []
    for primary, secondary, kind, out_name, extra in RECIPES:
        src = in_dir / primary
        if not src.exists():
            continue
        if secondary is not None and not (in_dir / secondary).exists():
            continue
        inputs = [src] + ([in_dir / secondary] if secondary else [])
        spec = PlotSpec(inputs=inputs, kind=kind, out=out_dir / out_name, **extra)
        written.append(plot(spec))
    return written


def report(in_dir: Path, out_dir: Path) -> Path:
    """One HTML page per input tree: a section per run directory holding its
    figures and the resolved config; deterministic output (no timestamps).

    Run directories without a summary.json are skipped with a warning. The
    two heatmap CSVs are paired across run directories when they do not
    share one, since their stacked figure spans both grids.
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_dirs = sorted(
        {p.parent for p in in_dir.rglob("*.csv")} | {p.parent for p in in_dir.rglob("summary.json")}
    )
    sections = []
    gammas = sorted(in_dir.rglob("heatmap_gamma.csv"))
    rhos = sorted(in_dir.rglob("heatmap_rho.csv"))
    if gammas and rhos and gammas[0].parent != rhos[0].parent:
        spec = PlotSpec(
            inputs=[gammas[0], rhos[0]],
            kind="heatmap-pair",
            out=out_dir / "figures" / "heatmap_pair.png",
        )
        img = plot(spec)
        sections.append(
            "<section>\n<h2>heatmap pair</h2>\n"
            f'<img src="{html.escape(str(img.relative_to(out_dir)))}" width="640"/>\n</section>'
        )
    for run in run_dirs:
        summary_path = run / "summary.json"
        if not summary_path.exists():
            print(f"warning: {run}: no summary.json, section skipped", file=sys.stderr)
            continue
        summary = json.loads(summary_path.read_text())
        name = run.relative_to(in_dir) if run != in_dir else Path(run.name)
        fig_dir = out_dir / "figures" / str(name).replace("/", "_")
        images = render_dir(run, fig_dir)
        imgs_html = "\n".join(
            f'<img src="{html.escape(str(p.relative_to(out_dir)))}" width="640"/>' for p in images
        )
        cfg = html.escape(json.dumps(summary.get("config", {}), indent=2, sort_keys=True))
        sections.append(
            f"<section>\n<h2>{html.escape(str(name))}</h2>\n{imgs_html}\n"
            f"<details><summary>config</summary><pre>{cfg}</pre></details>\n</section>"
        )
    body = "\n".join(sections)
    page = (
        "<!DOCTYPE html>\n<html><head><meta charset='utf-8'/>"
        "<title>ogp-lab report</title></head>\n<body>\n"
        f"<h1>ogp-lab report</h1>\n{body}\n</body></html>\n"
    )
    out = out_dir / "report.html"
    out.write_text(page)
    return out
