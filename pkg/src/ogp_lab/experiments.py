"""Config-driven experiment runner: presets that reproduce the overlap
curves, heatmaps, phase diagram, potential curves, replica checks, and the
box-landscape values as CSV/JSON files.

Config files are plain "key = value" text; comma-separated values make
arrays; '#' starts a comment. Outputs are deterministic given (config, seed)
and independent of the thread count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version
from . import rng as _rng
from .graphs import UNREACHABLE, bfs_layers, gen_er, proxies, resample_pair
from .gibbs import (
    gibbs_config,
    graph_stats,
    ground_energy,
    log_z_formula,
    phi_tilde_opt,
    sample_cond_ground,
    tau_sample,
    witness_statistic,
)
from .landscape import (
    f_infinity,
    f_multilinear,
    ising_fpp,
    lovasz_extension,
    projected_gradient_flow,
    vertex_table_from_f,
)
from .overlaps import overlap_report
from .theory import (
    critical_beta,
    fpp_curve,
    replica_overlap,
    tree_overlap_curve,
)
from .trees import shortest_path_dag, uniform_spt_sample

PRESETS = (
    "fig1-overlap",
    "heatmap-gamma",
    "heatmap-rho",
    "phase-diagram",
    "fpp-curves",
    "replica",
    "appendixF",
    "gibbs-summary",
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_CONFIG = 3


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 2000
    q: float = 0.005
    seed: int = 1
    trials: int = 3
    gamma_grid: list[float] = field(default_factory=list)
    rho_grid: list[float] = field(default_factory=list)
    time_grid: list[float] = field(default_factory=list)
    beta_grid: list[float] = field(default_factory=list)
    lambda_grid: list[float] = field(default_factory=list)
    delta_grid: list[float] = field(default_factory=list)
    kappa_grid: list[float] = field(default_factory=list)
    r_grid: list[float] = field(default_factory=list)
    lam: float = 0.3
    delta: float = 0.0
    beta: float = 2.0
    m_blocks: int = 200
    dt: float = 1e-3
    t_max: float = 3.0
    out_dir: str = "."

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


_SCALAR_INT = {"n", "seed", "trials", "m_blocks"}
_SCALAR_FLOAT = {"q", "lam", "delta", "beta", "dt", "t_max"}
_GRIDS = {
    "gamma_grid",
    "rho_grid",
    "time_grid",
    "beta_grid",
    "lambda_grid",
    "delta_grid",
    "kappa_grid",
    "r_grid",
}


def parse_config(text: str) -> ExperimentConfig:
    values: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in _GRIDS:
            values[key] = [float(x) for x in val.split(",") if x.strip()]
        elif key in _SCALAR_INT:
            values[key] = int(val)
        elif key in _SCALAR_FLOAT:
            values[key] = float(val)
        elif key in ("experiment", "out_dir"):
            values[key] = val
        else:
            raise ValueError(f"unknown config key: {key}")
    if "experiment" not in values:
        raise ValueError("config must name an experiment")
    return ExperimentConfig(**values)


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in cfg.__dataclass_fields__:
        val = getattr(cfg, key)
        if isinstance(val, list):
            if not val:
                continue
            lines.append(f"{key} = {', '.join(repr(x) for x in val)}")
        else:
            lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def validate(cfg: ExperimentConfig) -> list[str]:
    """Schema validation without side effects; returns a list of problems."""
    errors = []
    if cfg.experiment not in PRESETS:
        errors.append(f"experiment: unknown preset {cfg.experiment!r}")
    if cfg.n < 2:
        errors.append("n: must be at least 2")
    if not (0.0 < cfg.q < 1.0):
        errors.append("q: must lie in (0, 1)")
    if cfg.n * cfg.q <= 1.0:
        errors.append("n*q: must exceed 1")
    if cfg.trials < 1:
        errors.append("trials: must be positive")
    grid_needs = {
        "fig1-overlap": ["gamma_grid"],
        "heatmap-gamma": ["lambda_grid", "gamma_grid"],
        "heatmap-rho": ["lambda_grid", "rho_grid"],
        "phase-diagram": ["delta_grid", "kappa_grid"],
        "fpp-curves": ["beta_grid", "r_grid"],
        "replica": [],
        "appendixF": ["r_grid"],
        "gibbs-summary": ["beta_grid"],
    }
    for key in grid_needs.get(cfg.experiment, []):
        if not getattr(cfg, key):
            errors.append(f"{key}: must be a nonempty grid for {cfg.experiment}")
    for key in _GRIDS:
        grid = getattr(cfg, key)
        if key in ("lambda_grid",) and any(not (0.0 <= x <= 1.0) for x in grid):
            errors.append(f"{key}: entries must lie in [0, 1]")
    return errors


def version() -> str:
    return _version


def default_config(preset: str) -> ExperimentConfig:
    """Preset configs sized for desk-scale runs; fig1 defaults to the
    full-scale parameters used throughout and can be overridden."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    if preset == "fig1-overlap":
        return ExperimentConfig(
            experiment=preset,
            n=100_000,
            q=1e-4,
            seed=1,
            trials=3,
            gamma_grid=[float(round(x, 3)) for x in np.linspace(0.05, 0.95, 13)],
        )
    if preset == "heatmap-gamma":
        return ExperimentConfig(
            experiment=preset,
            lambda_grid=[float(round(x, 3)) for x in np.linspace(0.02, 0.98, 49)],
            gamma_grid=[float(round(x, 3)) for x in np.linspace(0.0, 1.0, 41)],
        )
    if preset == "heatmap-rho":
        return ExperimentConfig(
            experiment=preset,
            lambda_grid=[float(round(x, 3)) for x in np.linspace(0.02, 0.98, 49)],
            rho_grid=[float(round(x, 3)) for x in np.linspace(0.0, 1.0, 41)],
        )
    if preset == "phase-diagram":
        return ExperimentConfig(
            experiment=preset,
            delta_grid=[float(round(x, 3)) for x in np.linspace(0.0, 1.0, 21)],
            kappa_grid=[0.5, 1.0, 1.5, 2.0, 4.0, 8.0, math.inf],
        )
    if preset == "fpp-curves":
        return ExperimentConfig(
            experiment=preset,
            lam=0.3,
            delta=0.0,
            beta_grid=[0.8, 1.5],
            r_grid=[float(round(x, 4)) for x in np.linspace(0.0, 1.0, 101)],
        )
    if preset == "replica":
        return ExperimentConfig(experiment=preset, n=100_000, q=1e-4, seed=1, trials=3, beta=2.0)
    if preset == "appendixF":
        return ExperimentConfig(
            experiment=preset,
            m_blocks=200,
            beta=20.0,
            dt=1e-3,
            t_max=3.0,
            r_grid=[float(round(x, 4)) for x in np.linspace(-1.0, 1.0, 81)],
        )
    return ExperimentConfig(experiment=preset, n=10_000, q=1e-3, seed=1, beta_grid=[0.2, 2.0])


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def _thread_count() -> int:
    return max(1, int(os.environ.get("OGP_LAB_THREADS", "1")))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.10g}"
    return x


def run(cfg: ExperimentConfig) -> list[Path]:
    """Execute the experiment and return the list of files written."""
    problems = validate(cfg)
    if problems:
        raise ValueError("; ".join(problems))
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        raise PermissionError(f"output path not writable: {out}") from e

    dispatch = {
        "fig1-overlap": _run_fig1,
        "heatmap-gamma": _run_heatmap_gamma,
        "heatmap-rho": _run_heatmap_rho,
        "phase-diagram": _run_phase_diagram,
        "fpp-curves": _run_fpp_curves,
        "replica": _run_replica,
        "appendixF": _run_appendix_f,
        "gibbs-summary": _run_gibbs_summary,
    }
    files = dispatch[cfg.experiment](cfg, out)
    summary = out / "summary.json"
    payload = {
        "version": version(),
        "config": cfg.to_dict(),
        "files": [f.name for f in files],
    }
    summary.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    files.append(summary)
    return files


FIG1_HEADER = [
    "seed",
    "rho",
    "gamma",
    "lambda",
    "r_tilde",
    "r_theory",
    "q_indep",
    "s_dag",
    "path_overlap",
]


def _fig1_trial(cfg: ExperimentConfig, trial: int) -> list[list]:
    seed = cfg.seed + trial
    g1 = gen_er(cfg.n, cfg.q, seed)
    L1 = bfs_layers(g1, 0)
    px = proxies(cfg.n, cfg.q)
    rows = []
    for j, gamma in enumerate(cfg.gamma_grid):
        rho = gamma ** (1.0 / px.d_star) if gamma > 0 else 0.0
        g2 = resample_pair(g1, cfg.q, rho, seed * 100_003 + j)
        L2 = bfs_layers(g2, 0)
        # a path target reachable in both graphs, fixed per (trial, grid point)
        gen = _rng.stream(seed, _rng.TAG_TRIAL, j)
        both = np.flatnonzero((L1.dist != UNREACHABLE) & (L2.dist != UNREACHABLE))
        both = both[both != 0]
        target = int(both[gen.integers(both.size)]) if both.size else None
        rep = overlap_report(L1, L2, px.d_star, path_target=target, seed=seed * 7 + j)
        r_theory = tree_overlap_curve(px.lam, gamma, rho)
        rows.append(
            [
                seed,
                rho,
                gamma,
                px.lam,
                rep.r_tilde,
                r_theory,
                rep.q_indep,
                rep.s_dag,
                rep.path_overlap if rep.path_overlap is not None else "",
            ]
        )
    return rows


def _run_fig1(cfg: ExperimentConfig, out: Path) -> list[Path]:
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _fig1_trial(cfg, t), range(cfg.trials)))
    else:
        chunks = [_fig1_trial(cfg, t) for t in range(cfg.trials)]
    rows = [row for chunk in chunks for row in chunk]
    path = out / "fig1_overlap.csv"
    _write_csv(path, FIG1_HEADER, rows)
    return [path]


def _run_heatmap_gamma(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = [
        [lam, gamma, tree_overlap_curve(lam, gamma, rho=1.0)]
        for gamma in cfg.gamma_grid
        for lam in cfg.lambda_grid
    ]
    path = out / "heatmap_gamma.csv"
    _write_csv(path, ["lambda", "gamma", "value"], rows)
    return [path]


def _run_heatmap_rho(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = [
        [lam, rho, tree_overlap_curve(lam, 0.0, rho=rho)]
        for rho in cfg.rho_grid
        for lam in cfg.lambda_grid
    ]
    path = out / "heatmap_rho.csv"
    _write_csv(path, ["lambda", "rho", "value"], rows)
    return [path]


def _run_phase_diagram(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = []
    for delta in cfg.delta_grid:
        for kappa in cfg.kappa_grid:
            bc = critical_beta(delta, kappa)
            if delta == 1.0:
                regime = "always-low"
            elif kappa <= 1.0:
                regime = "always-low"
            else:
                regime = "transition"
            rows.append([delta, kappa, bc, regime])
    path = out / "phase_diagram.csv"
    _write_csv(path, ["delta", "kappa", "beta_c", "regime"], rows)
    return [path]


def _run_fpp_curves(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = []
    for beta in cfg.beta_grid:
        vals = fpp_curve(cfg.lam, cfg.delta, beta, np.array(cfg.r_grid))
        for r, v in zip(cfg.r_grid, vals):
            rows.append([cfg.lam, cfg.delta, beta, r, float(v)])
    path = out / "fpp_curves.csv"
    _write_csv(path, ["lambda", "delta", "beta", "r", "value"], rows)
    return [path]


def _replica_trial(cfg: ExperimentConfig, trial: int) -> list:
    seed = cfg.seed + trial
    g = gen_er(cfg.n, cfg.q, seed)
    L = bfs_layers(g, 0)
    M = shortest_path_dag(L)
    T1 = uniform_spt_sample(M, seed * 31 + 1)
    T2 = uniform_spt_sample(M, seed * 31 + 2)
    mask = T1.in_component.copy()
    mask[0] = False
    verts = np.flatnonzero(mask)
    emp = float(np.mean(T1.parent[verts] == T2.parent[verts]))
    px = proxies(cfg.n, cfg.q)
    return [seed, px.lam, emp, replica_overlap(px.lam, cfg.beta)]


def _run_replica(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = [_replica_trial(cfg, t) for t in range(cfg.trials)]
    path = out / "replica.csv"
    _write_csv(path, ["seed", "lambda", "overlap_emp", "overlap_theory"], rows)
    return [path]


def _run_appendix_f(cfg: ExperimentConfig, out: Path) -> list[Path]:
    times, traj = projected_gradient_flow(np.zeros(4), cfg.dt, cfg.t_max)
    corner = np.array([1.0, 1.0, -1.0, -1.0])
    dists = np.abs(traj - corner).max(axis=1)
    hit = np.flatnonzero(dists < 1e-9)  # clipping lands exactly on the face
    t_star = float(times[hit[0]]) if hit.size else math.nan
    table = vertex_table_from_f(f_multilinear, 4)
    r_grid = np.array(cfg.r_grid)
    finf = np.array([f_infinity(r) for r in r_grid])
    fpp = ising_fpp(cfg.m_blocks, cfg.beta, r_grid)
    flow_path = out / "appendixF_flow.csv"
    _write_csv(
        flow_path,
        ["t", "x", "y", "z", "w"],
        [[t, *map(float, row)] for t, row in zip(times[::25], traj[::25])],
    )
    fpp_path = out / "appendixF_fpp.csv"
    _write_csv(
        fpp_path,
        ["r", "f_infinity", "ising_fpp"],
        [[r, fi, fp] for r, fi, fp in zip(r_grid, finf, fpp)],
    )
    payload = {
        "t_star": t_star,
        "flow_endpoint": [float(x) for x in traj[-1]],
        "lovasz_at_zero": lovasz_extension(table, np.zeros(4)),
        "f_vertex_values": {
            "(1,1,1,1)": f_multilinear([1, 1, 1, 1]),
            "(-1,-1,-1,-1)": f_multilinear([-1, -1, -1, -1]),
            "(1,1,-1,-1)": f_multilinear([1, 1, -1, -1]),
        },
        "f_inf_table": {f"{r:.3f}": f_infinity(r) for r in (-1.0, -0.5, 0.0, 0.5, 1.0)},
        "beta": cfg.beta,
        "m_blocks": cfg.m_blocks,
    }
    json_path = out / "appendixF.json"
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return [flow_path, fpp_path, json_path]


def _run_gibbs_summary(cfg: ExperimentConfig, out: Path) -> list[Path]:
    g = gen_er(cfg.n, cfg.q, cfg.seed)
    L = bfs_layers(g, 0)
    stats = graph_stats(g, cfg.q, L)
    e0 = ground_energy(L)
    entries = []
    for beta in cfg.beta_grid:
        conf = gibbs_config(cfg.n, beta)
        phi = phi_tilde_opt(stats, beta)
        lz = log_z_formula(stats, beta)
        # a few Gibbs-typical samples through the kernel-size mixture
        gen = _rng.stream(cfg.seed, _rng.TAG_TRIAL, int(beta * 1000))
        energies = []
        witnesses = []
        for _ in range(4):
            A = tau_sample(
                phi.m_star_numeric,
                stats.par_sizes.astype(float),
                gen,
                vertices=stats.layer_vertices,
            )
            T = sample_cond_ground(A, L, g, stats.d_star, gen)
            energies.append(T.energy())
            witnesses.append(witness_statistic(T, L, stats.d_star))
        entries.append(
            {
                "beta": beta,
                "beta_bar": conf.beta_bar,
                "m_star_numeric": phi.m_star_numeric,
                "m_star_formula": phi.m_star_formula,
                "logZ_formula": lz.value,
                "energy_mean": float(np.mean(energies)),
                "ground_energy": e0,
                "witness_mean": float(np.mean(witnesses)),
                "regime": lz.regime,
                "near_critical": lz.near_critical,
            }
        )
    path = out / "gibbs_summary.json"
    path.write_text(json.dumps(entries, indent=2, sort_keys=True) + "\n")
    return [path]
