"""Finite-temperature Gibbs measures over spanning trees: kernels and
conditional samplers, kernel-size mixtures, the one-dimensional free-energy
optimization, single-site Markov chain dynamics, exact small-graph oracles,
witness statistics, empirical Franz-Parisi windows, and the companion Gibbs
measure on walks.

A tree's weight is exp(-beta_bar * sum_v depth(v)) with beta_bar the inverse
temperature scaled by log log n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .graphs import Graph, LayerDecomposition, Proxies, UNREACHABLE, proxies as _proxies
from .numerics import log_esp, lse_m, weighted_subset_dp, ztp_sample
from .trees import ParentMap, _depths_from_parents


@dataclass(frozen=True)
class GibbsConfig:
    beta: float
    beta_bar: float
    root: int = 0


def gibbs_config(n: int, beta: float, root: int = 0) -> GibbsConfig:
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return GibbsConfig(beta=beta, beta_bar=beta * math.log(math.log(n)), root=root)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def residual_component_labels(g: Graph, L: LayerDecomposition, d_star: int) -> np.ndarray:
    """Connected-component labels of the subgraph induced on vertices at
    distance >= d_star from the root (-1 off the residual set)."""
    residual = (L.dist >= d_star) & (L.dist != UNREACHABLE)
    labels = np.full(g.n, -1, dtype=np.int64)
    next_label = 0
    for v in np.flatnonzero(residual):
        if labels[v] >= 0:
            continue
        stack = [int(v)]
        labels[v] = next_label
        while stack:
            x = stack.pop()
            for u in g.neighbors(x):
                if residual[u] and labels[u] < 0:
                    labels[u] = next_label
                    stack.append(int(u))
        next_label += 1
    return labels


def kernel_of(T: ParentMap, L: LayerDecomposition, d_star: int) -> np.ndarray:
    """Vertices at graph distance d_star whose tree parent sits at d_star - 1."""
    verts = []
    for v in T.component_vertices():
        if v == T.root:
            continue
        if L.dist[v] == d_star and L.dist[T.parent[v]] == d_star - 1:
            verts.append(int(v))
    return np.array(sorted(verts), dtype=np.int64)


def kernel_valid(A: np.ndarray, L: LayerDecomposition, g: Graph, d_star: int) -> bool:
    """True iff A is a subset of the d_star layer hitting every connected
    component of the residual subgraph (vertices at distance >= d_star)."""
    A = np.asarray(A, dtype=np.int64)
    if A.size and not np.all(L.dist[A] == d_star):
        return False
    labels = residual_component_labels(g, L, d_star)
    n_comp = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 0
    if n_comp == 0:
        return True
    hit = np.zeros(n_comp, dtype=bool)
    if A.size:
        hit[labels[A]] = True
    return bool(hit.all())


def kernel_distance(g: Graph, L: LayerDecomposition, A: np.ndarray, d_star: int) -> np.ndarray:
    """Multi-source BFS distance to A inside the residual subgraph
    (UNREACHABLE elsewhere); kernel members sit at distance zero."""
    residual = (L.dist >= d_star) & (L.dist != UNREACHABLE)
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    frontier = [int(v) for v in A]
    dist[np.asarray(A, dtype=np.int64)] = 0
    d = 0
    while frontier:
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if residual[u] and dist[u] == UNREACHABLE:
                    dist[u] = d + 1
                    nxt.append(int(u))
        frontier = nxt
        d += 1
    return dist


def sample_cond_ground(
    A: np.ndarray,
    L: LayerDecomposition,
    g: Graph,
    d_star: int,
    seed_or_gen,
) -> ParentMap:
    """Sample the minimum-energy tree law conditioned on the kernel being A.

    Vertices below the d_star layer and the kernel members pick a uniform
    graph parent; every other residual vertex points one step down the
    residual geodesic toward A, chosen uniformly among such neighbors.
    """
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_TAU, 1)
    if not kernel_valid(A, L, g, d_star):
        raise ValueError("invalid kernel: must hit every residual component")
    n = g.n
    parent = np.full(n, -1, dtype=np.int64)
    parent[L.root] = L.root
    in_A = np.zeros(n, dtype=bool)
    in_A[np.asarray(A, dtype=np.int64)] = True
    dA = kernel_distance(g, L, A, d_star)
    residual = (L.dist >= d_star) & (L.dist != UNREACHABLE)
    for v in np.flatnonzero(L.reachable):
        if v == L.root:
            continue
        if (L.dist[v] <= d_star - 1) or in_A[v]:
            sup = L.parents(v)
        else:
            nbr = g.neighbors(v)
            sup = nbr[(dA[nbr] == dA[v] - 1) & residual[nbr]]
        parent[v] = sup[gen.integers(sup.size)]
    dist_T = _depths_from_parents(parent, L.root)
    return ParentMap(root=L.root, parent=parent, dist_T=dist_T)


def cond_ground_min_energy(L: LayerDecomposition, g: Graph, A: np.ndarray, d_star: int) -> int:
    """sum_v d_A(v): the minimum energy attainable with kernel A."""
    dA = kernel_distance(g, L, A, d_star)
    total = 0
    for v in np.flatnonzero(L.reachable):
        if L.dist[v] <= d_star - 1:
            total += int(L.dist[v])
        else:
            total += d_star + int(dA[v])
    return total


# ---------------------------------------------------------------------------
# Kernel-size mixture sampling
# ---------------------------------------------------------------------------

_DP_BUDGET = 1_000_000  # N*m cells above which the tilt-and-reject route kicks in


def _solve_tilt(w: np.ndarray, m: int) -> np.ndarray:
    """Inclusion probabilities p_i = t w_i / (1 + t w_i) with sum p = m."""
    lo, hi = -60.0, 60.0

    def s(log_t: float) -> float:
        tw = np.exp(log_t) * w
        return float(np.sum(tw / (1.0 + tw)))

    while s(lo) > m:
        lo -= 30.0
    while s(hi) < m:
        hi += 30.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if s(mid) < m:
            lo = mid
        else:
            hi = mid
    tw = math.exp(0.5 * (lo + hi)) * w
    return tw / (1.0 + tw)


def tau_sample(
    m: int,
    weights: np.ndarray,
    seed_or_gen,
    vertices: np.ndarray | None = None,
    is_valid=None,
    max_reject_rate: float | None = 0.01,
) -> np.ndarray:
    """Sample an m-subset with probability proportional to the product of its
    weights.

    Small instances run the exact elementary-symmetric backward sampler;
    large ones draw independent tilted Bernoullis conditioned on the subset
    size, which realizes the same law. Subsets failing is_valid are rejected
    and redrawn; a rejection rate above max_reject_rate aborts with
    diagnostics (it signals the subset size is pressed against its floor).
    """
    w = np.asarray(weights, dtype=float)
    N = w.size
    if not (0 <= m <= N):
        raise ValueError(f"need 0 <= m <= {N}, got {m}")
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_TAU)
    if m == N:
        idx = np.arange(N, dtype=np.int64)
        return vertices[idx] if vertices is not None else idx

    use_dp = N * (m + 1) <= _DP_BUDGET
    dp = weighted_subset_dp(w, m) if use_dp else None
    probs = None if use_dp else _solve_tilt(w, m)

    draws = 0
    rejects = 0
    while True:
        if use_dp:
            idx = dp.sample(gen)
        else:
            while True:
                x = gen.random(N) < probs
                if int(x.sum()) == m:
                    idx = np.flatnonzero(x)
                    break
        draws += 1
        subset = vertices[idx] if vertices is not None else idx
        if is_valid is None or is_valid(subset):
            return subset
        rejects += 1
        if max_reject_rate is not None and draws >= 100 and rejects / draws > max_reject_rate:
            raise RuntimeError(
                f"kernel rejection rate {rejects}/{draws} exceeds {max_reject_rate:.2%}; "
                f"subset size m={m} is too close to the minimum feasible size"
            )


# ---------------------------------------------------------------------------
# m-wise LogSumExp and the kernel entropy function
# ---------------------------------------------------------------------------


def psi1(lam: float) -> float:
    """E[log X] for X positive-conditioned Poisson(log(1/lam))."""
    from .theory import _pois_support

    mu = math.log(1.0 / lam)
    ks, p = _pois_support(mu)
    ks, p = ks[1:], p[1:] / (1.0 - math.exp(-mu))
    return float(np.sum(p * np.log(ks)))


def psi0(lam: float) -> float:
    """E[log(X v 1)] for X ~ Poisson(log(1/lam))."""
    from .theory import _pois_support

    mu = math.log(1.0 / lam)
    ks, p = _pois_support(mu)
    ks = np.maximum(ks, 1)
    return float(np.sum(p * np.log(ks)))


def psi_bounds(m: int, N: int, lam: float) -> tuple[float, float]:
    """Envelope for the expected m-wise LogSumExp of N positive-Poisson
    log-counts: [m psi1, N H(m/N) + m psi1]."""
    x = m / N
    H = 0.0
    if 0.0 < x < 1.0:
        H = -(x * math.log(x) + (1.0 - x) * math.log(1.0 - x))
    base = m * psi1(lam)
    return base, base + N * H


def psi_estimate(m: int, N: int, lam: float, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of the expected m-wise LogSumExp of N i.i.d.
    positive-Poisson(log(1/lam)) log-counts; returns (mean, standard error)."""
    if N * (m + 1) > 50_000_000:
        raise ValueError(
            "N*m exceeds the exact-DP budget; use psi_bounds for an envelope instead"
        )
    gen = _rng.stream(seed, _rng.TAG_PSI)
    mu = math.log(1.0 / lam)
    vals = np.empty(samples)
    for i in range(samples):
        xs = ztp_sample(mu, gen, size=N)
        vals[i] = lse_m(np.log(xs.astype(float)), m)
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return float(vals.mean()), se


# ---------------------------------------------------------------------------
# Graph statistics and the one-dimensional optimization
# ---------------------------------------------------------------------------


@dataclass
class GraphStats:
    """Everything the free-energy formulas need to know about one graph."""

    n: int
    q: float
    d_star: int
    N_d_star: int
    N_d_star_plus1: int
    layer_vertices: np.ndarray  # the d_star layer, sorted
    par_sizes: np.ndarray  # |par_G(v)| aligned with layer_vertices
    m0: int
    proxies: Proxies
    m_ell: int  # diagnostic floor used by the asymptotic analysis

    @property
    def ground_state_kernel(self) -> np.ndarray:
        return self.layer_vertices


def graph_stats(g: Graph, q: float, L: LayerDecomposition) -> GraphStats:
    px = _proxies(g.n, q)
    d = px.d_star
    nd = int(L.sizes[d]) if d < len(L.sizes) else 0
    nd1 = int(L.sizes[d + 1]) if d + 1 < len(L.sizes) else 0
    layer = L.layers[d] if d < len(L.layers) else np.empty(0, dtype=np.int64)
    par_sizes = np.diff(L.par_indptr)[layer] if layer.size else np.empty(0, dtype=np.int64)
    labels = residual_component_labels(g, L, d)
    m0 = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 0
    lln = math.log(math.log(g.n))
    m_ell = max(m0, math.ceil(g.n / (3.0 * lln**2)))
    return GraphStats(
        n=g.n,
        q=q,
        d_star=d,
        N_d_star=nd,
        N_d_star_plus1=nd1,
        layer_vertices=layer,
        par_sizes=par_sizes,
        m0=m0,
        proxies=px,
        m_ell=m_ell,
    )


@dataclass(frozen=True)
class PhiTildeResult:
    m_star_numeric: int
    value: float
    m_star_formula: int
    regime: str
    near_critical: bool
    curve_m: np.ndarray
    curve_value: np.ndarray


def _regime(stats: GraphStats, beta: float) -> tuple[str, bool]:
    px = stats.proxies
    beta_c_n = 1.0 - px.delta - 1.0 / px.kappa
    near = abs(beta - beta_c_n) < 0.05
    return ("low" if beta > beta_c_n else "high"), near


def phi_tilde_opt(stats: GraphStats, beta: float) -> PhiTildeResult:
    """Maximize the kernel-size free energy
    Phi(m) = LSE_m(log parent counts) + (n - m) log(m q) + beta_bar m
             - beta_bar (d_star + 1) n
    over m in [max(m0, 1), N_{d_star}], and also report the closed-form
    optimizer for the current temperature regime.

    The entropy term uses the realized parent-count multiset of the graph at
    hand (its expectation version concentrates on the same values).
    """
    n, q = stats.n, stats.q
    N = stats.N_d_star
    if N == 0:
        raise ValueError("empty d_star layer")
    beta_bar = beta * math.log(math.log(n))
    px = stats.proxies
    lo = max(stats.m0, 1)
    if N * (N + 1) <= 50_000_000:
        log_e = log_esp(np.log(stats.par_sizes.astype(float)), N)
        ms = np.arange(lo, N + 1)
        entropy = log_e[ms]
    else:
        # beyond the exact-DP budget: envelope midpoint for the subset
        # entropy, exact at m = N where the envelope collapses
        ms = np.unique(np.concatenate([np.linspace(lo, N, 2000).astype(np.int64), [N]]))
        lw = np.log(stats.par_sizes.astype(float))
        mean_lw = float(lw.mean())
        x = ms / N
        H = np.zeros_like(x)
        inner = (x > 0) & (x < 1)
        H[inner] = -(x[inner] * np.log(x[inner]) + (1 - x[inner]) * np.log(1 - x[inner]))
        entropy = ms * mean_lw + 0.5 * N * H
        entropy[-1] = float(lw.sum())
    vals = (
        entropy
        + (n - ms) * np.log(ms * q)
        + beta_bar * ms
        - beta_bar * (stats.d_star + 1) * n
    )
    k = int(np.argmax(vals))
    regime, near = _regime(stats, beta)
    if regime == "low":
        m_formula = N
    else:
        m_formula = int(N // ((1.0 - px.delta - beta) * px.kappa))
        m_formula = max(min(m_formula, N), 1)
    return PhiTildeResult(
        m_star_numeric=int(ms[k]),
        value=float(vals[k]),
        m_star_formula=m_formula,
        regime=regime,
        near_critical=near,
        curve_m=ms,
        curve_value=vals,
    )


@dataclass(frozen=True)
class LogZFormula:
    value: float
    regime: str
    near_critical: bool


def log_z_formula(stats: GraphStats, beta: float) -> LogZFormula:
    """Asymptotic log partition function in the phase of the given beta.

    Low phase:  n psi0 + lam n log(alpha (1-lam) log n) - beta_bar (d* + lam) n.
    High phase: n log(alpha log n / ((1 - Delta - beta) log log n)) - n
                - beta_bar (d* + 1) n.
    Values inside the near-critical band carry a warning flag (the formulas
    exclude that band).
    """
    n = stats.n
    px = stats.proxies
    lam, delta, alpha = px.lam, px.delta, px.alpha
    beta_bar = beta * math.log(math.log(n))
    regime, near = _regime(stats, beta)
    if regime == "low":
        val = (
            n * psi0(lam)
            + lam * n * math.log(alpha * (1.0 - lam) * math.log(n))
            - beta_bar * (stats.d_star + lam) * n
        )
    else:
        val = (
            n * math.log(alpha * math.log(n) / ((1.0 - delta - beta) * math.log(math.log(n))))
            - n
            - beta_bar * (stats.d_star + 1) * n
        )
    return LogZFormula(value=val, regime=regime, near_critical=near)


# ---------------------------------------------------------------------------
# Energies
# ---------------------------------------------------------------------------


def ground_energy(L: LayerDecomposition) -> int:
    """sum of graph distances over the root's component."""
    mask = L.reachable
    return int(L.dist[mask].sum())


def energy(T: ParentMap) -> int:
    return T.energy()


# ---------------------------------------------------------------------------
# Exact small-graph oracle
# ---------------------------------------------------------------------------


@dataclass
class ExactGibbs:
    """Exhaustive enumeration of the spanning trees of the root's component
    with their Gibbs weights."""

    root: int
    component: np.ndarray
    trees: list[tuple[int, ...]]  # full parent vectors, -1 off component
    energies: np.ndarray
    beta_bar: float
    log_z: float
    probs: np.ndarray

    def law(self) -> dict[tuple[int, ...], float]:
        return {t: float(p) for t, p in zip(self.trees, self.probs)}

    def z_by_kernel_size(self, L: LayerDecomposition, d_star: int) -> dict[int, float]:
        """log Z restricted to trees of each kernel size."""
        buckets: dict[int, list[float]] = {}
        for t, e in zip(self.trees, self.energies):
            T = ParentMap(self.root, np.array(t), _depths_from_parents(np.array(t), self.root))
            m = kernel_of(T, L, d_star).size
            buckets.setdefault(int(m), []).append(-self.beta_bar * float(e))
        out = {}
        for m, vals in buckets.items():
            arr = np.array(vals)
            mx = arr.max()
            out[m] = float(mx + math.log(np.sum(np.exp(arr - mx))))
        return out


def enumerate_parent_maps(g: Graph, root: int, budget: int = 5_000_000):
    """Yield every spanning tree of root's component as a full parent vector.

    Depth-first over per-vertex parent choices, pruning any prefix whose
    assigned pointers already close a cycle; refuses when the raw product of
    degrees exceeds the budget.
    """
    from .graphs import bfs_layers

    L = bfs_layers(g, root)
    comp = np.flatnonzero(L.reachable)
    others = [int(v) for v in comp if v != root]
    size = 1
    for v in others:
        size *= g.degree(v)
        if size > budget:
            raise ValueError(
                f"too many candidate parent maps (> {budget}); component size "
                f"{comp.size} is beyond exhaustive enumeration"
            )
    nbrs = [list(map(int, g.neighbors(v))) for v in others]
    n = g.n
    parent = [-1] * n
    parent[root] = root

    def creates_cycle(v: int) -> bool:
        x = parent[v]
        while x != root and x != -1:
            if x == v:
                return True
            x = parent[x]
        return False

    def rec(i: int):
        if i == len(others):
            yield tuple(parent)
            return
        v = others[i]
        for u in nbrs[i]:
            parent[v] = u
            if not creates_cycle(v):
                yield from rec(i + 1)
        parent[v] = -1

    yield from rec(0)


def exact_z_bruteforce(g: Graph, root: int, beta_bar: float) -> ExactGibbs:
    """Exact log partition function and Gibbs law for component size <= 9."""
    from .graphs import bfs_layers

    L = bfs_layers(g, root)
    comp = np.flatnonzero(L.reachable)
    if comp.size > 9:
        raise ValueError(f"component size {comp.size} exceeds the exact-oracle cap of 9")
    trees = list(enumerate_parent_maps(g, root))
    energies = np.empty(len(trees))
    for i, t in enumerate(trees):
        parr = np.array(t)
        d = _depths_from_parents(parr, root)
        energies[i] = d[parr >= 0].sum()
    logw = -beta_bar * energies
    mx = logw.max()
    log_z = float(mx + math.log(np.sum(np.exp(logw - mx))))
    probs = np.exp(logw - log_z)
    return ExactGibbs(
        root=root,
        component=comp,
        trees=trees,
        energies=energies,
        beta_bar=beta_bar,
        log_z=log_z,
        probs=probs,
    )


def exact_gibbs_law(g: Graph, root: int, beta_bar: float) -> dict[tuple[int, ...], float]:
    return exact_z_bruteforce(g, root, beta_bar).law()


# ---------------------------------------------------------------------------
# Single-site dynamics
# ---------------------------------------------------------------------------


@dataclass
class GlauberResult:
    final: ParentMap
    samples: list[tuple[int, ...]]
    energies: np.ndarray
    moves: list[tuple[int, int, int, float]] = field(default_factory=list)


def glauber_run(
    g: Graph,
    root: int,
    beta_bar: float,
    steps: int,
    seed_or_gen,
    init: ParentMap | None = None,
    burn_in: int = 0,
    record_every: int = 1,
    log_moves: bool = False,
) -> GlauberResult:
    """Heat-bath dynamics on rooted spanning trees of root's component.

    Each step picks a non-root vertex v uniformly and resamples its parent
    among graph neighbors outside v's subtree, with conditional weights
    exp(-beta_bar * |subtree(v)| * (depth(u) + 1)); this is the exact Gibbs
    conditional, so the chain is reversible for the tree Gibbs measure.
    Energy is maintained incrementally as subtree size times depth change.
    """
    from .graphs import bfs_layers

    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_GLAUBER)
    L = bfs_layers(g, root)
    if init is None:
        from .trees import shortest_path_dag, _sample_product

        init = _sample_product(shortest_path_dag(L), gen)
    T = init.copy()
    comp = [int(v) for v in T.component_vertices()]
    movable = [v for v in comp if v != root]
    children: list[list[int]] = [[] for _ in range(g.n)]
    for v in movable:
        children[T.parent[v]].append(v)
    cur_energy = T.energy()
    samples: list[tuple[int, ...]] = []
    energies = []
    moves = []
    for step in range(steps):
        v = movable[gen.integers(len(movable))]
        sub = [v]
        stack = [v]
        while stack:
            x = stack.pop()
            for c in children[x]:
                sub.append(c)
                stack.append(c)
        sub_set = set(sub)
        cands = [int(u) for u in g.neighbors(v) if T.dist_T[u] != UNREACHABLE and int(u) not in sub_set]
        if cands:
            depths = np.array([T.dist_T[u] + 1 for u in cands], dtype=float)
            logw = -beta_bar * len(sub) * depths
            logw -= logw.max()
            w = np.exp(logw)
            w /= w.sum()
            pick = int(np.searchsorted(np.cumsum(w), gen.random()))
            pick = min(pick, len(cands) - 1)
            u = cands[pick]
            old = int(T.parent[v])
            if u != old:
                children[old].remove(v)
                children[u].append(v)
                T.parent[v] = u
                delta = int(T.dist_T[u] + 1 - T.dist_T[v])
                for w_ in sub:
                    T.dist_T[w_] += delta
                cur_energy += len(sub) * delta
                if log_moves:
                    moves.append((v, old, u, float(w[pick])))
        if step >= burn_in and (step - burn_in) % record_every == 0:
            samples.append(tuple(int(p) for p in T.parent))
            energies.append(cur_energy)
    return GlauberResult(final=T, samples=samples, energies=np.array(energies), moves=moves)


def gumbel_max_sample(log_weights: np.ndarray, seed_or_gen) -> int:
    """argmax of log-weights plus i.i.d. standard Gumbel noise; the law of the
    winner is the softmax of the log-weights."""
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_GUMBEL)
    lw = np.asarray(log_weights, dtype=float)
    return int(np.argmax(lw + gen.gumbel(size=lw.size)))


# ---------------------------------------------------------------------------
# Witness statistic
# ---------------------------------------------------------------------------


def witness_statistic(T: ParentMap, L: LayerDecomposition, d_star: int) -> float:
    """Children-count deviation over the d_star layer:
    sum_{v in layer} | #children_T(v) - N_{d*+1}/N_{d*} |.
    Reassigning one tree edge moves this by at most 2 (two terms change by 1).
    """
    layer = L.layers[d_star] if d_star < len(L.layers) else np.empty(0, dtype=np.int64)
    if layer.size == 0:
        return 0.0
    nd1 = float(L.sizes[d_star + 1]) if d_star + 1 < len(L.sizes) else 0.0
    ratio = nd1 / layer.size
    ch = T.children_counts()
    return float(np.abs(ch[layer] - ratio).sum())


# ---------------------------------------------------------------------------
# Empirical Franz-Parisi windows
# ---------------------------------------------------------------------------


def tree_overlap_fraction(center: ParentMap, parent: np.ndarray) -> float:
    """Fraction of non-root component vertices with identical parents."""
    mask = center.in_component.copy()
    mask[center.root] = False
    verts = np.flatnonzero(mask)
    agree = int(np.sum(center.parent[verts] == parent[verts]))
    return agree / verts.size


def fpp_empirical(
    g: Graph,
    root: int,
    beta_bar: float,
    center: ParentMap,
    r: float,
    eps: float,
) -> float:
    """log of the Gibbs mass (unnormalized) of spanning trees whose overlap
    with the center lies in [r - eps, r + eps]; -inf when the window is empty.
    Component size is capped at 9 (exhaustive enumeration)."""
    ex = exact_z_bruteforce(g, root, beta_bar)
    terms = []
    for t, e in zip(ex.trees, ex.energies):
        ov = tree_overlap_fraction(center, np.array(t))
        if r - eps <= ov <= r + eps:
            terms.append(-beta_bar * float(e))
    if not terms:
        return -math.inf
    arr = np.array(terms)
    mx = arr.max()
    return float(mx + math.log(np.sum(np.exp(arr - mx))))


# ---------------------------------------------------------------------------
# Gibbs measure on walks
# ---------------------------------------------------------------------------


def _walk_log_counts(g: Graph, s: int, max_len: int) -> np.ndarray:
    """logcounts[l, v] = log #walks of length l from s to v (-inf if none)."""
    n = g.n
    E = int(g.indices.size)
    table = np.full((max_len + 1, n), -math.inf)
    table[0, s] = 0.0
    starts = g.indptr[:-1]
    nonempty = np.diff(g.indptr) > 0
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    red_starts = starts.clip(max=max(E - 1, 0))
    for level in range(1, max_len + 1):
        prev = table[level - 1]
        contrib = prev[g.indices]
        if not np.any(contrib != -math.inf):
            break
        # segment logsumexp over the contiguous CSR rows
        mx = np.full(n, -math.inf)
        if E:
            red = np.maximum.reduceat(contrib, red_starts)
            mx[nonempty] = red[nonempty]
        ok = nonempty & (mx != -math.inf)
        safe_mx = np.where(mx[rows] == -math.inf, 0.0, mx[rows])
        arg = np.where(contrib != -math.inf, contrib - safe_mx, -math.inf)
        shifted = np.exp(arg)
        out = np.full(n, -math.inf)
        if E:
            sums = np.add.reduceat(shifted, red_starts)
            out[ok] = mx[ok] + np.log(sums[ok])
        table[level] = out
    return table


def path_partition_function(g: Graph, s: int, t: int, beta: float, max_len: int) -> float:
    """log sum over walks s -> t of length <= max_len of log(n)^(-beta * len).

    -inf when t is not reachable within max_len.
    """
    if max_len > g.n - 1:
        raise ValueError("max_len must be at most n - 1")
    table = _walk_log_counts(g, s, max_len)
    lln = math.log(math.log(g.n))
    vals = table[:, t] - beta * lln * np.arange(max_len + 1)
    finite = vals[vals != -math.inf]
    if finite.size == 0:
        return -math.inf
    mx = finite.max()
    return float(mx + math.log(np.sum(np.exp(finite - mx))))


def path_gibbs_sample(
    g: Graph, s: int, t: int, beta: float, max_len: int, seed_or_gen, table: np.ndarray | None = None
) -> list[int]:
    """Draw one walk from the Gibbs measure over s->t walks by backward
    dynamic programming on the walk-count table.

    Pass table=_walk_log_counts(g, s, max_len) to amortize the forward pass
    over many draws with the same source.
    """
    if max_len > g.n - 1:
        raise ValueError("max_len must be at most n - 1")
    gen = seed_or_gen if isinstance(seed_or_gen, np.random.Generator) else _rng.stream(seed_or_gen, _rng.TAG_PATH_GIBBS)
    if table is None:
        table = _walk_log_counts(g, s, max_len)
    lln = math.log(math.log(g.n))
    lens = np.arange(max_len + 1)
    logp = table[:, t] - beta * lln * lens
    if np.all(logp == -math.inf):
        raise ValueError("target unreachable within max_len")
    logp = logp - logp[logp != -math.inf].max()
    p = np.exp(logp)
    p /= p.sum()
    length = int(gen.choice(max_len + 1, p=p))
    walk = [t]
    v = t
    for level in range(length, 0, -1):
        nbrs = g.neighbors(v)
        lw = table[level - 1, nbrs]
        lw = lw - lw[lw != -math.inf].max()
        w = np.exp(lw)
        w /= w.sum()
        v = int(nbrs[gen.choice(nbrs.size, p=w)])
        walk.append(v)
    walk.reverse()
    return walk
