"""Sparse random graphs, correlated resampling, BFS layers, and regime proxies.

Vertices are integer IDs 0..n-1; the designated source vertex is ID 0 unless
stated otherwise (the one-line convention used across the whole package).
Graphs are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng

UNREACHABLE = np.iinfo(np.int64).max


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph in CSR form; neighbor lists sorted by ID."""

    n: int
    indptr: np.ndarray  # len n+1
    indices: np.ndarray  # len 2m, sorted within each row

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_set(self) -> set[tuple[int, int]]:
        """Set of undirected edges as (u, v) with u < v. Intended for small graphs."""
        out = set()
        for v in range(self.n):
            for u in self.neighbors(v):
                if v < u:
                    out.add((v, int(u)))
        return out

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of undirected edges with u < v, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)


def graph_from_edges(n: int, edges: np.ndarray) -> Graph:
    """Build a Graph from an (m, 2) array of undirected edges (self-loop free)."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size:
        u = np.concatenate([edges[:, 0], edges[:, 1]])
        v = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        # drop duplicate directed entries so parallel input edges collapse
        keep = np.ones(u.size, dtype=bool)
        keep[1:] = (u[1:] != u[:-1]) | (v[1:] != v[:-1])
        u, v = u[keep], v[keep]
        counts = np.bincount(u, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return Graph(n=n, indptr=indptr.astype(np.int64), indices=v)
    return Graph(n=n, indptr=np.zeros(n + 1, dtype=np.int64), indices=np.empty(0, dtype=np.int64))


def graph_from_adj(adj: list[list[int]]) -> Graph:
    n = len(adj)
    edges = [(v, u) for v in range(n) for u in adj[v] if v < u]
    return graph_from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def _decode_pair_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices over the upper triangle {(u,v): u<v} back to pairs.

    Index layout: row u owns indices [S(u), S(u+1)) with S(u) = u*n - u*(u+1)/2.
    """
    k = k.astype(np.float64)
    # solve u from S(u) <= k: u = floor(((2n-1) - sqrt((2n-1)^2 - 8k)) / 2)
    b = 2.0 * n - 1.0
    u = np.floor((b - np.sqrt(b * b - 8.0 * k)) / 2.0).astype(np.int64)
    # float sqrt can be off by one near row boundaries; fix with exact integer check
    k = k.astype(np.int64)

    def row_start(uu: np.ndarray) -> np.ndarray:
        return uu * n - (uu * (uu + 1)) // 2

    u = np.maximum(u, 0)
    over = row_start(u) > k
    u[over] -= 1
    under = row_start(u + 1) <= k
    u[under] += 1
    v = k - row_start(u) + u + 1
    return u, v


def _sample_pair_subset(n: int, p: float, gen: np.random.Generator) -> np.ndarray:
    """Linear indices of an independent Bernoulli(p) subset of all vertex pairs.

    Geometric skipping, so the cost is proportional to the output size rather
    than to n^2.
    """
    total = n * (n - 1) // 2
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    # expected number of hits is total*p; draw skips in batches
    batch = max(1024, int(total * p * 1.2) + 16)
    while pos < total:
        skips = gen.geometric(p, size=batch).astype(np.int64)
        hits = pos + np.cumsum(skips)
        out.append(hits)
        pos = int(hits[-1])
    hits = np.concatenate(out)
    return hits[hits < total]


def gen_er(n: int, q: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, q): each unordered pair is an edge with probability q."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not (0.0 < q < 1.0):
        raise ValueError(f"need 0 < q < 1, got {q}")
    gen = _rng.stream(seed, _rng.TAG_GEN_ER)
    idx = _sample_pair_subset(n, q, gen)
    u, v = _decode_pair_index(idx, n)
    return graph_from_edges(n, np.column_stack([u, v]))


# ---------------------------------------------------------------------------
# Correlated resampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelatedPair:
    """Two graphs on the same vertex set; g2 redraws each pair w.p. 1 - rho."""

    g1: Graph
    g2: Graph
    rho: float


def resample_pair(g1: Graph, q: float, rho: float, seed: int) -> Graph:
    """Redraw each vertex pair of g1 independently with probability 1 - rho.

    Kept pairs retain their g1 status; redrawn pairs become fresh Bernoulli(q)
    edges, so the output is marginally G(n, q) again.
    """
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"need 0 <= rho <= 1, got {rho}")
    if not (0.0 < q < 1.0):
        raise ValueError(f"need 0 < q < 1, got {q}")
    if rho == 1.0:
        return g1
    n = g1.n
    edges = g1.edge_array()
    gen_keep = _rng.stream(seed, _rng.TAG_RESAMPLE_KEEP)
    # existing edges: survive if kept, or if redrawn and fresh draw succeeds
    u1 = gen_keep.random(edges.shape[0])
    u2 = gen_keep.random(edges.shape[0])
    survive = (u1 < rho) | (u2 < q)
    kept = edges[survive]
    # non-edges: appear iff redrawn and fresh; rate (1-rho)*q over all pairs,
    # with pairs already in g1 dropped (their fate was decided above)
    gen_fresh = _rng.stream(seed, _rng.TAG_RESAMPLE_FRESH)
    idx = _sample_pair_subset(n, (1.0 - rho) * q, gen_fresh)
    fu, fv = _decode_pair_index(idx, n)
    if fu.size:
        g1_lin = edges[:, 0].astype(np.int64) * n + edges[:, 1]
        fresh_lin = fu * n + fv
        new_mask = ~np.isin(fresh_lin, g1_lin)
        fresh = np.column_stack([fu[new_mask], fv[new_mask]])
    else:
        fresh = np.empty((0, 2), dtype=np.int64)
    return graph_from_edges(n, np.vstack([kept, fresh]))


def correlated_pair(n: int, q: float, rho: float, seed: int) -> CorrelatedPair:
    g1 = gen_er(n, q, seed)
    g2 = resample_pair(g1, q, rho, seed + 1 if rho < 1.0 else seed)
    return CorrelatedPair(g1=g1, g2=g2, rho=rho)


@dataclass
class ResampleTrajectory:
    """Continuous-time pair resampling: pair (u,v) is redrawn once its clock
    T_uv in (0,1] has passed; snapshot(t) keeps base pairs with T > t and takes
    the fresh Bernoulli(q) value for pairs with T <= t.

    Clocks are stored only for pairs that can ever appear in a snapshot
    (base edges plus fresh-success pairs), so memory stays O(m).
    """

    base: Graph
    q: float
    times: dict[tuple[int, int], float] = field(default_factory=dict)
    _fresh_edge: set[tuple[int, int]] = field(default_factory=set)
    _base_edges: set[tuple[int, int]] = field(default_factory=set)

    def snapshot(self, t: float) -> Graph:
        if not (0.0 <= t < 1.0):
            raise ValueError(f"need 0 <= t < 1, got {t}")
        edges = []
        for (u, v), tau in self.times.items():
            if tau > t:
                present = (u, v) in self._base_edges
            else:
                present = (u, v) in self._fresh_edge
            if present:
                edges.append((u, v))
        arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
        return graph_from_edges(self.base.n, arr)

    def resampled_pairs(self, t: float) -> set[tuple[int, int]]:
        """Tracked pairs whose clock has fired by time t (monotone in t)."""
        return {pv for pv, tau in self.times.items() if tau <= t}


def trajectory(base: Graph, q: float, time_points: list[float], seed: int) -> ResampleTrajectory:
    """Attach resample clocks to base and pre-validate the requested times."""
    pts = list(time_points)
    if any(t2 <= t1 for t1, t2 in zip(pts, pts[1:])):
        raise ValueError("time points must be strictly increasing")
    if pts and (pts[0] < 0.0 or pts[-1] >= 1.0):
        raise ValueError("time points must lie in [0, 1)")
    n = base.n
    gen_t = _rng.stream(seed, _rng.TAG_TRAJ_TIMES)
    gen_f = _rng.stream(seed, _rng.TAG_TRAJ_FRESH)

    traj = ResampleTrajectory(base=base, q=q)
    edges = base.edge_array()
    # base edges: clock in (0, 1], fresh redraw value decided now
    tvals = 1.0 - gen_t.random(edges.shape[0])
    fresh = gen_t.random(edges.shape[0]) < q
    for (u, v), tau, fr in zip(edges, tvals, fresh):
        key = (int(u), int(v))
        traj.times[key] = float(tau)
        traj._base_edges.add(key)
        if fr:
            traj._fresh_edge.add(key)
    # non-edges that would enter if resampled: Bernoulli(q) subset of all pairs
    idx = _sample_pair_subset(n, q, gen_f)
    fu, fv = _decode_pair_index(idx, n)
    tnew = 1.0 - gen_f.random(fu.size)
    base_lin = set((int(u) * n + int(v)) for u, v in edges)
    for u, v, tau in zip(fu, fv, tnew):
        if int(u) * n + int(v) in base_lin:
            continue
        key = (int(u), int(v))
        traj.times[key] = float(tau)
        traj._fresh_edge.add(key)
    return traj


# ---------------------------------------------------------------------------
# BFS layers
# ---------------------------------------------------------------------------


@dataclass
class LayerDecomposition:
    """Exact distances from the root plus the layer and parent structure.

    dist uses UNREACHABLE as the out-of-component sentinel. parents(v) lists
    the neighbors of v one layer closer to the root, sorted by vertex ID.
    """

    root: int
    dist: np.ndarray
    layers: list[np.ndarray]
    sizes: np.ndarray
    par_indptr: np.ndarray
    par_indices: np.ndarray

    def parents(self, v: int) -> np.ndarray:
        return self.par_indices[self.par_indptr[v] : self.par_indptr[v + 1]]

    def parent_counts(self) -> np.ndarray:
        return np.diff(self.par_indptr)

    @property
    def reachable(self) -> np.ndarray:
        return self.dist != UNREACHABLE

    @property
    def component_size(self) -> int:
        return int(np.count_nonzero(self.reachable))


def _gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    starts = g.indptr[frontier]
    ends = g.indptr[frontier + 1]
    counts = ends - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    # multi-arange: positions starts[i] .. ends[i] for every frontier vertex
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    heads = np.cumsum(counts)[:-1]
    out[heads] = starts[1:] - ends[:-1] + 1
    return g.indices[np.cumsum(out)]


def bfs_layers(g: Graph, root: int) -> LayerDecomposition:
    """Layered BFS from root: exact distances, layer sets, and parent sets."""
    if root >= g.n or root < 0:
        raise ValueError(f"root {root} out of range for n={g.n}")
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[root] = 0
    layers = [np.array([root], dtype=np.int64)]
    frontier = layers[0]
    d = 0
    while frontier.size:
        nbr = _gather_neighbors(g, frontier)
        nxt = np.unique(nbr[dist[nbr] == UNREACHABLE])
        d += 1
        if nxt.size == 0:
            break
        dist[nxt] = d
        layers.append(nxt)
        frontier = nxt
    sizes = np.array([layer.size for layer in layers], dtype=np.int64)

    # parent sets: directed edges (u -> v) with dist[u] = dist[v] - 1
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    cols = g.indices
    ok = (dist[rows] != UNREACHABLE) & (dist[cols] != UNREACHABLE)
    par_mask = ok & (dist[cols] == dist[rows] - 1)
    counts = np.bincount(rows[par_mask], minlength=g.n)
    par_indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    # rows are emitted in CSR order, so indices are already grouped by vertex
    par_indices = cols[par_mask]
    return LayerDecomposition(
        root=root,
        dist=dist,
        layers=layers,
        sizes=sizes,
        par_indptr=par_indptr,
        par_indices=par_indices,
    )


# ---------------------------------------------------------------------------
# Proxies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Proxies:
    """Derived scalars that classify a graph's asymptotic regime."""

    n: int
    q: float
    alpha: float
    ell_star: float
    d_star: int
    delta: float
    lam: float
    kappa: float
    eta: float
    rho: float | None = None
    gamma: float | None = None
    xi: float | None = None


def proxies(n: int, q: float, rho: float | None = None) -> Proxies:
    """Evaluate the regime proxies exactly from their definitions."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"need 0 < q < 1, got {q}")
    nq = n * q
    if nq <= 1.0:
        raise ValueError(f"need n*q > 1 (sparse supercritical regime), got {nq}")
    ln = math.log(n)
    lln = math.log(ln)
    alpha = q * n / ln
    ell_star = ln / math.log(nq)
    # smallest integer d with (nq)^d >= n / (log log n)^2
    threshold = n / lln**2
    d_star = math.ceil(math.log(threshold) / math.log(nq))
    while nq**d_star < threshold:
        d_star += 1
    while d_star > 0 and nq ** (d_star - 1) >= threshold:
        d_star -= 1
    delta = d_star - ell_star
    lam = math.exp(-(nq**delta))
    kappa = (1.0 - lam) * lln
    eta = math.log(1.0 / lam) / (lam * nq)
    gamma = None
    xi = None
    if rho is not None:
        if not (0.0 <= rho <= 1.0):
            raise ValueError(f"need 0 <= rho <= 1, got {rho}")
        gamma = rho**d_star
        xi = lam ** (1.0 - gamma)
    return Proxies(
        n=n,
        q=q,
        alpha=alpha,
        ell_star=ell_star,
        d_star=d_star,
        delta=delta,
        lam=lam,
        kappa=kappa,
        eta=eta,
        rho=rho,
        gamma=gamma,
        xi=xi,
    )


# ---------------------------------------------------------------------------
# Layer intersection
# ---------------------------------------------------------------------------


def layer_intersection(L1: LayerDecomposition, L2: LayerDecomposition) -> tuple[np.ndarray, float]:
    """Per-distance counts of vertices at the same distance in both graphs.

    Returns (counts, fraction) where counts[d] = #{v : dist1[v] = dist2[v] = d}
    and fraction = sum(counts) / n.
    """
    if L1.dist.size != L2.dist.size:
        raise ValueError("layer decompositions live on different vertex sets")
    if L1.root != L2.root:
        raise ValueError("layer decompositions have different roots")
    n = L1.dist.size
    both = (L1.dist == L2.dist) & (L1.dist != UNREACHABLE)
    if not both.any():
        return np.zeros(0, dtype=np.int64), 0.0
    dvals = L1.dist[both]
    counts = np.bincount(dvals)
    return counts, float(dvals.size) / n


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def write_edgelist(g: Graph, fh: io.TextIOBase) -> None:
    """Text edge list: header "n m", then one "u v" line per edge, sorted."""
    edges = g.edge_array()
    fh.write(f"{g.n} {edges.shape[0]}\n")
    for u, v in edges:
        fh.write(f"{u} {v}\n")


def read_edgelist(fh: io.TextIOBase) -> Graph:
    header = fh.readline().split()
    n, m = int(header[0]), int(header[1])
    edges = np.loadtxt(fh, dtype=np.int64, max_rows=m).reshape(-1, 2) if m else np.empty((0, 2), dtype=np.int64)
    return graph_from_edges(n, edges)
