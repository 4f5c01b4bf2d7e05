"""Shortest-path DAGs, product tree measures, tree sampling, local search,
and distance estimation by message passing.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .graphs import Graph, LayerDecomposition, UNREACHABLE


@dataclass
class ProductTreeMeasure:
    """Per-vertex parent supports with selection weights (uniform by default).

    A realization picks one parent per non-root reachable vertex; supports are
    required to point strictly closer to the root, so every realization is a
    tree on the root's component.
    """

    root: int
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    # log-weights aligned with indices; None means uniform
    log_weights: np.ndarray | None = None

    def support(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def support_sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def covered(self) -> np.ndarray:
        """Vertices with a nonempty support (non-root members of the component)."""
        return np.flatnonzero(self.support_sizes() > 0)

    def directed_edges(self) -> np.ndarray:
        """(k, 2) array of all (parent, child) edges in the DAG."""
        child = np.repeat(np.arange(self.n, dtype=np.int64), self.support_sizes())
        return np.column_stack([self.indices, child])

    def edge_count(self) -> int:
        return int(self.indices.size)


@dataclass
class ParentMap:
    """Rooted spanning tree of the root's component as a parent-of-vertex map.

    parent[root] = root; parent[v] = -1 for vertices outside the component.
    dist_T[v] is the depth of v in the tree (UNREACHABLE off-component).
    """

    root: int
    parent: np.ndarray
    dist_T: np.ndarray

    @property
    def n(self) -> int:
        return int(self.parent.size)

    @property
    def in_component(self) -> np.ndarray:
        return self.parent >= 0

    def component_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.in_component)

    def energy(self) -> int:
        mask = self.in_component
        return int(self.dist_T[mask].sum())

    def directed_edges(self) -> np.ndarray:
        """(k, 2) array of (parent, child) tree edges."""
        mask = self.in_component.copy()
        mask[self.root] = False
        child = np.flatnonzero(mask)
        return np.column_stack([self.parent[child], child])

    def children_counts(self) -> np.ndarray:
        mask = self.in_component.copy()
        mask[self.root] = False
        return np.bincount(self.parent[mask], minlength=self.n)

    def copy(self) -> "ParentMap":
        return ParentMap(self.root, self.parent.copy(), self.dist_T.copy())


def check_parent_map(T: ParentMap) -> None:
    """Assert acyclicity and depth consistency; raises on violation."""
    mask = T.in_component
    verts = np.flatnonzero(mask)
    if T.dist_T[T.root] != 0 or T.parent[T.root] != T.root:
        raise ValueError("root must be its own parent at depth 0")
    for v in verts:
        if v == T.root:
            continue
        p = T.parent[v]
        if not mask[p]:
            raise ValueError(f"parent of {v} lies outside the component")
        if T.dist_T[v] != T.dist_T[p] + 1:
            raise ValueError(f"depth inconsistency at {v}")
    # depths strictly decrease along parent pointers, so no cycles can exist


def shortest_path_dag(L: LayerDecomposition) -> ProductTreeMeasure:
    """The union of all shortest paths from the root, as a product measure.

    Each reachable non-root vertex's support is its BFS parent set with
    uniform weights; realizations are exactly the shortest-path trees.
    """
    return ProductTreeMeasure(
        root=L.root,
        n=L.dist.size,
        indptr=L.par_indptr.copy(),
        indices=L.par_indices.copy(),
        log_weights=None,
    )


def uniform_spt_sample(M: ProductTreeMeasure, seed: int) -> ParentMap:
    """Draw each vertex's parent independently from its support."""
    gen = _rng.stream(seed, _rng.TAG_SPT_SAMPLE)
    return _sample_product(M, gen)


def _sample_product(M: ProductTreeMeasure, gen: np.random.Generator) -> ParentMap:
    n = M.n
    sizes = M.support_sizes()
    covered = M.covered
    if np.any(sizes[covered] == 0):
        raise ValueError("empty support on a covered vertex")
    parent = np.full(n, -1, dtype=np.int64)
    parent[M.root] = M.root
    if M.log_weights is None:
        offsets = (gen.random(covered.size) * sizes[covered]).astype(np.int64)
        offsets = np.minimum(offsets, sizes[covered] - 1)
        parent[covered] = M.indices[M.indptr[covered] + offsets]
    else:
        for v in covered:
            lo, hi = M.indptr[v], M.indptr[v + 1]
            w = M.log_weights[lo:hi]
            p = np.exp(w - w.max())
            p /= p.sum()
            parent[v] = gen.choice(M.indices[lo:hi], p=p)
    dist = _depths_from_parents(parent, M.root)
    return ParentMap(root=M.root, parent=parent, dist_T=dist)


def _depths_from_parents(parent: np.ndarray, root: int) -> np.ndarray:
    n = parent.size
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[root] = 0
    order = np.flatnonzero(parent >= 0)
    # iterate: children of resolved vertices get depths; supports point rootward
    # so a fixed number of sweeps equal to the tree height suffices
    pending = order[dist[order] == UNREACHABLE]
    while pending.size:
        ready = dist[parent[pending]] != UNREACHABLE
        if not ready.any():
            raise ValueError("parent map contains a cycle")
        resolved = pending[ready]
        dist[resolved] = dist[parent[resolved]] + 1
        pending = pending[~ready]
    return dist


def log_spt_count(M: ProductTreeMeasure) -> float:
    """Log of the number of realizations (product of support sizes)."""
    sizes = M.support_sizes()
    covered = M.covered
    return float(np.log(sizes[covered]).sum())


def project_path(T: ParentMap, u: int, v: int) -> list[tuple[int, int]]:
    """The unique u-v path in T as a list of directed edges along the walk.

    Edge orientation follows the parent->child direction of the tree, so two
    projected paths share an edge only if they traverse it the same way
    relative to the root.
    """
    if not (T.in_component[u] and T.in_component[v]):
        raise ValueError("endpoints must lie in the tree's component")
    if u == v:
        return []
    # climb the deeper endpoint until both sit at the same depth, then climb both
    a, b = u, v
    ups_a: list[int] = [a]
    ups_b: list[int] = [b]
    while T.dist_T[a] > T.dist_T[b]:
        a = int(T.parent[a])
        ups_a.append(a)
    while T.dist_T[b] > T.dist_T[a]:
        b = int(T.parent[b])
        ups_b.append(b)
    while a != b:
        a = int(T.parent[a])
        b = int(T.parent[b])
        ups_a.append(a)
        ups_b.append(b)
    # ups_a: u .. lca ; ups_b: v .. lca. Emit edges in walk order u -> v:
    # the u-side climb first, then the v-side descent.
    edges = [(par, child) for child, par in zip(ups_a, ups_a[1:])]
    edges.extend(reversed([(par, child) for child, par in zip(ups_b, ups_b[1:])]))
    return edges


# ---------------------------------------------------------------------------
# 1-local search on the spanning-tree landscape
# ---------------------------------------------------------------------------


def _subtree_vertices(children: list[list[int]], v: int) -> list[int]:
    out = [v]
    stack = [v]
    while stack:
        x = stack.pop()
        for c in children[x]:
            out.append(c)
            stack.append(c)
    return out


def local_search_p2(
    g: Graph,
    root: int,
    init: ParentMap,
    best_improving: bool = False,
    return_stats: bool = False,
):
    """Single-edge-swap descent on the total-depth objective sum_v dist_T(v).

    A move re-parents one vertex v to a graph neighbor u outside v's subtree;
    it is accepted only if the objective strictly decreases, i.e. when
    dist_T(u) + 1 < dist_T(v). The default pivot rule takes the first
    improving swap scanning vertices and neighbors in ID order;
    best_improving=True picks the largest objective decrease instead.
    Descent ends at the global minimum sum_v dist_G(root, v).
    """
    T = init.copy()
    comp = np.flatnonzero(T.in_component)
    if T.root != root:
        raise ValueError("initial tree rooted elsewhere")
    check_parent_map(T)
    n = g.n
    children: list[list[int]] = [[] for _ in range(n)]
    for v in comp:
        if v != root:
            children[T.parent[v]].append(int(v))
    swaps = 0
    while True:
        move = None
        if best_improving:
            best_gain = 0
            for v in comp:
                if v == root:
                    continue
                dv = T.dist_T[v]
                for u in g.neighbors(v):
                    du = T.dist_T[u]
                    if du == UNREACHABLE or du + 1 >= dv:
                        continue
                    size = len(_subtree_vertices(children, int(v)))
                    gain = size * (dv - du - 1)
                    if gain > best_gain:
                        best_gain = gain
                        move = (int(v), int(u))
        else:
            for v in comp:
                if v == root:
                    continue
                dv = T.dist_T[v]
                for u in g.neighbors(v):
                    if T.dist_T[u] != UNREACHABLE and T.dist_T[u] + 1 < dv:
                        move = (int(v), int(u))
                        break
                if move:
                    break
        if move is None:
            break
        v, u = move
        # depths strictly below dist_T(v) cannot be in v's subtree, so the
        # swap keeps the structure a tree
        old_p = int(T.parent[v])
        children[old_p].remove(v)
        children[u].append(v)
        T.parent[v] = u
        delta = int(T.dist_T[u] + 1 - T.dist_T[v])
        for w in _subtree_vertices(children, v):
            T.dist_T[w] += delta
        swaps += 1
    if return_stats:
        return T, swaps
    return T


# ---------------------------------------------------------------------------
# Message passing for distances
# ---------------------------------------------------------------------------


def bp_dijkstra(
    g: Graph,
    root: int,
    beta_bar: float,
    rounds: int,
    seed: int = 0,
    mc_samples: int = 64,
):
    """Distance beliefs from loopy message passing on the tree Gibbs model.

    At beta_bar = inf the messages are point masses and the update is the
    min-plus rule, so after at least diameter-many rounds the belief at v is
    exactly the graph distance from the root (UNREACHABLE off-component).
    At finite beta_bar each message is a distribution over candidate distances
    0..n-1; the update averages the softmin-weighted neighbor distribution
    over draws from the incoming messages (fixed-size Monte Carlo with a
    seeded stream, so results are deterministic given the seed).

    Returns the min-plus belief vector for beta_bar = inf, otherwise an
    (n, n) array of belief distributions.
    """
    if math.isinf(beta_bar):
        return _minsum_distances(g, root, rounds)
    return _soft_bp(g, root, beta_bar, rounds, seed, mc_samples)


def _minsum_distances(g: Graph, root: int, rounds: int) -> np.ndarray:
    n = g.n
    cap = n  # stand-in for +inf; true distances are < n
    E = int(g.indices.size)
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    cols = g.indices
    # twin[e] = slot of the reversed edge (cols[e] -> rows[e]); sorting the
    # slots by (cols, rows) lists exactly the reversed edges in CSR order,
    # and the map is an involution
    twin = np.lexsort((rows, cols))
    starts = g.indptr[:-1]
    nonempty = np.diff(g.indptr) > 0
    msg = np.full(E, cap, dtype=np.int64)
    msg[rows == root] = 0
    eidx = np.arange(E)

    def segment_min(x: np.ndarray) -> np.ndarray:
        out = np.full(n, cap, dtype=x.dtype)
        if E:
            red = np.minimum.reduceat(x, starts.clip(max=E - 1))
            out[nonempty] = red[nonempty]
        return out

    for _ in range(max(rounds, 1)):
        # inc[e] = message arriving at rows[e] along the edge from cols[e]
        inc = np.minimum(msg[twin] + 1, cap)
        best = segment_min(inc)
        # first position attaining the row minimum, then the runner-up value
        pos = np.where(inc == best[rows], eidx, E)
        firstmin = segment_min(pos)
        inc2 = inc.copy()
        hit = firstmin[nonempty]
        inc2[hit[hit < E]] = cap
        second = segment_min(inc2)
        new_msg = np.where(eidx == firstmin[rows], second[rows], best[rows])
        new_msg = np.minimum(new_msg, cap)
        new_msg[rows == root] = 0
        if np.array_equal(new_msg, msg):
            break
        msg = new_msg
    inc = np.minimum(msg[twin] + 1, cap)
    beliefs = segment_min(inc)
    beliefs[root] = 0
    return np.where(beliefs >= cap, UNREACHABLE, beliefs)


def _soft_bp(
    g: Graph, root: int, beta_bar: float, rounds: int, seed: int, mc_samples: int
) -> np.ndarray:
    n = g.n
    gen = _rng.stream(seed, _rng.TAG_BP)
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    cols = g.indices
    reverse = np.lexsort((rows, cols))  # twin map, see _minsum_distances
    # message[e] over support 0..n-1 on edge rows[e] -> cols[e]
    msg = np.zeros((rows.size, n))
    msg[:, n - 1] = 1.0  # far-away prior
    root_slots = rows == root
    msg[root_slots] = 0.0
    msg[root_slots, 0] = 1.0

    def update() -> np.ndarray:
        new = np.empty_like(msg)
        for e in range(rows.size):
            u = int(rows[e])
            if u == root:
                new[e] = msg[e]
                continue
            slots = [int(reverse[f]) for f in range(g.indptr[u], g.indptr[u + 1]) if g.indices[f] != cols[e]]
            if not slots:
                new[e] = msg[e]
                continue
            draws = np.empty((mc_samples, len(slots)), dtype=np.int64)
            for j, s in enumerate(slots):
                draws[:, j] = gen.choice(n, size=mc_samples, p=msg[s])
            cand = np.minimum(draws + 1, n - 1)
            lw = -beta_bar * cand.astype(float)
            lw -= lw.max(axis=1, keepdims=True)
            weights = np.exp(lw)
            weights /= weights.sum(axis=1, keepdims=True)
            acc = np.zeros(n)
            np.add.at(acc, cand.ravel(), weights.ravel())
            acc /= mc_samples
            new[e] = acc
        new[root_slots] = msg[root_slots]
        return new

    for _ in range(rounds):
        msg = update()

    beliefs = np.zeros((n, n))
    beliefs[root, 0] = 1.0
    for v in range(n):
        if v == root:
            continue
        slots = [int(reverse[f]) for f in range(g.indptr[v], g.indptr[v + 1])]
        if not slots:
            beliefs[v, n - 1] = 1.0
            continue
        draws = np.empty((mc_samples, len(slots)), dtype=np.int64)
        for j, s in enumerate(slots):
            draws[:, j] = gen.choice(n, size=mc_samples, p=msg[s])
        cand = np.minimum(draws + 1, n - 1)
        lw = -beta_bar * cand.astype(float)
        lw -= lw.max(axis=1, keepdims=True)
        weights = np.exp(lw)
        weights /= weights.sum(axis=1, keepdims=True)
        acc = np.zeros(n)
        np.add.at(acc, cand.ravel(), weights.ravel())
        beliefs[v] = acc / mc_samples
    return beliefs


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def write_parent_map(T: ParentMap, fh: io.TextIOBase) -> None:
    """One "v parent[v]" line per component vertex, sorted by v."""
    fh.write(f"{T.n} {T.root}\n")
    for v in T.component_vertices():
        fh.write(f"{v} {T.parent[v]}\n")


def read_parent_map(fh: io.TextIOBase) -> ParentMap:
    n, root = (int(x) for x in fh.readline().split())
    parent = np.full(n, -1, dtype=np.int64)
    for line in fh:
        if not line.strip():
            continue
        v, p = (int(x) for x in line.split())
        parent[v] = p
    return ParentMap(root=root, parent=parent, dist_T=_depths_from_parents(parent, root))


def write_measure(M: ProductTreeMeasure, fh: io.TextIOBase) -> None:
    """One "v: u1 u2 ..." support line per covered vertex."""
    fh.write(f"{M.n} {M.root}\n")
    for v in M.covered:
        sup = " ".join(str(int(u)) for u in M.support(v))
        fh.write(f"{v}: {sup}\n")


def read_measure(fh: io.TextIOBase) -> ProductTreeMeasure:
    n, root = (int(x) for x in fh.readline().split())
    supports: dict[int, list[int]] = {}
    for line in fh:
        if not line.strip():
            continue
        head, rest = line.split(":")
        supports[int(head)] = [int(x) for x in rest.split()]
    indptr = [0]
    indices: list[int] = []
    for v in range(n):
        indices.extend(supports.get(v, []))
        indptr.append(len(indices))
    return ProductTreeMeasure(
        root=root,
        n=n,
        indptr=np.array(indptr, dtype=np.int64),
        indices=np.array(indices, dtype=np.int64),
    )
