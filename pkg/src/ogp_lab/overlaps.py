"""Empirical overlap estimators between the shortest-path structures of two
graphs on a shared vertex set.

All tree/DAG edges are directed parent -> child; two edges are equal only if
they agree including orientation. Vertices reachable in only one graph
contribute zero to the n-normalized sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .graphs import CorrelatedPair, LayerDecomposition, UNREACHABLE, bfs_layers
from .trees import ParentMap, ProductTreeMeasure, shortest_path_dag


@dataclass(frozen=True)
class OverlapReport:
    """One trial's worth of overlap statistics; every field lies in [0, 1]."""

    r_tilde: float
    q_indep: float
    s_dag: float
    same_dist_frac: float
    n_d_star_I_frac: float
    path_overlap: float | None = None


def _check_compatible(M1: ProductTreeMeasure, M2: ProductTreeMeasure) -> None:
    if M1.n != M2.n:
        raise ValueError("measures live on different vertex sets")
    if M1.root != M2.root:
        raise ValueError("measures have different roots")


def _per_vertex_intersections(
    M1: ProductTreeMeasure, M2: ProductTreeMeasure
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(common, s1, s2): per-vertex intersection and support sizes."""
    n = M1.n
    child1 = np.repeat(np.arange(n, dtype=np.int64), M1.support_sizes())
    child2 = np.repeat(np.arange(n, dtype=np.int64), M2.support_sizes())
    key1 = child1 * n + M1.indices
    key2 = child2 * n + M2.indices
    common_keys = np.intersect1d(key1, key2, assume_unique=True)
    common = np.bincount((common_keys // n).astype(np.int64), minlength=n)
    return common, M1.support_sizes(), M2.support_sizes()


def tree_overlap_optimal(M1: ProductTreeMeasure, M2: ProductTreeMeasure) -> float:
    """Expected common-edge fraction of two trees under the vertex-wise
    optimal coupling: (1/n) sum_v |S1 ∩ S2| / max(|S1|, |S2|)."""
    _check_compatible(M1, M2)
    common, s1, s2 = _per_vertex_intersections(M1, M2)
    both = (s1 > 0) & (s2 > 0)
    denom = np.maximum(s1, s2)[both]
    return float(np.sum(common[both] / denom)) / M1.n


def tree_overlap_independent(M1: ProductTreeMeasure, M2: ProductTreeMeasure) -> float:
    """Expected common-edge fraction when the two trees are sampled
    independently: (1/(n-1)) sum_v |S1 ∩ S2| / (|S1| |S2|)."""
    _check_compatible(M1, M2)
    common, s1, s2 = _per_vertex_intersections(M1, M2)
    both = (s1 > 0) & (s2 > 0)
    denom = (s1 * s2)[both]
    return float(np.sum(common[both] / denom)) / (M1.n - 1)


def dag_overlap(D1: ProductTreeMeasure, D2: ProductTreeMeasure) -> float:
    """Directed-edge intersection over the geometric mean of edge counts."""
    _check_compatible(D1, D2)
    e1, e2 = D1.edge_count(), D2.edge_count()
    if e1 == 0 or e2 == 0:
        raise ValueError("DAG overlap undefined for an empty DAG")
    common, _, _ = _per_vertex_intersections(D1, D2)
    return float(common.sum()) / math.sqrt(e1 * e2)


# ---------------------------------------------------------------------------
# Coupled sampling
# ---------------------------------------------------------------------------


def _couple_one(
    s1: np.ndarray, s2: np.ndarray, gen: np.random.Generator
) -> tuple[int, int]:
    """One draw from the maximal coupling of the uniform laws on s1 and s2.

    The match probability is |s1 ∩ s2| / max(|s1|, |s2|); conditional on a
    miss the smaller side redraws from its residual law.
    """
    if s1.size == 0 or s2.size == 0:
        a = int(s1[gen.integers(s1.size)]) if s1.size else -1
        b = int(s2[gen.integers(s2.size)]) if s2.size else -1
        return a, b
    swap = s1.size > s2.size
    small, big = (s2, s1) if swap else (s1, s2)
    y = int(big[gen.integers(big.size)])
    common = np.intersect1d(small, big, assume_unique=True)
    if common.size and np.searchsorted(common, y) < common.size and common[np.searchsorted(common, y)] == y:
        x = y
    else:
        # residual law on the small support: mass 1/k_small - [in common]/k_big
        w = np.full(small.size, 1.0 / small.size)
        if common.size:
            in_common = np.isin(small, common, assume_unique=True)
            w[in_common] -= 1.0 / big.size
        w = np.maximum(w, 0.0)
        w /= w.sum()
        x = int(small[gen.choice(small.size, p=w)])
    return (y, x) if swap else (x, y)


def coupled_spt_sample(
    M1: ProductTreeMeasure, M2: ProductTreeMeasure, seed: int
) -> tuple[ParentMap, ParentMap, int]:
    """Sample a tree from each measure under the product optimal coupling.

    Returns (T1, T2, common) where common counts the vertices that picked
    the same parent (equivalently the common directed edge count).
    """
    _check_compatible(M1, M2)
    gen = _rng.stream(seed, _rng.TAG_COUPLING)
    n = M1.n
    p1 = np.full(n, -1, dtype=np.int64)
    p2 = np.full(n, -1, dtype=np.int64)
    p1[M1.root] = M1.root
    p2[M2.root] = M2.root
    common = 0
    s1_sizes, s2_sizes = M1.support_sizes(), M2.support_sizes()
    for v in range(n):
        k1, k2 = s1_sizes[v], s2_sizes[v]
        if k1 == 0 and k2 == 0:
            continue
        a, b = _couple_one(M1.support(v), M2.support(v), gen)
        if k1:
            p1[v] = a
        if k2:
            p2[v] = b
        if k1 and k2 and a == b:
            common += 1
    T1 = _parent_map_from(M1, p1)
    T2 = _parent_map_from(M2, p2)
    return T1, T2, common


def _parent_map_from(M: ProductTreeMeasure, parent: np.ndarray) -> ParentMap:
    from .trees import _depths_from_parents

    dist = _depths_from_parents(parent, M.root)
    return ParentMap(root=M.root, parent=parent, dist_T=dist)


# ---------------------------------------------------------------------------
# Path overlap
# ---------------------------------------------------------------------------


def st_subdag_vertices(L: LayerDecomposition, t: int) -> np.ndarray:
    """Vertices lying on some shortest root-t path (backward closure of t
    through the parent sets)."""
    seen = {int(t)}
    frontier = [int(t)]
    while frontier:
        nxt = []
        for v in frontier:
            for u in L.parents(v):
                u = int(u)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return np.array(sorted(seen), dtype=np.int64)


def unique_shortest_path(L: LayerDecomposition, t: int) -> bool:
    """True iff the root-t shortest path is unique (the sub-DAG is a path)."""
    if L.dist[t] == UNREACHABLE:
        raise ValueError("target unreachable")
    verts = st_subdag_vertices(L, t)
    return verts.size == int(L.dist[t]) + 1


def sample_coupled_paths(
    L1: LayerDecomposition,
    L2: LayerDecomposition,
    t: int,
    gen: np.random.Generator,
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Walk back from t in both graphs, coupling the parent choices optimally
    whenever the two walks sit at the same vertex with both parent sets
    available, and independently otherwise. Edges come out directed
    parent -> child (away from the root)."""
    path1: list[tuple[int, int]] = []
    path2: list[tuple[int, int]] = []
    v1, v2 = int(t), int(t)
    while v1 != L1.root or v2 != L2.root:
        need1 = v1 != L1.root
        need2 = v2 != L2.root
        if need1 and need2 and v1 == v2:
            a, b = _couple_one(L1.parents(v1), L2.parents(v2), gen)
            path1.append((a, v1))
            path2.append((b, v2))
            v1, v2 = a, b
        else:
            if need1:
                s = L1.parents(v1)
                a = int(s[gen.integers(s.size)])
                path1.append((a, v1))
                v1 = a
            if need2:
                s = L2.parents(v2)
                b = int(s[gen.integers(s.size)])
                path2.append((b, v2))
                v2 = b
    return path1, path2


def path_overlap_from_layers(
    L1: LayerDecomposition, L2: LayerDecomposition, t: int, gen: np.random.Generator
) -> float:
    """|P1 ∩ P2| / sqrt(|P1| |P2|) for one coupled draw of shortest paths."""
    if L1.dist[t] == UNREACHABLE or L2.dist[t] == UNREACHABLE:
        raise ValueError("target unreachable in one of the graphs")
    p1, p2 = sample_coupled_paths(L1, L2, t, gen)
    shared = len(set(p1) & set(p2))
    return shared / math.sqrt(len(p1) * len(p2))


def path_overlap_experiment(pair: CorrelatedPair, s: int, t: int, seed: int) -> float:
    """Sample a shortest s-t path in each graph of the pair from the
    vertex-wise optimal coupling restricted to the s-t sub-DAG and return
    the normalized common-edge count."""
    L1 = bfs_layers(pair.g1, s)
    L2 = bfs_layers(pair.g2, s)
    gen = _rng.stream(seed, _rng.TAG_COUPLING, 1)
    return path_overlap_from_layers(L1, L2, t, gen)


# ---------------------------------------------------------------------------
# Full per-pair report
# ---------------------------------------------------------------------------


def overlap_report(
    L1: LayerDecomposition,
    L2: LayerDecomposition,
    d_star: int,
    path_target: int | None = None,
    seed: int = 0,
) -> OverlapReport:
    """All overlap statistics for one correlated pair, from their layers."""
    from .graphs import layer_intersection

    M1 = shortest_path_dag(L1)
    M2 = shortest_path_dag(L2)
    counts, frac = layer_intersection(L1, L2)
    ndsi = float(counts[d_star]) / L1.dist.size if d_star < counts.size else 0.0
    path_ov = None
    if path_target is not None:
        gen = _rng.stream(seed, _rng.TAG_COUPLING, 2)
        if L1.dist[path_target] != UNREACHABLE and L2.dist[path_target] != UNREACHABLE:
            path_ov = path_overlap_from_layers(L1, L2, path_target, gen)
    return OverlapReport(
        r_tilde=tree_overlap_optimal(M1, M2),
        q_indep=tree_overlap_independent(M1, M2),
        s_dag=dag_overlap(M1, M2),
        same_dist_frac=frac,
        n_d_star_I_frac=ndsi,
        path_overlap=path_ov,
    )
