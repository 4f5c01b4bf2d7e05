import numpy as np
import pytest

from ogp_lab.graphs import Graph, graph_from_edges


def cycle_graph(n: int) -> Graph:
    return graph_from_edges(n, np.array([(i, (i + 1) % n) for i in range(n)]))


def path_graph(n: int) -> Graph:
    return graph_from_edges(n, np.array([(i, i + 1) for i in range(n - 1)]))


def star_graph(k: int) -> Graph:
    return graph_from_edges(k + 1, np.array([(0, i) for i in range(1, k + 1)]))


@pytest.fixture(scope="session")
def atlas_connected():
    """All connected graphs on 2..7 vertices (one per isomorphism class)."""
    nx = pytest.importorskip("networkx")
    from networkx.generators.atlas import graph_atlas_g

    out = []
    for G in graph_atlas_g():
        if G.number_of_nodes() < 2 or not nx.is_connected(G):
            continue
        edges = np.array(list(G.edges()), dtype=np.int64).reshape(-1, 2)
        out.append(graph_from_edges(G.number_of_nodes(), edges))
    return out
