"""Graph builders shared by the test modules."""

import networkx as nx
import numpy as np

from ergfair.graph import AttributedGraph


def from_nx(G, labels=None):
    """AttributedGraph from a networkx graph on nodes 0..n-1."""
    n = G.number_of_nodes()
    assert sorted(G.nodes) == list(range(n))
    if labels is None:
        labels = ["a" if i % 2 else "b" for i in range(n)]
    return AttributedGraph.from_edges([str(i) for i in range(n)], list(labels), G.edges())


def complete(n, labels=None):
    return from_nx(nx.complete_graph(n), labels)


def path(n, labels=None):
    return from_nx(nx.path_graph(n), labels)


def cycle(n, labels=None):
    return from_nx(nx.cycle_graph(n), labels)


def star(leaves, labels=None):
    return from_nx(nx.star_graph(leaves), labels)


def random_connected(n, p, seed, labels=None):
    """Erdos-Renyi G(n, p) conditioned on connectivity (resampled by seed)."""
    rng = np.random.default_rng(seed)
    while True:
        G = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if nx.is_connected(G):
            return from_nx(G, labels)


def random_tree(n, seed, labels=None):
    rng = np.random.default_rng(seed)
    G = nx.Graph()
    G.add_nodes_from(range(n))
    for v in range(1, n):
        G.add_edge(v, int(rng.integers(v)))
    return from_nx(G, labels)


def random_labels(n, seed, values=("f", "m")):
    rng = np.random.default_rng(seed)
    labels = [values[int(i)] for i in rng.integers(len(values), size=n)]
    # both groups non-empty
    labels[0], labels[1] = values[0], values[1]
    return labels


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.node_count))
    G.add_edges_from(g.edges)
    return G
