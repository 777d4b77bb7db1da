"""Attributed undirected graphs and the group partition induced by a node attribute."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

# Attribute value for nodes whose protected attribute is missing.
UNKNOWN = None


class GraphError(ValueError):
    """Raised when a graph violates a structural precondition."""


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Undirected simple graph with one categorical label per node.

    Nodes are addressed by dense internal indices ``0..n-1``; ``node_ids[i]`` is
    the external identifier of node ``i``. Instances are immutable;
    :func:`add_edge` returns a new graph.
    """

    node_ids: tuple[str, ...]
    attributes: tuple[str | None, ...]
    neighbors: tuple[frozenset[int], ...]

    def __post_init__(self):
        n = len(self.node_ids)
        if len(self.attributes) != n or len(self.neighbors) != n:
            raise GraphError("node_ids, attributes and neighbors must have equal length")
        if len(set(self.node_ids)) != n:
            raise GraphError("duplicate external node identifiers")
        for u, nbrs in enumerate(self.neighbors):
            if u in nbrs:
                raise GraphError(f"self-loop at node {self.node_ids[u]!r}")
            for v in nbrs:
                if not 0 <= v < n:
                    raise GraphError(f"neighbor index {v} out of range")
                if u not in self.neighbors[v]:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(
        cls,
        node_ids: Sequence[str],
        attributes: Sequence[str | None],
        edges: Iterable[tuple[int, int]],
    ) -> AttributedGraph:
        """Build a graph from index pairs; duplicates and orientation collapse."""
        nbrs: list[set[int]] = [set() for _ in node_ids]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at index {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(tuple(node_ids), tuple(attributes), tuple(frozenset(s) for s in nbrs))

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @cached_property
    def index(self) -> dict[str, int]:
        """External identifier to internal index."""
        return {nid: i for i, nid in enumerate(self.node_ids)}

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.neighbors], dtype=np.int64)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of edges ``(u, v)`` with ``u < v``."""
        return sorted((u, v) for u, nbrs in enumerate(self.neighbors) for v in nbrs if u < v)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    @property
    def volume(self) -> int:
        return int(self.degrees.sum())

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def adjacency_matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix."""
        n = self.node_count
        A = np.zeros((n, n), dtype=bool)
        if self.edges:
            e = np.asarray(self.edges)
            A[e[:, 0], e[:, 1]] = True
            A[e[:, 1], e[:, 0]] = True
        return A

    def laplacian(self) -> np.ndarray:
        """Combinatorial Laplacian ``D - A`` as a dense float matrix."""
        A = self.adjacency_matrix().astype(np.float64)
        return np.diag(A.sum(axis=1)) - A

    def subgraph(self, nodes: Iterable[int]) -> AttributedGraph:
        """Induced subgraph; indices are re-densified in increasing original order."""
        keep = sorted(set(nodes))
        remap = {old: new for new, old in enumerate(keep)}
        return AttributedGraph(
            tuple(self.node_ids[i] for i in keep),
            tuple(self.attributes[i] for i in keep),
            tuple(frozenset(remap[v] for v in self.neighbors[i] if v in remap) for i in keep),
        )


@dataclass(frozen=True)
class GroupPartition:
    """Nodes grouped by attribute value.

    ``groups`` maps each observed attribute value to a sorted index array;
    ``excluded`` holds nodes with an UNKNOWN attribute. Excluded nodes stay in
    the graph but belong to no group.
    """

    groups: dict[str, np.ndarray]
    excluded: np.ndarray

    @property
    def labels(self) -> list[str]:
        return sorted(self.groups)

    def sizes(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.groups.items()}


def add_edge(g: AttributedGraph, u: int, v: int) -> AttributedGraph:
    """Return a copy of ``g`` with the edge ``(u, v)`` added."""
    n = g.node_count
    if not (0 <= u < n and 0 <= v < n):
        raise GraphError(f"node index out of range: ({u}, {v})")
    if u == v:
        raise GraphError(f"cannot add self-loop at {u}")
    if g.has_edge(u, v):
        raise GraphError(f"edge ({u}, {v}) already exists")
    nbrs = list(g.neighbors)
    nbrs[u] = nbrs[u] | {v}
    nbrs[v] = nbrs[v] | {u}
    return AttributedGraph(g.node_ids, g.attributes, tuple(nbrs))


def connected_components(g: AttributedGraph) -> list[list[int]]:
    """Components in order of their smallest member, each sorted."""
    seen = np.zeros(g.node_count, dtype=bool)
    comps = []
    for start in range(g.node_count):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: AttributedGraph) -> bool:
    return g.node_count > 0 and len(connected_components(g)) == 1


def largest_connected_component(g: AttributedGraph) -> AttributedGraph:
    """Induced subgraph on the largest component.

    Ties go to the component holding the smallest internal index. A connected
    graph is returned unchanged.
    """
    if g.node_count == 0:
        raise GraphError("empty graph")
    comps = connected_components(g)
    if len(comps) == 1:
        return g
    # max() keeps the first maximal element, i.e. the one with the smallest member
    best = max(comps, key=len)
    return g.subgraph(best)


def partition_by_attribute(g: AttributedGraph) -> GroupPartition:
    groups: dict[str, list[int]] = {}
    excluded = []
    for i, a in enumerate(g.attributes):
        if a is UNKNOWN:
            excluded.append(i)
        else:
            groups.setdefault(a, []).append(i)
    if not groups:
        raise GraphError("every node has an UNKNOWN attribute; no groups to compare")
    return GroupPartition(
        {k: np.asarray(groups[k], dtype=np.int64) for k in sorted(groups)},
        np.asarray(excluded, dtype=np.int64),
    )
