"""Resistance-based social-capital metrics for nodes and groups, and their disparities."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import AttributedGraph, GroupPartition
from .spectral import LaplacianState, spectral_gap

log = logging.getLogger(__name__)

METRICS = ("isolation", "diameter", "control")


@dataclass(frozen=True)
class NodeMetrics:
    """Per-node isolation (row sum of R), diameter (row max) and control.

    Control is the sum of resistances over a node's incident edges.
    """

    isolation: np.ndarray
    diameter: np.ndarray
    control: np.ndarray


@dataclass(frozen=True)
class GroupMetrics:
    isolation: dict[str, float]
    diameter: dict[str, float]
    control: dict[str, float]
    sizes: dict[str, int]

    @property
    def labels(self) -> list[str]:
        return sorted(self.sizes)

    def metric(self, name: str) -> dict[str, float]:
        return getattr(self, name)


@dataclass(frozen=True)
class DisparityReport:
    isolation: float
    diameter: float
    control: float
    # metric name -> (group with the largest value, group with the smallest)
    argmax_pair: dict[str, tuple[str, str]]
    disadvantaged_group: str

    def metric(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class GraphSummary:
    r_tot: float
    r_diam: float
    spectral_gap: float | None
    volume: int
    n_nodes: int
    n_edges: int


def node_metrics_dense(R: np.ndarray, A: np.ndarray) -> NodeMetrics:
    """Node metrics from a resistance matrix and a dense boolean adjacency."""
    return NodeMetrics(
        isolation=R.sum(axis=1),
        diameter=R.max(axis=1),
        control=np.where(A, R, 0.0).sum(axis=1),
    )


def node_metrics(R: np.ndarray, g: AttributedGraph) -> NodeMetrics:
    return node_metrics_dense(R, g.adjacency_matrix())


def group_metrics(nm: NodeMetrics, p: GroupPartition) -> GroupMetrics:
    """Arithmetic mean of each node metric over every group's members."""
    out: dict[str, dict[str, float]] = {m: {} for m in METRICS}
    sizes = {}
    for label in sorted(p.groups):
        idx = p.groups[label]
        if len(idx) == 0:
            raise ValueError(f"group {label!r} is empty")
        sizes[label] = len(idx)
        for m in METRICS:
            out[m][label] = float(np.mean(getattr(nm, m)[idx]))
    return GroupMetrics(out["isolation"], out["diameter"], out["control"], sizes)


def _extremes(values: dict[str, float]) -> tuple[str, str]:
    # ties resolve to the lexicographically smallest label
    top, bottom = max(values.values()), min(values.values())
    hi = min(k for k, v in values.items() if v == top)
    lo = min(k for k, v in values.items() if v == bottom)
    return hi, lo


def disadvantaged_group(gm: GroupMetrics) -> str:
    """Group with the largest isolation; ties go to the smallest label."""
    iso = gm.isolation
    top = max(iso.values())
    tied = sorted(k for k, v in iso.items() if v == top)
    if len(tied) > 1:
        log.info("isolation tie between %s; picking %r", tied, tied[0])
    return tied[0]


def disparity_report(gm: GroupMetrics) -> DisparityReport:
    """Max-minus-min gap of each group metric."""
    if len(gm.sizes) < 2:
        raise ValueError(f"need at least 2 groups to measure disparity, got {len(gm.sizes)}")
    gaps = {}
    pairs = {}
    for m in METRICS:
        vals = gm.metric(m)
        hi, lo = _extremes(vals)
        gaps[m] = vals[hi] - vals[lo]
        pairs[m] = (hi, lo)
    return DisparityReport(gaps["isolation"], gaps["diameter"], gaps["control"], pairs, disadvantaged_group(gm))


def graph_summary(
    state: LaplacianState, R: np.ndarray, g: AttributedGraph | None = None, *, with_spectral_gap: bool = True
) -> GraphSummary:
    """Graph-level totals. ``R_tot(G)`` is half the sum of all entries of ``R``."""
    if g is not None:
        n_edges = g.edge_count
    else:
        n_edges = int(round(np.trace(state.L) / 2))
    return GraphSummary(
        r_tot=float(R.sum() / 2.0),
        r_diam=float(R.max()),
        spectral_gap=spectral_gap(state) if with_spectral_gap else None,
        volume=2 * n_edges,
        n_nodes=state.n,
        n_edges=n_edges,
    )
