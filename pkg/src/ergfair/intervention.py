"""Budgeted edge augmentation: ERG-Link, its baselines and strong-tie variants.

Every strategy shares one loop. The most isolated group ``S_d`` is fixed from
the initial graph, candidates are non-edges with at least one endpoint in
``S_d``, and one edge is added per step. The pseudo-inverse is maintained for
all strategies so that metric snapshots can be taken along the way.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import AttributedGraph, GroupPartition
from .metrics import (
    DisparityReport,
    GraphSummary,
    GroupMetrics,
    disadvantaged_group,
    disparity_report,
    graph_summary,
    group_metrics,
    node_metrics_dense,
)
from .spectral import LaplacianState, laplacian_state, refresh, resistance_matrix, resistance_rows, woodbury_update

log = logging.getLogger(__name__)

# Scores within this relative distance of the best count as tied.
TIE_RTOL = 1e-10


class Strategy(str, enum.Enum):
    ERG = "erg"
    RANDOM = "random"
    COS = "cos"
    S_ERG = "s-erg"
    S_COS = "s-cos"
    S_RANDOM = "s-random"

    @property
    def strong(self) -> bool:
        return self.value.startswith("s-")

    @property
    def weak(self) -> Strategy:
        return Strategy(self.value[2:]) if self.strong else self

    @property
    def label(self) -> str:
        base = {"erg": "ERG", "random": "Random", "cos": "Cos"}[self.weak.value]
        return "S-" + base if self.strong else base


@dataclass
class InterventionConfig:
    """Run parameters.

    ``method`` selects how the pseudo-inverse follows the added edges:
    ``"woodbury"`` applies rank-one updates, ``"recompute"`` rebuilds it
    every step.
    """

    budget: int
    strategy: Strategy = Strategy.ERG
    snapshot_every: int = 1
    seed: int = 0
    refresh_interval: int = 100
    method: str = "woodbury"
    reidentify_disadvantaged: bool = False
    spectral_gap_in_snapshots: bool = True

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be positive")
        if self.refresh_interval < 1:
            raise ValueError("refresh_interval must be positive")
        if self.method not in ("woodbury", "recompute"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class AddedEdge:
    step: int
    u: int
    v: int
    score: float


@dataclass(frozen=True)
class Snapshot:
    step: int
    groups: GroupMetrics
    disparity: DisparityReport
    summary: GraphSummary


@dataclass
class InterventionTrace:
    strategy: Strategy
    budget: int
    disadvantaged_group: str
    added_edges: list[AddedEdge] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)
    final_graph: AttributedGraph | None = None
    exhausted: bool = False

    @property
    def initial(self) -> Snapshot:
        return self.snapshots[0]

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]


def adjacency_cosine(g: AttributedGraph, u: int, v: int) -> float:
    """Cosine similarity of adjacency rows, ``|N(u) & N(v)| / sqrt(d_u d_v)``."""
    if u == v:
        raise ValueError("adjacency_cosine needs two distinct nodes")
    nu, nv = g.neighbors[u], g.neighbors[v]
    if not nu or not nv:
        return 0.0
    return len(nu & nv) / np.sqrt(len(nu) * len(nv))


class _Selector:
    """Scores candidate pairs and picks the best one.

    ``maximize`` fixes the direction: resistance is a distance, cosine a
    similarity, so the weak-tie objectives point opposite ways.
    """

    def __init__(self, maximize: bool):
        self.maximize = maximize

    def scores(self, state: LaplacianState, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def added(self, u: int, v: int, A: np.ndarray) -> None:
        pass

    def select(self, state, A, sd, valid):
        S = self.scores(state, sd)
        if not self.maximize:
            S = np.where(valid, S, np.inf)
            best = S.min()
            if not np.isfinite(best):
                return None
            tied = S <= best + TIE_RTOL * max(1.0, abs(best))
        else:
            S = np.where(valid, S, -np.inf)
            best = S.max()
            if not np.isfinite(best):
                return None
            tied = S >= best - TIE_RTOL * max(1.0, abs(best))
        r, c = np.nonzero(tied)
        u, v = _lexmin_pair(sd[r], c)
        return u, v, float(best)


def _lexmin_pair(a: np.ndarray, b: np.ndarray) -> tuple[int, int]:
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    k = np.lexsort((hi, lo))[0]
    return int(lo[k]), int(hi[k])


class _ResistanceSelector(_Selector):
    def scores(self, state, rows):
        return resistance_rows(state, rows)


class _CosineSelector(_Selector):
    """Maintains common-neighbour counts incrementally."""

    def __init__(self, maximize: bool, A: np.ndarray):
        super().__init__(maximize)
        Af = A.astype(np.float32)
        # float32 matmul is exact for counts below 2**24
        self.common = (Af @ Af).astype(np.int32)
        self.deg = A.sum(axis=1).astype(np.float64)

    def scores(self, state, rows):
        denom = np.sqrt(self.deg[rows][:, None] * self.deg[None, :])
        with np.errstate(invalid="ignore", divide="ignore"):
            sim = np.where(denom > 0, self.common[rows] / denom, 0.0)
        return sim

    def added(self, u, v, A):
        # A already holds the new edge; use the neighbourhoods from before it
        nu = np.flatnonzero(A[u])
        nu = nu[nu != v]
        nv = np.flatnonzero(A[v])
        nv = nv[nv != u]
        C = self.common
        C[u, nv] += 1
        C[nv, u] += 1
        C[v, nu] += 1
        C[nu, v] += 1
        self.deg[u] += 1
        self.deg[v] += 1


class _RandomSelector(_Selector):
    """Uniform draw over the current candidate pairs."""

    def __init__(self, seed: int):
        super().__init__(maximize=True)
        self.rng = np.random.default_rng(seed)

    def select(self, state, A, sd, valid):
        in_d = np.zeros(A.shape[0], dtype=bool)
        in_d[sd] = True
        # a pair with both ends in S_d shows up in two rows; keep one copy
        keep = valid & ~(in_d[None, :] & (np.arange(A.shape[0])[None, :] < sd[:, None]))
        r, c = np.nonzero(keep)
        if len(r) == 0:
            return None
        k = int(self.rng.integers(len(r)))
        u, v = int(sd[r[k]]), int(c[k])
        return min(u, v), max(u, v), float(state.Ldag[u, u] + state.Ldag[v, v] - 2 * state.Ldag[u, v])


def _make_selector(strategy: Strategy, cfg: InterventionConfig, A: np.ndarray) -> _Selector:
    weak = strategy.weak
    if weak is Strategy.ERG:
        return _ResistanceSelector(maximize=not strategy.strong)
    if weak is Strategy.COS:
        # weak ties join the least similar neighbourhoods
        return _CosineSelector(maximize=strategy.strong, A=A)
    # no distance to invert: the strong-tie random variant is plain random
    return _RandomSelector(cfg.seed)


def _snapshot(step, state, A, p, cfg) -> Snapshot:
    R = resistance_matrix(state)
    gm = group_metrics(node_metrics_dense(R, A), p)
    return Snapshot(
        step,
        gm,
        disparity_report(gm),
        graph_summary(state, R, with_spectral_gap=cfg.spectral_gap_in_snapshots),
    )


def run_intervention(
    g: AttributedGraph,
    p: GroupPartition,
    cfg: InterventionConfig,
    state: LaplacianState | None = None,
) -> InterventionTrace:
    """Run ``cfg.strategy`` for ``cfg.budget`` steps on a connected graph.

    ``state`` may carry a precomputed pseudo-inverse of ``g``; it is copied,
    never modified. The trace always has a snapshot at step 0 and at the
    last executed step. When candidates run out before the budget is spent
    the trace is returned with ``exhausted=True``.
    """
    if len(p.groups) < 2:
        raise ValueError("need at least 2 groups")
    state = laplacian_state(g, cfg.refresh_interval) if state is None else state.copy()
    state.refresh_interval = cfg.refresh_interval
    A = g.adjacency_matrix()
    selector = _make_selector(cfg.strategy, cfg, A)

    first = _snapshot(0, state, A, p, cfg)
    sd_label = disadvantaged_group(first.groups)
    log.info("%s: disadvantaged group %r, budget %d", cfg.strategy.label, sd_label, cfg.budget)
    trace = InterventionTrace(cfg.strategy, cfg.budget, sd_label, snapshots=[first])
    sd = p.groups[sd_label]
    latest = first

    for step in range(1, cfg.budget + 1):
        if cfg.reidentify_disadvantaged:
            sd = p.groups[disadvantaged_group(latest.groups)]
        valid = ~A[sd]
        valid[np.arange(len(sd)), sd] = False
        pick = selector.select(state, A, sd, valid)
        if pick is None:
            trace.exhausted = True
            log.warning("%s: candidate set exhausted after %d edges", cfg.strategy.label, step - 1)
            break
        u, v, score = pick
        r = float(state.Ldag[u, u] + state.Ldag[v, v] - 2.0 * state.Ldag[u, v])
        woodbury_update(state, u, v, r)
        if cfg.method == "recompute":
            refresh(state)
        A[u, v] = A[v, u] = True
        selector.added(u, v, A)
        trace.added_edges.append(AddedEdge(step, u, v, score))
        if step % cfg.snapshot_every == 0 or step == cfg.budget or cfg.reidentify_disadvantaged:
            latest = _snapshot(step, state, A, p, cfg)
            trace.snapshots.append(latest)

    last = len(trace.added_edges)
    if trace.snapshots[-1].step != last:
        trace.snapshots.append(_snapshot(last, state, A, p, cfg))
    trace.final_graph = AttributedGraph.from_edges(
        g.node_ids, g.attributes, list(g.edges) + [(e.u, e.v) for e in trace.added_edges]
    )
    return trace


def erg_link(g: AttributedGraph, p: GroupPartition, cfg: InterventionConfig, state=None) -> InterventionTrace:
    """Greedily add the candidate pair with the largest effective resistance."""
    return run_intervention(g, p, _with(cfg, Strategy.ERG), state)


def baseline_random(g: AttributedGraph, p: GroupPartition, cfg: InterventionConfig, state=None) -> InterventionTrace:
    return run_intervention(g, p, _with(cfg, Strategy.RANDOM), state)


def baseline_cos(g: AttributedGraph, p: GroupPartition, cfg: InterventionConfig, state=None) -> InterventionTrace:
    """Greedily add the candidate pair with the least similar neighbourhoods."""
    return run_intervention(g, p, _with(cfg, Strategy.COS), state)


def strong_variant(strategy, g: AttributedGraph, p: GroupPartition, cfg: InterventionConfig, state=None):
    """Run a strategy with its objective inverted (closest pairs first)."""
    weak = Strategy(strategy).weak
    return run_intervention(g, p, _with(cfg, Strategy("s-" + weak.value)), state)


def _with(cfg: InterventionConfig, strategy: Strategy) -> InterventionConfig:
    return replace(cfg, strategy=strategy)


def pareto_points(traces: list[InterventionTrace]) -> list[dict]:
    """One row per strategy and snapshot: disparity vs summed group metric."""
    rows = []
    for t in traces:
        for s in t.snapshots:
            rows.append(
                {
                    "strategy": t.strategy.value,
                    "step": s.step,
                    "d_isolation": s.disparity.isolation,
                    "sum_isolation": sum(s.groups.isolation.values()),
                    "d_diameter": s.disparity.diameter,
                    "sum_diameter": sum(s.groups.diameter.values()),
                }
            )
    return rows
