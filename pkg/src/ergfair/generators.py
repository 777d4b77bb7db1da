"""Synthetic attributed graphs for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .graph import AttributedGraph


def attributed_sbm(
    sizes: list[int],
    p: np.ndarray,
    labels: list[str] | None = None,
    seed: int | None = None,
) -> AttributedGraph:
    """Stochastic block model whose blocks double as attribute groups.

    ``p[i][j]`` is the edge probability between blocks ``i`` and ``j``. Node
    identifiers are ``"0".."n-1"``. The result may be disconnected.
    """
    p = np.asarray(p, dtype=float)
    k = len(sizes)
    if p.shape != (k, k) or not np.allclose(p, p.T):
        raise ValueError("p must be a symmetric k x k matrix")
    labels = labels or [f"g{i}" for i in range(k)]
    block = np.repeat(np.arange(k), sizes)
    n = len(block)
    rng = np.random.default_rng(seed)
    prob = p[block[:, None], block[None, :]]
    upper = np.triu(rng.random((n, n)) < prob, k=1)
    u, v = np.nonzero(upper)
    return AttributedGraph.from_edges(
        [str(i) for i in range(n)],
        [labels[b] for b in block],
        zip(u.tolist(), v.tolist()),
    )


def core_periphery(n_core: int, n_periphery: int, p_core: float, p_cross: float, p_periph: float,
                   seed: int | None = None) -> AttributedGraph:
    """Two-group SBM with a dense ``core`` group and a sparse ``periphery`` group."""
    p = [[p_core, p_cross], [p_cross, p_periph]]
    return attributed_sbm([n_core, n_periphery], p, ["core", "periphery"], seed)
