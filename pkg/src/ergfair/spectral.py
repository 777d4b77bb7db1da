"""Laplacian pseudo-inverse, effective resistances and rank-one updates.

All matrices are dense ``float64`` and indexed by internal node indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components as _cc

from .graph import AttributedGraph

# lambda_2 below this is treated as disconnected; the BFS check decides first.
GAP_TOL = 1e-8


class SingularLaplacianError(ValueError):
    """The Laplacian has a multi-dimensional kernel (graph disconnected)."""


@dataclass
class LaplacianState:
    """Laplacian, its pseudo-inverse, and drift bookkeeping.

    The state is mutated in place by :func:`woodbury_update`; take a
    :meth:`copy` before sharing it with another run.
    """

    L: np.ndarray
    Ldag: np.ndarray
    updates_since_refresh: int = 0
    refresh_interval: int = 100

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def copy(self) -> LaplacianState:
        return LaplacianState(self.L.copy(), self.Ldag.copy(), self.updates_since_refresh, self.refresh_interval)


def _laplacian_connected(L: np.ndarray) -> bool:
    off = L != 0
    np.fill_diagonal(off, False)
    ncomp, _ = _cc(off, directed=False)
    return ncomp == 1


def _rank_corrected_inverse(L: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    M = L + 1.0 / n
    c, low = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    inv = scipy.linalg.cho_solve((c, low), np.eye(n), check_finite=False)
    inv -= 1.0 / n
    # cho_solve output is symmetric only up to rounding
    return 0.5 * (inv + inv.T)


def pseudo_inverse(L: np.ndarray, refresh_interval: int = 100) -> LaplacianState:
    """Moore-Penrose pseudo-inverse of a connected graph's Laplacian.

    Uses ``(L + J/n)^-1 - J/n`` with ``J`` the all-ones matrix.
    """
    L = np.array(L, dtype=np.float64)
    n = L.shape[0]
    if L.ndim != 2 or L.shape[1] != n:
        raise ValueError("Laplacian must be square")
    if n < 2:
        raise SingularLaplacianError("need at least 2 nodes")
    if refresh_interval < 1:
        raise ValueError("refresh_interval must be positive")
    if not _laplacian_connected(L):
        raise SingularLaplacianError(
            "graph is disconnected; extract the largest connected component first"
        )
    try:
        Ldag = _rank_corrected_inverse(L)
    except np.linalg.LinAlgError as exc:
        raise SingularLaplacianError(f"rank-corrected Laplacian is not positive definite: {exc}") from exc
    return LaplacianState(L, Ldag, 0, refresh_interval)


def laplacian_state(g: AttributedGraph, refresh_interval: int = 100) -> LaplacianState:
    return pseudo_inverse(g.laplacian(), refresh_interval)


def effective_resistance(state: LaplacianState, u: int, v: int) -> float:
    if u == v:
        return 0.0
    P = state.Ldag
    return max(float(P[u, u] + P[v, v] - 2.0 * P[u, v]), 0.0)


def resistance_matrix(state: LaplacianState) -> np.ndarray:
    """All pairwise effective resistances, ``1 diag^T + diag 1^T - 2 Ldag``."""
    P = state.Ldag
    d = np.diag(P)
    R = d[:, None] + d[None, :] - 2.0 * P
    R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 0.0)
    np.maximum(R, 0.0, out=R)
    return R


def resistance_rows(state: LaplacianState, rows: np.ndarray) -> np.ndarray:
    """Rows ``R[rows, :]`` without forming the full matrix."""
    P = state.Ldag
    d = np.diag(P)
    R = d[rows][:, None] + d[None, :] - 2.0 * P[rows, :]
    R[np.arange(len(rows)), rows] = 0.0
    return R


def woodbury_update(state: LaplacianState, u: int, v: int, r: float | None = None) -> LaplacianState:
    """Add edge ``(u, v)`` to the state in place, O(n^2).

    ``r`` is the effective resistance between ``u`` and ``v`` *before* the
    edge is added. Every ``refresh_interval`` updates the pseudo-inverse is
    recomputed from scratch to discard accumulated rounding error.
    """
    if u == v:
        raise ValueError(f"cannot add self-loop at {u}")
    if state.L[u, v] != 0:
        raise ValueError(f"edge ({u}, {v}) already present")
    if r is None:
        r = effective_resistance(state, u, v)
    P = state.Ldag
    s = (P[u] - P[v]) / np.sqrt(1.0 + r)
    # s s^T keeps the update exactly symmetric
    P -= np.outer(s, s)
    L = state.L
    L[u, u] += 1.0
    L[v, v] += 1.0
    L[u, v] -= 1.0
    L[v, u] -= 1.0
    state.updates_since_refresh += 1
    if state.updates_since_refresh >= state.refresh_interval:
        refresh(state)
    return state


def refresh(state: LaplacianState) -> LaplacianState:
    """Recompute the pseudo-inverse from the current Laplacian."""
    state.Ldag = _rank_corrected_inverse(state.L)
    state.updates_since_refresh = 0
    return state


def _spectrum(state: LaplacianState) -> tuple[np.ndarray, np.ndarray]:
    lam, phi = scipy.linalg.eigh(state.L)
    if not _laplacian_connected(state.L) or lam[1] <= GAP_TOL:
        raise SingularLaplacianError("graph is disconnected; extract the largest connected component first")
    return lam, phi


def commute_time_embedding(state: LaplacianState, vol: float) -> np.ndarray:
    """Node embedding ``Z`` (``n x (n-1)``) with ``|z_u - z_v|^2 = vol * R_uv``."""
    lam, phi = _spectrum(state)
    return phi[:, 1:] * np.sqrt(vol / lam[1:])


def spectral_gap(state: LaplacianState) -> float:
    """Smallest non-zero Laplacian eigenvalue (algebraic connectivity)."""
    lam = scipy.linalg.eigh(state.L, eigvals_only=True, subset_by_index=[1, 1])
    return float(lam[0])


def oracle_resistance(g: AttributedGraph, u: int, v: int) -> float:
    """Effective resistance by a grounded nodal solve.

    Independent of the pseudo-inverse path: node ``v`` is grounded, a unit
    current enters at ``u``, and the potential at ``u`` is the resistance.
    """
    n = g.node_count
    if u == v:
        raise ValueError("oracle_resistance needs two distinct nodes")
    # own reachability check so the oracle shares nothing with the main path
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in g.neighbors[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != n:
        raise SingularLaplacianError("grounded system is singular: graph is disconnected")
    keep = [i for i in range(n) if i != v]
    pos = {node: k for k, node in enumerate(keep)}
    K = np.zeros((n - 1, n - 1))
    for i in keep:
        K[pos[i], pos[i]] = len(g.neighbors[i])
        for j in g.neighbors[i]:
            if j != v:
                K[pos[i], pos[j]] = -1.0
    b = np.zeros(n - 1)
    b[pos[u]] = 1.0
    try:
        x = np.linalg.solve(K, b)
    except np.linalg.LinAlgError as exc:
        raise SingularLaplacianError(f"grounded system is singular: {exc}") from exc
    return float(x[pos[u]])
