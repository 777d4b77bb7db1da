"""Binary cache of Laplacian pseudo-inverses keyed by the edge set.

File layout (little-endian): 8-byte magic, ``n`` as uint64, 32-byte SHA-256
of the edge set, then ``n*n`` float64 values in row-major order.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
from pathlib import Path

import numpy as np

from .graph import AttributedGraph
from .spectral import LaplacianState, laplacian_state

log = logging.getLogger(__name__)

MAGIC = b"ERGLDAG1"
CACHE_ENV = "ERGFAIR_CACHE_DIR"
_HEADER = struct.Struct("<8sQ32s")


class CacheFormatError(ValueError):
    pass


def edge_set_digest(g: AttributedGraph) -> bytes:
    h = hashlib.sha256()
    h.update(struct.pack("<Q", g.node_count))
    if g.edges:
        h.update(np.asarray(g.edges, dtype="<i8").tobytes())
    return h.digest()


def write_pseudo_inverse(path, Ldag: np.ndarray, digest: bytes) -> None:
    path = Path(path)
    n = Ldag.shape[0]
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "wb") as f:
        f.write(_HEADER.pack(MAGIC, n, digest))
        f.write(np.ascontiguousarray(Ldag, dtype="<f8").tobytes())
    os.replace(tmp, path)


def read_pseudo_inverse(path, digest: bytes | None = None) -> np.ndarray:
    """Read a cached matrix; raise :class:`CacheFormatError` on any mismatch."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CacheFormatError("truncated header")
    magic, n, stored = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheFormatError("bad magic")
    if digest is not None and stored != digest:
        raise CacheFormatError("edge-set hash mismatch")
    body = data[_HEADER.size:]
    if len(body) != 8 * n * n:
        raise CacheFormatError(f"expected {8 * n * n} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape(n, n).astype(np.float64)


def cached_laplacian_state(g: AttributedGraph, cache_dir=None, refresh_interval: int = 100) -> LaplacianState:
    """Like :func:`laplacian_state`, reusing a cached pseudo-inverse when possible.

    ``cache_dir`` defaults to ``$ERGFAIR_CACHE_DIR``; with neither set this is
    a plain computation.
    """
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        return laplacian_state(g, refresh_interval)
    digest = edge_set_digest(g)
    path = Path(cache_dir) / f"ldag-{digest.hex()[:32]}.bin"
    if path.exists():
        try:
            Ldag = read_pseudo_inverse(path, digest)
            if Ldag.shape[0] == g.node_count:
                log.info("loaded pseudo-inverse from %s", path)
                return LaplacianState(g.laplacian(), Ldag, 0, refresh_interval)
        except (CacheFormatError, OSError) as exc:
            log.warning("ignoring unusable cache file %s: %s", path, exc)
    state = laplacian_state(g, refresh_interval)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_pseudo_inverse(path, state.Ldag, digest)
    return state
