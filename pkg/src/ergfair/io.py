"""Reading and writing edge lists and attribute tables.

Edge list: one edge per line, two identifiers separated by whitespace or a
comma; text after ``#`` is ignored. Attribute table: CSV whose header starts
with ``node`` and contains the requested attribute column; an empty value
means UNKNOWN.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .graph import UNKNOWN, AttributedGraph, GraphError

log = logging.getLogger(__name__)

Source = Union[str, os.PathLike, IO[str], Iterable[str]]

_SPLIT = re.compile(r"[,\s]+")


class ParseError(ValueError):
    """Malformed input row. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"line {lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.lineno = lineno
        self.source = source


@dataclass
class EdgeListStats:
    rows: int = 0
    self_loops: int = 0
    duplicates: int = 0


@dataclass
class AttributeStats:
    rows: int = 0
    duplicates: int = 0
    unknown: int = 0


def _lines(source: Source) -> tuple[Iterator[str], str | None]:
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        return iter(text.splitlines()), str(path)
    return iter(source), getattr(source, "name", None)


def read_edge_list(
    source: Source, *, columns: tuple[int, int] = (0, 1), skip_header: bool = False
) -> tuple[list[tuple[str, str]], EdgeListStats]:
    """Parse an edge list into deduplicated undirected identifier pairs.

    Pairs keep first-seen orientation and order. Self-loops are dropped and
    counted. ``columns`` selects which fields hold the endpoints, so wider
    tables (e.g. a written ``edges.csv``) can be read back.
    """
    lines, name = _lines(source)
    stats = EdgeListStats()
    seen: set[tuple[str, str]] = set()
    pairs: list[tuple[str, str]] = []
    need = max(columns) + 1
    first = True
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if first and skip_header:
            first = False
            continue
        first = False
        fields = _SPLIT.split(line)
        if len(fields) < need:
            raise ParseError(f"expected at least {need} fields, got {len(fields)}: {raw!r}", lineno, name)
        a, b = fields[columns[0]], fields[columns[1]]
        stats.rows += 1
        if a == b:
            stats.self_loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        pairs.append((a, b))
    if stats.self_loops:
        log.warning("dropped %d self-loop(s) from %s", stats.self_loops, name or "edge list")
    return pairs, stats


def read_attributes(source: Source, attribute_name: str) -> tuple[dict[str, str | None], AttributeStats]:
    """Parse ``node,<attribute_name>`` CSV rows. Duplicate rows: last one wins."""
    lines, name = _lines(source)
    reader = csv.reader(lines)
    stats = AttributeStats()
    values: dict[str, str | None] = {}
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("attribute table is empty", 1, name) from None
    header = [h.strip() for h in header]
    if not header or header[0] != "node":
        raise ParseError(f"header must start with 'node', got {header!r}", 1, name)
    if attribute_name not in header[1:]:
        raise ParseError(f"attribute column {attribute_name!r} not in header {header!r}", 1, name)
    col = header.index(attribute_name)
    for row in reader:
        lineno = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        if len(row) > len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}: {row!r}", lineno, name)
        node = row[0].strip()
        if not node:
            raise ParseError("missing node identifier", lineno, name)
        value = row[col].strip() if col < len(row) else ""
        stats.rows += 1
        if node in values:
            stats.duplicates += 1
        values[node] = value if value else UNKNOWN
    if stats.duplicates:
        log.warning("%d duplicate attribute row(s) in %s; last value kept", stats.duplicates, name or "table")
    stats.unknown = sum(v is UNKNOWN for v in values.values())
    return values, stats


def load_graph(edges: Source, attributes: Source, attribute_name: str) -> AttributedGraph:
    """Load an attributed graph from an edge list and an attribute table.

    Internal indices follow first appearance in the edge list. Nodes absent
    from the attribute table are UNKNOWN; attribute rows for nodes without
    edges are ignored.
    """
    pairs, _ = read_edge_list(edges)
    if not pairs:
        raise GraphError("edge list contains no edges")
    values, _ = read_attributes(attributes, attribute_name)
    index: dict[str, int] = {}
    for a, b in pairs:
        for x in (a, b):
            if x not in index:
                index[x] = len(index)
    ids = list(index)
    missing = sum(1 for x in ids if x not in values)
    if missing:
        log.warning("%d node(s) missing from attribute table; marked UNKNOWN", missing)
    unused = sum(1 for x in values if x not in index)
    if unused:
        log.info("%d attribute row(s) refer to nodes without edges; ignored", unused)
    attrs = [values.get(x, UNKNOWN) for x in ids]
    return AttributedGraph.from_edges(ids, attrs, ((index[a], index[b]) for a, b in pairs))


def format_edge_list(g: AttributedGraph) -> str:
    buf = io.StringIO()
    for u, v in g.edges:
        buf.write(f"{g.node_ids[u]} {g.node_ids[v]}\n")
    return buf.getvalue()


def format_attributes(g: AttributedGraph, attribute_name: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", attribute_name])
    for nid, a in zip(g.node_ids, g.attributes):
        w.writerow([nid, "" if a is UNKNOWN else a])
    return buf.getvalue()


def write_graph(g: AttributedGraph, edges_path, attrs_path, attribute_name: str) -> None:
    """Serialize ``g`` so that :func:`load_graph` reproduces it."""
    from .outputs import atomic_write_text

    atomic_write_text(edges_path, format_edge_list(g))
    atomic_write_text(attrs_path, format_attributes(g, attribute_name))
