"""CSV/JSON serialization of metrics and intervention traces.

All writes go through a temporary file in the target directory followed by
an atomic rename, so readers never see a half-written file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .graph import AttributedGraph
from .intervention import InterventionTrace, pareto_points
from .metrics import DisparityReport, GraphSummary, GroupMetrics

GROUP_FIELDS = ["group", "isolation", "diameter", "control"]
DISPARITY_FIELDS = ["d_isolation", "d_diameter", "d_control"]
EDGE_FIELDS = ["step", "u_ext", "v_ext", "score"]
PARETO_FIELDS = ["strategy", "step", "d_isolation", "sum_isolation", "d_diameter", "sum_diameter"]
GRAPH_ROW = "__graph__"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def metrics_record(gm: GroupMetrics, dr: DisparityReport, summary: GraphSummary, n_excluded: int = 0) -> dict:
    return {
        "groups": {
            g: {
                "size": gm.sizes[g],
                "isolation": gm.isolation[g],
                "diameter": gm.diameter[g],
                "control": gm.control[g],
            }
            for g in gm.labels
        },
        "disparity": {
            "d_isolation": dr.isolation,
            "d_diameter": dr.diameter,
            "d_control": dr.control,
            "argmax_pair": {k: list(v) for k, v in dr.argmax_pair.items()},
            "disadvantaged_group": dr.disadvantaged_group,
        },
        "graph": {
            "r_tot": summary.r_tot,
            "r_diam": summary.r_diam,
            "spectral_gap": summary.spectral_gap,
            "volume": summary.volume,
            "n_nodes": summary.n_nodes,
            "n_edges": summary.n_edges,
            "n_excluded": n_excluded,
        },
    }


def metrics_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


def metrics_csv(gm: GroupMetrics, dr: DisparityReport, summary: GraphSummary) -> str:
    """One row per group plus a graph row.

    The graph row holds ``R_tot(G)``, ``R_diam(G)``, the mean node control
    and the three disparities.
    """
    rows = [[g, _num(gm.isolation[g]), _num(gm.diameter[g]), _num(gm.control[g]), "", "", ""] for g in gm.labels]
    mean_control = 2.0 - 2.0 / summary.n_nodes
    rows.append(
        [GRAPH_ROW, _num(summary.r_tot), _num(summary.r_diam), _num(mean_control)]
        + [_num(dr.isolation), _num(dr.diameter), _num(dr.control)]
    )
    return _csv(GROUP_FIELDS + DISPARITY_FIELDS, rows)


def edges_csv(trace: InterventionTrace, g: AttributedGraph) -> str:
    ids = g.node_ids
    return _csv(EDGE_FIELDS, [[e.step, ids[e.u], ids[e.v], _num(e.score)] for e in trace.added_edges])


def evolution_header(labels: list[str]) -> list[str]:
    cols = ["step"]
    for g in labels:
        cols += [f"isolation_{g}", f"diameter_{g}", f"control_{g}"]
    return cols + DISPARITY_FIELDS + ["r_tot", "r_diam", "spectral_gap"]


def evolution_csv(trace: InterventionTrace) -> str:
    labels = trace.snapshots[0].groups.labels
    rows = []
    for s in trace.snapshots:
        row = [s.step]
        for g in labels:
            row += [_num(s.groups.isolation[g]), _num(s.groups.diameter[g]), _num(s.groups.control[g])]
        row += [_num(s.disparity.isolation), _num(s.disparity.diameter), _num(s.disparity.control)]
        row += [_num(s.summary.r_tot), _num(s.summary.r_diam), _num(s.summary.spectral_gap)]
        rows.append(row)
    return _csv(evolution_header(labels), rows)


def pareto_csv(traces: list[InterventionTrace]) -> str:
    rows = [[r["strategy"], r["step"]] + [_num(r[k]) for k in PARETO_FIELDS[2:]] for r in pareto_points(traces)]
    return _csv(PARETO_FIELDS, rows)
