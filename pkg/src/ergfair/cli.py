"""Command-line entry point: ``ergfair {analyze,intervene,compare}``.

Data goes to files in ``--out``; progress goes to stderr; a short summary
table is printed to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .cache import CACHE_ENV, cached_laplacian_state
from .graph import GraphError, largest_connected_component, partition_by_attribute
from .intervention import InterventionConfig, InterventionTrace, Strategy, run_intervention
from .io import ParseError, load_graph
from .metrics import disparity_report, graph_summary, group_metrics, node_metrics
from .outputs import atomic_write_text, edges_csv, evolution_csv, metrics_csv, metrics_json, metrics_record, pareto_csv
from .spectral import SingularLaplacianError, laplacian_state, resistance_matrix

log = logging.getLogger("ergfair")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_DISCONNECTED = 4
EXIT_GROUPS = 5
EXIT_EXHAUSTED = 6
EXIT_OUTPUT_EXISTS = 7
EXIT_IO = 8
EXIT_STRATEGY_FAILED = 9

DEFAULTS = {
    "edges": None,
    "attrs": None,
    "attr": "gender",
    "strategy": None,
    "budget": 0,
    "seed": 0,
    "snapshot_every": 1,
    "out": None,
    "refresh_interval": 100,
    "force": False,
    "cache": False,
    "method": "woodbury",
    "spectral_gap": True,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    edges: Path
    attrs: Path
    attr: str
    out: Path
    strategies: list[Strategy] = field(default_factory=list)
    budget: int = 0
    seed: int = 0
    snapshot_every: int = 1
    refresh_interval: int = 100
    force: bool = False
    cache: bool = False
    method: str = "woodbury"
    spectral_gap: bool = True

    def intervention(self, strategy: Strategy) -> InterventionConfig:
        return InterventionConfig(
            budget=self.budget,
            strategy=strategy,
            snapshot_every=min(self.snapshot_every, max(self.budget, 1)),
            seed=self.seed,
            refresh_interval=self.refresh_interval,
            method=self.method,
            spectral_gap_in_snapshots=self.spectral_gap,
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with option values; flags override it")
    common.add_argument("--edges", type=Path, help="edge list file")
    common.add_argument("--attrs", type=Path, help="attribute CSV with header node,<attr>")
    common.add_argument("--attr", help="attribute column name (default: gender)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--refresh-interval", dest="refresh_interval", type=int,
                        help="full pseudo-inverse recompute every N rank-one updates")
    common.add_argument("--force", action="store_const", const=True, help="overwrite existing outputs")
    common.add_argument("--cache", action="store_const", const=True,
                        help=f"reuse pseudo-inverses from ${CACHE_ENV}")
    common.add_argument("--no-spectral-gap", dest="spectral_gap", action="store_const", const=False,
                        help="skip the lambda_2 eigenvalue in snapshots")
    common.add_argument("-v", "--verbose", action="count", default=0)

    run = argparse.ArgumentParser(add_help=False)
    choices = [s.value for s in Strategy]
    run.add_argument("--strategy", action="append", help=f"one of {', '.join(choices)}; comma lists allowed")
    run.add_argument("--budget", type=int, help="number of edges to add")
    run.add_argument("--seed", type=int, help="seed for randomized strategies")
    run.add_argument("--snapshot-every", dest="snapshot_every", type=int, help="record metrics every N steps")
    run.add_argument("--method", choices=["woodbury", "recompute"],
                     help="rank-one updates (default) or a full recompute per step")

    parser = argparse.ArgumentParser(prog="ergfair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="group metrics and disparities of a graph")
    sub.add_parser("intervene", parents=[common, run], help="run one edge-augmentation strategy")
    sub.add_parser("compare", parents=[common, run], help="run several strategies on the same graph")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = dict(DEFAULTS)
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}", EXIT_VALIDATION) from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}", EXIT_VALIDATION)
        values.update(loaded)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    for key in ("edges", "attrs", "out"):
        if values[key] is None:
            raise CliError(f"--{key} is required", EXIT_VALIDATION)
    strategies = values["strategy"] or []
    if isinstance(strategies, str):
        strategies = [strategies]
    names = [s.strip() for item in strategies for s in str(item).split(",") if s.strip()]
    try:
        parsed = [Strategy(s.lower()) for s in names]
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from exc

    if args.command == "intervene" and len(parsed) != 1:
        raise CliError("intervene needs exactly one --strategy", EXIT_VALIDATION)
    if args.command == "compare" and len(parsed) < 2:
        raise CliError("compare needs at least two strategies", EXIT_VALIDATION)
    if len(set(parsed)) != len(parsed):
        raise CliError("duplicate strategies", EXIT_VALIDATION)
    for key in ("budget", "seed"):
        if int(values[key]) < 0:
            raise CliError(f"--{key} must be non-negative", EXIT_VALIDATION)
    for key in ("snapshot_every", "refresh_interval"):
        if int(values[key]) < 1:
            raise CliError(f"--{key.replace('_', '-')} must be positive", EXIT_VALIDATION)

    return RunConfig(
        command=args.command,
        edges=Path(values["edges"]),
        attrs=Path(values["attrs"]),
        attr=str(values["attr"]),
        out=Path(values["out"]),
        strategies=parsed,
        budget=int(values["budget"]),
        seed=int(values["seed"]),
        snapshot_every=int(values["snapshot_every"]),
        refresh_interval=int(values["refresh_interval"]),
        force=bool(values["force"]),
        cache=bool(values["cache"]),
        method=str(values["method"]),
        spectral_gap=bool(values["spectral_gap"]),
    )


def _planned_outputs(cfg: RunConfig) -> list[Path]:
    if cfg.command == "analyze":
        return [cfg.out / "metrics.json", cfg.out / "metrics.csv"]
    if cfg.command == "intervene":
        return [cfg.out / n for n in ("metrics.json", "metrics.csv", "edges.csv", "evolution.csv")]
    files = [cfg.out / "pareto.csv"]
    for s in cfg.strategies:
        files += [cfg.out / s.value / "edges.csv", cfg.out / s.value / "evolution.csv"]
    return files


def _prepare(cfg: RunConfig):
    for path, what in ((cfg.edges, "edge list"), (cfg.attrs, "attribute table")):
        if not path.is_file():
            raise CliError(f"{what} not found: {path}", EXIT_VALIDATION)
    existing = [p for p in _planned_outputs(cfg) if p.exists()]
    if existing and not cfg.force:
        raise CliError(f"refusing to overwrite {existing[0]} (use --force)", EXIT_OUTPUT_EXISTS)

    t0 = time.perf_counter()
    try:
        g = load_graph(cfg.edges, cfg.attrs, cfg.attr)
    except ParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE) from exc
    except GraphError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    except OSError as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    n_all, m_all = g.node_count, g.edge_count
    g = largest_connected_component(g)
    log.info("loaded %d nodes / %d edges; largest component %d nodes / %d edges",
             n_all, m_all, g.node_count, g.edge_count)
    try:
        p = partition_by_attribute(g)
    except GraphError as exc:
        raise CliError(str(exc), EXIT_GROUPS) from exc
    if len(p.groups) < 2:
        raise CliError(f"need at least 2 attribute groups, found {p.labels}", EXIT_GROUPS)
    try:
        if cfg.cache:
            state = cached_laplacian_state(g, None, cfg.refresh_interval)
        else:
            state = laplacian_state(g, cfg.refresh_interval)
    except SingularLaplacianError as exc:
        raise CliError(str(exc), EXIT_DISCONNECTED) from exc
    log.info("pseudo-inverse ready in %.2fs", time.perf_counter() - t0)
    return g, p, state


def _print_groups(gm) -> None:
    print(f"{'group':<16}{'R_tot':>12}{'R_diam':>10}{'B_R':>10}")
    for g in gm.labels:
        print(f"{g:<16}{gm.isolation[g]:>12.1f}{gm.diameter[g]:>10.3f}{gm.control[g]:>10.3f}")


def _disparity_row(name: str, dr) -> None:
    print(f"{name:<16}{dr.isolation:>12.2f}{dr.diameter:>10.3f}{dr.control:>10.3f}")


def _disparity_header() -> None:
    print(f"{'':<16}{'dR_tot':>12}{'dR_diam':>10}{'dB_R':>10}")


def cmd_analyze(cfg: RunConfig) -> int:
    g, p, state = _prepare(cfg)
    R = resistance_matrix(state)
    gm = group_metrics(node_metrics(R, g), p)
    dr = disparity_report(gm)
    summary = graph_summary(state, R, g, with_spectral_gap=cfg.spectral_gap)
    _write_metrics(cfg.out, gm, dr, summary, len(p.excluded))
    _print_groups(gm)
    _disparity_header()
    _disparity_row("G (original)", dr)
    return EXIT_OK


def _write_metrics(out: Path, gm, dr, summary, n_excluded: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "metrics.json", metrics_json(metrics_record(gm, dr, summary, n_excluded)))
    atomic_write_text(out / "metrics.csv", metrics_csv(gm, dr, summary))


def _write_trace(out: Path, trace: InterventionTrace, g) -> None:
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "edges.csv", edges_csv(trace, g))
    atomic_write_text(out / "evolution.csv", evolution_csv(trace))


def cmd_intervene(cfg: RunConfig) -> int:
    g, p, state = _prepare(cfg)
    strategy = cfg.strategies[0]
    t0 = time.perf_counter()
    trace = run_intervention(g, p, cfg.intervention(strategy), state)
    log.info("%s: %d edges in %.2fs", strategy.label, len(trace.added_edges), time.perf_counter() - t0)
    _write_trace(cfg.out, trace, g)
    final = trace.final
    _write_metrics(cfg.out, final.groups, final.disparity, final.summary, len(p.excluded))
    _print_groups(final.groups)
    _disparity_header()
    _disparity_row("G (original)", trace.initial.disparity)
    _disparity_row(strategy.label, final.disparity)
    if trace.exhausted:
        log.error("candidate set exhausted after %d of %d edges", len(trace.added_edges), cfg.budget)
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    g, p, state = _prepare(cfg)
    traces = []
    status = EXIT_OK
    _disparity_header()
    for strategy in cfg.strategies:
        try:
            t0 = time.perf_counter()
            trace = run_intervention(g, p, cfg.intervention(strategy), state)
            log.info("%s: %d edges in %.2fs", strategy.label, len(trace.added_edges), time.perf_counter() - t0)
            _write_trace(cfg.out / strategy.value, trace, g)
        except Exception as exc:  # one failing strategy must not abort the rest
            log.error("%s failed: %s", strategy.label, exc)
            status = status or EXIT_STRATEGY_FAILED
            continue
        if not traces:
            _disparity_row("G (original)", trace.initial.disparity)
        _disparity_row(strategy.label, trace.final.disparity)
        traces.append(trace)
        if trace.exhausted:
            status = status or EXIT_EXHAUSTED
    if traces:
        atomic_write_text(cfg.out / "pareto.csv", pareto_csv(traces))
    return status


COMMANDS = {"analyze": cmd_analyze, "intervene": cmd_intervene, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
