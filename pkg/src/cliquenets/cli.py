"""Command-line interface: grow, transform, analyze and report subcommands.

A plain key-value config file (``key = value`` per line, ``#`` comments) can
seed any subcommand's defaults via ``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, io as cio
from .core import LabeledGraph
from .geometry import (
    DEFAULT_SAMPLES,
    EXHAUSTIVE_THRESHOLD,
    distance_matrix,
    hyperbolicity_profile,
)
from .growth import GrowthConfig, grow
from .metrics import metrics_row
from .qanalysis import f_vector, maximal_cliques, structure_vectors
from .transform import largest_component, remove_defect_edges, remove_random_edges


def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_config_file(path) -> dict:
    """Parse ``key = value`` / ``key: value`` lines into defaults."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                k, _, v = line.partition(sep)
                out[k.strip().replace("-", "_")] = _parse_value(v.strip())
                break
        else:
            raise ValueError(f"config line not key=value: {raw!r}")
    return out


def _build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="cliquenets",
        description="Grow and analyze networks assembled from cliques "
        "with defect bonds.",
    )
    parser.add_argument("--config", help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = []

    p_grow = sub.add_parser("grow", help="run one growth simulation")
    p_grow.add_argument("--nodes", type=int, default=1000)
    p_grow.add_argument("--nu", type=float, default=0.0)
    p_grow.add_argument("--p-defect", type=float, default=0.0)
    p_grow.add_argument("--alpha", type=float, default=2.0)
    p_grow.add_argument("--n-min", type=int, default=2)
    p_grow.add_argument("--n-max", type=int, default=10)
    p_grow.add_argument("--seed", type=int, default=0)
    p_grow.add_argument("--mode", choices=("contamination", "strict"),
                        default="contamination")
    p_grow.add_argument("--out", required=True)
    leaves.append(p_grow)

    p_tr = sub.add_parser("transform", help="edit a grown graph")
    tr_sub = p_tr.add_subparsers(dest="transform_command", required=True)
    p_rd = tr_sub.add_parser("remove-defects", help="delete all defect bonds")
    p_rd.add_argument("--graph", required=True)
    p_rd.add_argument("--out", required=True)
    leaves.append(p_rd)
    p_rr = tr_sub.add_parser(
        "remove-random", help="delete uniformly random edges"
    )
    p_rr.add_argument("--graph", required=True)
    p_rr.add_argument("--count", type=int)
    p_rr.add_argument("--match", help="run.json whose defect count to match")
    p_rr.add_argument("--seed", type=int, default=0)
    p_rr.add_argument("--out", required=True)
    leaves.append(p_rr)

    p_an = sub.add_parser("analyze", help="analyze a graph file")
    an_sub = p_an.add_subparsers(dest="analyze_command", required=True)
    p_qt = an_sub.add_parser("qtop", help="structure vectors and face census")
    p_qt.add_argument("--graph", required=True)
    p_qt.add_argument("--out", required=True)
    leaves.append(p_qt)
    p_hy = an_sub.add_parser("hyperbolicity", help="four-point gap profile")
    p_hy.add_argument("--graph", required=True)
    p_hy.add_argument("--samples", type=int,
                      help="sampled mode with this many quadruples")
    p_hy.add_argument("--exhaustive", action="store_true",
                      help="force exhaustive mode")
    p_hy.add_argument("--exhaustive-threshold", type=int,
                      default=EXHAUSTIVE_THRESHOLD)
    p_hy.add_argument("--seed", type=int, default=0)
    p_hy.add_argument("--out", required=True)
    leaves.append(p_hy)
    p_me = an_sub.add_parser("metrics", help="summary graph measures")
    p_me.add_argument("--graph", required=True)
    p_me.add_argument("--restarts", type=int, default=5)
    p_me.add_argument("--seed", type=int, default=0,
                      help="modularity restart seed")
    p_me.add_argument("--no-modularity", action="store_true")
    p_me.add_argument("--variant", default="base")
    p_me.add_argument("--out", required=True)
    leaves.append(p_me)

    p_rep = sub.add_parser("report", help="multi-run reproduction presets")
    rep_sub = p_rep.add_subparsers(dest="report_command", required=True)
    for name in ("table1", "fig2", "fig4", "fig5"):
        p = rep_sub.add_parser(name)
        p.add_argument("--out", required=True)
        p.add_argument("--seeds", type=int,
                       default=20 if name == "table1" else 5,
                       help="ensemble size (seeds 0..k-1)")
        p.add_argument("--seed", type=int, default=0,
                       help="first seed of the ensemble")
        p.add_argument("--nodes", type=int,
                       default=5000 if name == "table1" else 1000)
        p.add_argument("--mode", choices=("contamination", "strict"),
                       default="contamination")
        p.add_argument("--jobs", type=int, default=1)
        if name == "table1":
            p.add_argument("--topo-nodes", type=int, default=1000)
            p.add_argument("--restarts", type=int, default=5)
        if name in ("table1", "fig5"):
            p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        leaves.append(p)

    return parser, leaves


def _load_graph(path) -> LabeledGraph:
    graph, _meta = cio.read_graph(path)
    return graph


def _cmd_grow(args) -> int:
    config = GrowthConfig(
        target_nodes=args.nodes,
        nu=args.nu,
        p_defect=args.p_defect,
        alpha=args.alpha,
        n_min=args.n_min,
        n_max=args.n_max,
        seed=args.seed,
        compatibility_mode=args.mode,
    )
    state = grow(config)
    paths = cio.write_run(args.out, state)
    print(
        f"grew {state.graph.node_count} nodes, {state.graph.edge_count} edges "
        f"({state.graph.defect_edge_count} defect) in {len(state.placed)} "
        f"steps -> {paths['graph']}"
    )
    return 0


def _cmd_transform(args) -> int:
    graph = _load_graph(args.graph)
    if args.transform_command == "remove-defects":
        result, report = remove_defect_edges(graph)
    else:
        if (args.count is None) == (args.match is None):
            raise ValueError("remove-random needs exactly one of --count / --match")
        count = args.count
        if args.match is not None:
            count = int(cio.read_run_json(args.match)["defect_edges"])
        result, report = remove_random_edges(
            graph, count, np.random.default_rng(args.seed)
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cio.write_graph(out / "graph.edges", result)
    (out / "transform.json").write_text(
        json.dumps(
            {
                "removed": report.removed,
                "component_count": report.component_count,
                "largest_component_size": report.largest_component_size,
            },
            sort_keys=True,
        )
        + "\n"
    )
    print(
        f"removed {report.removed} edges; {report.component_count} components,"
        f" largest {report.largest_component_size} -> {out / 'graph.edges'}"
    )
    return 0


def _cmd_analyze(args) -> int:
    graph = _load_graph(args.graph)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.analyze_command == "qtop":
        cx = maximal_cliques(graph)
        sv = structure_vectors(cx)
        fv = f_vector(graph, cx)
        cio.write_qtop_csv(out / "qtop.csv", sv, fv)
        print(
            f"q*={sv.q_star} TSV(q*-1)={sv.tsv_before:.4g} "
            f"n_0={int(sv.ssv[0])} -> {out / 'qtop.csv'}"
        )
        return 0
    lg, sizes = largest_component(graph)
    dm = distance_matrix(lg)
    if args.analyze_command == "hyperbolicity":
        if args.exhaustive or (
            args.samples is None and lg.node_count <= args.exhaustive_threshold
        ):
            prof = hyperbolicity_profile(
                dm, exhaustive_threshold=args.exhaustive_threshold
            )
        else:
            samples = args.samples if args.samples else DEFAULT_SAMPLES
            prof = hyperbolicity_profile(dm, samples=samples, seed=args.seed)
        cio.write_hyp_csv(out / "hyp.csv", prof)
        cio.write_pdist_csv(out / "pdist.csv", prof.p_of_d)
        print(
            f"delta_G={prof.delta_g} mode={prof.mode} "
            f"quadruples={prof.quadruples} component={lg.node_count}/"
            f"{graph.node_count} -> {out / 'hyp.csv'}"
        )
        return 0
    row = metrics_row(
        graph,
        dm,
        variant=args.variant,
        seed=None,
        restarts=args.restarts,
        modularity_seed=args.seed,
        with_modularity=not args.no_modularity,
        largest=lg if lg.node_count != graph.node_count else None,
    )
    cio.write_metrics_csv(out / "metrics.csv", [row])
    cio.write_metrics_json(out / "metrics.json", [row])
    print(cio.metrics_csv_line(row) + f" -> {out / 'metrics.csv'}")
    return 0


def _cmd_report(args) -> int:
    seeds = tuple(range(args.seed, args.seed + args.seeds))
    if args.report_command == "table1":
        out = harness.run_table1(
            args.out,
            seeds=seeds,
            metrics_nodes=args.nodes,
            topo_nodes=args.topo_nodes,
            mode=args.mode,
            jobs=args.jobs,
            samples=args.samples,
            restarts=args.restarts,
        )
    elif args.report_command == "fig2":
        out = harness.run_fig2(args.out, seeds=seeds, nodes=args.nodes,
                               mode=args.mode, jobs=args.jobs)
    elif args.report_command == "fig4":
        out = harness.run_fig4(args.out, seeds=seeds, nodes=args.nodes,
                               mode=args.mode, jobs=args.jobs)
    else:
        out = harness.run_fig5(args.out, seeds=seeds, nodes=args.nodes,
                               mode=args.mode, jobs=args.jobs,
                               samples=args.samples)
    print(f"report written -> {out}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = _build_parser()
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        defaults = read_config_file(cfg_path)
        for leaf in leaves:
            known = {
                a.dest for a in leaf._actions  # noqa: SLF001
            }
            leaf.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    args = parser.parse_args(argv)
    try:
        if args.command == "grow":
            return _cmd_grow(args)
        if args.command == "transform":
            return _cmd_transform(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "report":
            return _cmd_report(args)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:  # surface a diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
