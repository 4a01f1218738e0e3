"""File formats: edge list with bond types, JSON run sidecar, event CSV and
analysis CSVs.

The edge list is one edge per line, ``u v t`` with t in {0 = pure,
1 = defect}; ``#``-prefixed header lines carry the node count, the growth
config and the seed.  All writers emit the same bytes for the same inputs.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import AssemblyState, EventRecord, LabeledGraph
from .growth import GrowthConfig
from .metrics import MetricsRow

PathLike = Union[str, Path]

EVENT_COLUMNS = ("t", "n", "q", "n_a", "nodes", "edges", "simplexes", "sigma")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_graph(
    path: PathLike,
    graph: LabeledGraph,
    config: Optional[GrowthConfig] = None,
    seed: Optional[int] = None,
) -> None:
    lines = [f"# nodes {graph.node_count}"]
    if config is not None:
        kv = " ".join(f"{k}={_fmt(v)}" for k, v in config.to_dict().items())
        lines.append(f"# config {kv}")
    if seed is not None:
        lines.append(f"# seed {seed}")
    for u, v, t in graph.edges():
        lines.append(f"{u} {v} {int(t)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path: PathLike) -> tuple[LabeledGraph, dict]:
    """Read an edge list; returns the graph and the header metadata."""
    meta: dict = {}
    edges = []
    nodes = None
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes"):
                nodes = int(body.split()[1])
            elif body.startswith("seed"):
                meta["seed"] = int(body.split()[1])
            elif body.startswith("config"):
                cfg = {}
                for item in body.split()[1:]:
                    k, _, v = item.partition("=")
                    cfg[k] = v
                meta["config"] = cfg
            continue
        u, v, t = line.split()
        edges.append((int(u), int(v), int(t)))
    if nodes is None:
        nodes = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    graph = LabeledGraph.from_edges(nodes, edges)
    return graph, meta


def write_run_json(path: PathLike, state: AssemblyState) -> None:
    """Sidecar with the config echo, seed and the placed-simplex list."""
    doc = {
        "format": "cliquenets-run/1",
        "config": state.config.to_dict(),
        "seed": state.config.seed,
        "nodes": state.graph.node_count,
        "edges": state.graph.edge_count,
        "defect_edges": state.graph.defect_edge_count,
        "steps": len(state.placed),
        "placed": [
            {
                "t": ps.t,
                "n": len(ps.vertices),
                "q": ps.q,
                "vertices": list(ps.vertices),
                "defect_edge": list(ps.defect_edge) if ps.defect_edge else None,
            }
            for ps in state.placed
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def read_run_json(path: PathLike) -> dict:
    return json.loads(Path(path).read_text())


def write_events(path: PathLike, events: list[EventRecord]) -> None:
    lines = [",".join(EVENT_COLUMNS)]
    for e in events:
        lines.append(
            f"{e.t},{e.n},{e.q},{e.n_a},{e.nodes},{e.edges},"
            f"{e.simplexes},{e.sigma}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_events(path: PathLike) -> list[EventRecord]:
    lines = Path(path).read_text().splitlines()
    assert lines[0] == ",".join(EVENT_COLUMNS), "unexpected events header"
    out = []
    for line in lines[1:]:
        vals = [int(x) for x in line.split(",")]
        out.append(EventRecord(*vals))
    return out


def write_run(dir_: PathLike, state: AssemblyState) -> dict:
    """Write the standard run layout (graph.edges, run.json, events.csv);
    returns the file paths."""
    d = Path(dir_)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "graph": d / "graph.edges",
        "sidecar": d / "run.json",
        "events": d / "events.csv",
    }
    write_graph(paths["graph"], state.graph, state.config, state.config.seed)
    write_run_json(paths["sidecar"], state)
    write_events(paths["events"], state.event_log)
    return {k: str(v) for k, v in paths.items()}


def write_qtop_csv(path: PathLike, sv, fv) -> None:
    """Per-level CSV (q, Q_q, n_q, TSV_q, f_q) with a summary header."""
    n0 = int(sv.ssv[0])
    lines = [
        f"# q_star={sv.q_star} tsv_before={_fmt(sv.tsv_before)} n_0={n0}",
        "q,Q_q,n_q,TSV_q,f_q",
    ]
    for q in range(len(sv.fsv)):
        lines.append(
            f"{q},{int(sv.fsv[q])},{int(sv.ssv[q])},{_fmt(float(sv.tsv[q]))},"
            f"{int(fv.f[q])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_hyp_csv(path: PathLike, profile) -> None:
    """Worst-case gap per d_min, with the summary in the header."""
    lines = [
        f"# delta_G={_fmt(profile.delta_g)} mode={profile.mode} "
        f"quadruples={profile.quadruples} seed={profile.seed}",
        "d_min,delta_max",
    ]
    for dmin, dmax in zip(profile.dmin, profile.delta_max):
        lines.append(f"{int(dmin)},{_fmt(float(dmax))}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_pdist_csv(path: PathLike, p_of_d: np.ndarray) -> None:
    lines = ["d,P"]
    for d, p in enumerate(p_of_d):
        if d == 0:
            continue
        lines.append(f"{d},{_fmt(float(p))}")
    Path(path).write_text("\n".join(lines) + "\n")


METRICS_COLUMNS = (
    "variant",
    "seed",
    "N",
    "E",
    "c",
    "k_avg",
    "l_avg",
    "clustering",
    "modularity",
    "diameter",
    "components",
)


def metrics_csv_line(row: MetricsRow) -> str:
    d = row.as_dict()
    vals = []
    for col in METRICS_COLUMNS:
        v = d[col]
        vals.append("" if v is None else _fmt(v))
    return ",".join(vals)


def write_metrics_csv(path: PathLike, rows: list[MetricsRow]) -> None:
    lines = [",".join(METRICS_COLUMNS)]
    lines += [metrics_csv_line(r) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_metrics_json(path: PathLike, rows: list[MetricsRow]) -> None:
    doc = [
        {**r.as_dict(), "config": r.config}
        for r in rows
    ]
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")
