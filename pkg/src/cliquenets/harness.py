"""Experiment orchestration: parameter sweeps, paired run variants
(grown / defect-removed / matched random removal), per-run analyses and
file-level aggregation.

Each (cell, seed) job grows one assembly, derives the requested variants,
runs the enabled analyses and writes one directory per variant.  Aggregates
are recomputed purely from the files on disk, so re-aggregation is
idempotent.
"""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as cio
from .core import AssemblyState, LabeledGraph
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

GROWN = "grown"
DEFECT_REMOVED = "defect-removed"
RAND_C = "rand-c"
VARIANTS = (GROWN, DEFECT_REMOVED, RAND_C)

# Stream offsets for per-run derived seeds.
_RANDC_TAG = 0x52414E44
_HYP_TAG = 0x48595042


@dataclass(frozen=True)
class PlanCell:
    nu: float
    p_defect: float
    variants: tuple[str, ...] = (GROWN,)
    alpha: float = 2.0

    def label(self) -> str:
        return f"nu{self.nu:+g}_p{self.p_defect:g}"


@dataclass
class ExperimentPlan:
    cells: list[PlanCell]
    seeds: tuple[int, ...]
    target_nodes: int
    out_dir: Path
    mode: str = "contamination"
    analyses: tuple[str, ...] = ("qtop", "hyperbolicity", "metrics")
    samples: int = DEFAULT_SAMPLES
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD
    restarts: int = 5
    with_modularity: bool = True
    jobs: int = 1

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        for cell in self.cells:
            for v in cell.variants:
                if v not in VARIANTS:
                    raise ValueError(f"unknown variant {v!r}")


@dataclass
class RunRecord:
    nu: float
    p_defect: float
    seed: int
    variant: str
    paths: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    error: Optional[str] = None


def variant_tag(cell_p: float, variant: str) -> str:
    """Metrics-row tag for a cell variant."""
    if variant == GROWN:
        return "base" if cell_p == 0.0 else "defect"
    return variant


def event_series_report(state: AssemblyState, path) -> None:
    """Write the per-step time series (one row per placed simplex)."""
    cio.write_events(path, state.event_log)


def _analyze_variant(
    graph,
    out: Path,
    plan_args: dict,
    variant: str,
    seed: int,
    config_echo: dict,
    timings: dict,
) -> dict:
    paths = {}
    analyses = plan_args["analyses"]
    if "qtop" in analyses:
        t0 = time.perf_counter()
        cx = maximal_cliques(graph)
        sv = structure_vectors(cx)
        fv = f_vector(graph, cx)
        paths["qtop"] = str(out / "qtop.csv")
        cio.write_qtop_csv(paths["qtop"], sv, fv)
        timings[f"{variant}.qtop"] = time.perf_counter() - t0
    needs_dm = "hyperbolicity" in analyses or "metrics" in analyses
    if not needs_dm:
        return paths
    t0 = time.perf_counter()
    lg, _sizes = largest_component(graph)
    dm = distance_matrix(lg)
    timings[f"{variant}.apsp"] = time.perf_counter() - t0
    if "hyperbolicity" in analyses:
        t0 = time.perf_counter()
        if lg.node_count <= plan_args["exhaustive_threshold"]:
            prof = hyperbolicity_profile(
                dm, exhaustive_threshold=plan_args["exhaustive_threshold"]
            )
        else:
            hyp_seed = int(
                np.random.SeedSequence([seed, _HYP_TAG]).generate_state(1)[0]
            )
            prof = hyperbolicity_profile(
                dm, samples=plan_args["samples"], seed=hyp_seed
            )
        paths["hyp"] = str(out / "hyp.csv")
        paths["pdist"] = str(out / "pdist.csv")
        cio.write_hyp_csv(paths["hyp"], prof)
        cio.write_pdist_csv(paths["pdist"], prof.p_of_d)
        timings[f"{variant}.hyp"] = time.perf_counter() - t0
    if "metrics" in analyses:
        t0 = time.perf_counter()
        row = metrics_row(
            graph,
            dm,
            variant=variant,
            config=config_echo,
            seed=seed,
            restarts=plan_args["restarts"],
            with_modularity=plan_args["with_modularity"],
            largest=lg if lg.node_count != graph.node_count else None,
        )
        paths["metrics"] = str(out / "metrics.csv")
        cio.write_metrics_csv(paths["metrics"], [row])
        cio.write_metrics_json(out / "metrics.json", [row])
        timings[f"{variant}.metrics"] = time.perf_counter() - t0
    return paths


def _execute_run(args: tuple[dict, int, dict]) -> list[dict]:
    """Worker: one (cell, seed) job.  Returns RunRecord dicts."""
    cell_d, seed, plan_args = args
    variants = cell_d["variants"]
    records: list[dict] = []
    base = Path(plan_args["out_dir"]) / (
        f"nu{cell_d['nu']:+g}_p{cell_d['p_defect']:g}" + f"/seed{seed}"
    )
    try:
        config = GrowthConfig(
            target_nodes=plan_args["target_nodes"],
            nu=cell_d["nu"],
            p_defect=cell_d["p_defect"],
            alpha=cell_d["alpha"],
            seed=seed,
            compatibility_mode=plan_args["mode"],
        )
        timings: dict = {}
        t0 = time.perf_counter()
        state = grow(config)
        timings["grow"] = time.perf_counter() - t0
        grown_graph = state.graph
        for variant in variants:
            out = base / variant
            out.mkdir(parents=True, exist_ok=True)
            rec = RunRecord(
                nu=cell_d["nu"],
                p_defect=cell_d["p_defect"],
                seed=seed,
                variant=variant_tag(cell_d["p_defect"], variant),
            )
            try:
                if variant == GROWN:
                    graph = grown_graph
                    rec.paths.update(cio.write_run(out, state))
                elif variant == DEFECT_REMOVED:
                    graph, report = remove_defect_edges(grown_graph)
                    cio.write_graph(out / "graph.edges", graph, config, seed)
                    (out / "transform.json").write_text(
                        json.dumps(asdict(report), sort_keys=True) + "\n"
                    )
                    rec.paths["graph"] = str(out / "graph.edges")
                else:  # RAND_C: remove as many random edges as there are defects
                    rc_seed = np.random.SeedSequence([seed, _RANDC_TAG])
                    graph, report = remove_random_edges(
                        grown_graph,
                        grown_graph.defect_edge_count,
                        np.random.default_rng(rc_seed),
                    )
                    # The comparator graph is a topology-only control: bond
                    # labels are dropped (removed types live in the report).
                    graph = LabeledGraph.from_edges(
                        graph.node_count,
                        [(u, v, 0) for u, v, _ in graph.edges()],
                    )
                    cio.write_graph(out / "graph.edges", graph, config, seed)
                    (out / "transform.json").write_text(
                        json.dumps(asdict(report), sort_keys=True) + "\n"
                    )
                    rec.paths["graph"] = str(out / "graph.edges")
                rec.paths.update(
                    _analyze_variant(
                        graph, out, plan_args, variant, seed,
                        config.to_dict(), timings,
                    )
                )
                rec.timings = dict(timings)
                (out / "record.json").write_text(
                    json.dumps(asdict(rec), sort_keys=True) + "\n"
                )
            except Exception:
                rec.error = traceback.format_exc()
            records.append(asdict(rec))
    except Exception:
        records.append(
            asdict(
                RunRecord(
                    nu=cell_d["nu"],
                    p_defect=cell_d["p_defect"],
                    seed=seed,
                    variant="grow",
                    error=traceback.format_exc(),
                )
            )
        )
    return records


def run_plan(plan: ExperimentPlan) -> list[RunRecord]:
    """Execute every (cell, seed) job, in parallel when ``jobs > 1``.

    Failures are recorded per run without aborting the sweep.
    """
    plan_args = {
        "out_dir": str(plan.out_dir),
        "target_nodes": plan.target_nodes,
        "mode": plan.mode,
        "analyses": tuple(plan.analyses),
        "samples": plan.samples,
        "exhaustive_threshold": plan.exhaustive_threshold,
        "restarts": plan.restarts,
        "with_modularity": plan.with_modularity,
    }
    jobs = [
        (asdict(cell), seed, plan_args)
        for cell in plan.cells
        for seed in plan.seeds
    ]
    results: list[dict] = []
    if plan.jobs > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            for recs in pool.map(_execute_run, jobs):
                results.extend(recs)
    else:
        for job in jobs:
            results.extend(_execute_run(job))
    return [RunRecord(**r) for r in results]


# -- file-level aggregation --------------------------------------------------


def _read_csv_with_header(path: Path) -> tuple[dict, list[str], list[list[str]]]:
    meta: dict = {}
    header: list[str] = []
    rows: list[list[str]] = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            for item in line[1:].strip().split():
                k, _, v = item.partition("=")
                meta[k] = v
            continue
        if not header:
            header = line.split(",")
            continue
        rows.append(line.split(","))
    return meta, header, rows


def collect_metrics(sweep_dir) -> list[dict]:
    """All metrics rows found under a sweep directory."""
    out = []
    for path in sorted(Path(sweep_dir).glob("nu*_p*/seed*/*/metrics.csv")):
        _, header, rows = _read_csv_with_header(path)
        cell, seed_part, variant = path.parts[-4], path.parts[-3], path.parts[-2]
        for row in rows:
            d = dict(zip(header, row))
            d["cell"] = cell
            d["variant_dir"] = variant
            d["seed"] = int(seed_part.removeprefix("seed"))
            out.append(d)
    return out


def collect_summaries(sweep_dir, name: str) -> list[dict]:
    """Header summaries (# key=value) of qtop.csv or hyp.csv files."""
    out = []
    for path in sorted(Path(sweep_dir).glob(f"nu*_p*/seed*/*/{name}")):
        meta, _, _ = _read_csv_with_header(path)
        meta["cell"] = path.parts[-4]
        meta["variant_dir"] = path.parts[-2]
        meta["seed"] = int(path.parts[-3].removeprefix("seed"))
        out.append(meta)
    return out


def aggregate_metrics(sweep_dir, out_name: str = "metrics_ensemble.csv") -> Path:
    """Mean/std of the numeric metrics per (cell, variant), written at the
    sweep root; a pure function of the per-run files."""
    rows = collect_metrics(sweep_dir)
    numeric = ("c", "k_avg", "l_avg", "clustering", "modularity",
               "diameter", "components", "N", "E")
    groups: dict[tuple[str, str], list[dict]] = {}
    for r in rows:
        groups.setdefault((r["cell"], r["variant"]), []).append(r)
    lines = ["cell,variant,n_runs," + ",".join(
        f"{c}_mean,{c}_std" for c in numeric)]
    for (cell, variant), members in sorted(groups.items()):
        vals = []
        for c in numeric:
            xs = [float(m[c]) for m in members if m[c] != ""]
            if xs:
                vals += [repr(float(np.mean(xs))), repr(float(np.std(xs)))]
            else:
                vals += ["", ""]
        lines.append(f"{cell},{variant},{len(members)}," + ",".join(vals))
    out = Path(sweep_dir) / out_name
    out.write_text("\n".join(lines) + "\n")
    return out


# -- presets -----------------------------------------------------------------

TABLE1_NUS = (5.0, 0.0, -5.0)
TABLE1_P = 0.7
FIG_PS = (0.0, 0.5, 0.7)


def table1_cells() -> list[PlanCell]:
    cells = []
    for nu in TABLE1_NUS:
        cells.append(PlanCell(nu=nu, p_defect=0.0, variants=(GROWN,)))
        cells.append(
            PlanCell(
                nu=nu, p_defect=TABLE1_P,
                variants=(GROWN, DEFECT_REMOVED, RAND_C),
            )
        )
    return cells


def fig_cells() -> list[PlanCell]:
    cells = []
    for nu in TABLE1_NUS:
        for p in FIG_PS:
            variants = (GROWN,) if p == 0.0 else (GROWN, DEFECT_REMOVED)
            cells.append(PlanCell(nu=nu, p_defect=p, variants=variants))
    return cells


def _variant_label(p: str, variant: str) -> str:
    if variant == GROWN:
        return p
    if variant == DEFECT_REMOVED:
        return f"{p}-db"
    return "rand-c"


def run_table1(
    out_dir,
    seeds: tuple[int, ...] = tuple(range(20)),
    metrics_nodes: int = 5000,
    topo_nodes: int = 1000,
    mode: str = "contamination",
    jobs: int = 1,
    samples: int = DEFAULT_SAMPLES,
    restarts: int = 5,
) -> Path:
    """Summary-table preset: graph measures at ``metrics_nodes``, plus
    hyperbolicity and Q-analysis summaries at ``topo_nodes``."""
    out_dir = Path(out_dir)
    metrics_plan = ExperimentPlan(
        cells=table1_cells(),
        seeds=seeds,
        target_nodes=metrics_nodes,
        out_dir=out_dir / "metrics",
        mode=mode,
        analyses=("metrics",),
        restarts=restarts,
        jobs=jobs,
    )
    topo_plan = ExperimentPlan(
        cells=table1_cells(),
        seeds=seeds,
        target_nodes=topo_nodes,
        out_dir=out_dir / "topo",
        mode=mode,
        analyses=("qtop", "hyperbolicity"),
        samples=samples,
        jobs=jobs,
    )
    recs = run_plan(metrics_plan) + run_plan(topo_plan)
    failures = [r for r in recs if r.error]
    aggregate_metrics(out_dir / "metrics")

    m_rows = collect_metrics(out_dir / "metrics")
    hyp = collect_summaries(out_dir / "topo", "hyp.csv")
    qtop = collect_summaries(out_dir / "topo", "qtop.csv")

    def group(rows, key_fields, val_field, conv=float):
        g: dict[tuple, list] = {}
        for r in rows:
            g.setdefault(tuple(r[k] for k in key_fields), []).append(
                conv(r[val_field])
            )
        return g

    lines = [
        "nu,p,c,k_avg,l_avg,clustering,modularity,diameter,"
        "delta_max,q_star,tsv_before,n_runs"
    ]
    singles = [lines[0]]
    for nu in TABLE1_NUS:
        for p, variant_dirs in ((0.0, (GROWN,)), (TABLE1_P, (GROWN, DEFECT_REMOVED, RAND_C))):
            cell = f"nu{nu:+g}_p{p:g}"
            for vd in variant_dirs:
                label = _variant_label(f"{p:g}", vd)
                mm = [r for r in m_rows if r["cell"] == cell and r["variant_dir"] == vd]
                hh = [r for r in hyp if r["cell"] == cell and r["variant_dir"] == vd]
                qq = [r for r in qtop if r["cell"] == cell and r["variant_dir"] == vd]
                if not mm:
                    continue

                def mean(rows, f):
                    return float(np.mean([float(r[f]) for r in rows]))

                vals = [
                    f"{nu:+g}", label,
                    repr(mean(mm, "c")), repr(mean(mm, "k_avg")),
                    repr(mean(mm, "l_avg")), repr(mean(mm, "clustering")),
                    repr(mean(mm, "modularity")) if mm[0]["modularity"] != "" else "",
                    repr(mean(mm, "diameter")),
                    repr(mean(hh, "delta_G")) if hh else "",
                    repr(mean(qq, "q_star")) if qq else "",
                    repr(mean(qq, "tsv_before")) if qq else "",
                    str(len(mm)),
                ]
                lines.append(",".join(vals))
                s0 = min(int(r["seed"]) for r in mm)
                m0 = [r for r in mm if int(r["seed"]) == s0]
                h0 = [r for r in hh if int(r["seed"]) == s0]
                q0 = [r for r in qq if int(r["seed"]) == s0]
                singles.append(",".join([
                    f"{nu:+g}", label,
                    m0[0]["c"], m0[0]["k_avg"], m0[0]["l_avg"],
                    m0[0]["clustering"], m0[0]["modularity"],
                    m0[0]["diameter"],
                    h0[0]["delta_G"] if h0 else "",
                    q0[0]["q_star"] if q0 else "",
                    q0[0]["tsv_before"] if q0 else "",
                    "1",
                ]))
    table = out_dir / "table1.csv"
    table.write_text("\n".join(lines) + "\n")
    (out_dir / "table1_single.csv").write_text("\n".join(singles) + "\n")
    if failures:
        raise RuntimeError(
            f"{len(failures)} runs failed; first error:\n{failures[0].error}"
        )
    return table


def _run_fig_sweep(
    out_dir, seeds, nodes, mode, jobs, analyses, samples=DEFAULT_SAMPLES
) -> list[RunRecord]:
    plan = ExperimentPlan(
        cells=fig_cells(),
        seeds=seeds,
        target_nodes=nodes,
        out_dir=Path(out_dir) / "runs",
        mode=mode,
        analyses=analyses,
        samples=samples,
        jobs=jobs,
    )
    recs = run_plan(plan)
    failures = [r for r in recs if r.error]
    if failures:
        raise RuntimeError(
            f"{len(failures)} runs failed; first error:\n{failures[0].error}"
        )
    return recs


def _fig_groups(out_dir, name: str):
    """Yield (nu, label, per-seed csv rows) for every fig cell variant."""
    runs = Path(out_dir) / "runs"
    for nu in TABLE1_NUS:
        for p in FIG_PS:
            variants = (GROWN,) if p == 0.0 else (GROWN, DEFECT_REMOVED)
            for vd in variants:
                label = _variant_label(f"{p:g}", vd)
                per_seed = []
                for path in sorted(runs.glob(f"nu{nu:+g}_p{p:g}/seed*/{vd}/{name}")):
                    per_seed.append(_read_csv_with_header(path))
                if per_seed:
                    yield nu, label, per_seed


def run_fig2(out_dir, seeds=(0, 1, 2, 3, 4), nodes: int = 1000,
             mode: str = "contamination", jobs: int = 1) -> Path:
    """Face-census preset: mean f_q vs q per cell variant."""
    out_dir = Path(out_dir)
    _run_fig_sweep(out_dir, seeds, nodes, mode, jobs, analyses=("qtop",))
    lines = ["nu,variant,q,f_q"]
    for nu, label, per_seed in _fig_groups(out_dir, "qtop.csv"):
        acc: dict[int, list[float]] = {}
        for _, _, rows in per_seed:
            for row in rows:
                acc.setdefault(int(row[0]), []).append(float(row[4]))
        for q in sorted(acc):
            lines.append(f"{nu:+g},{label},{q},{repr(float(np.mean(acc[q])))}")
    out = out_dir / "fig2.csv"
    out.write_text("\n".join(lines) + "\n")
    return out


def run_fig4(out_dir, seeds=(0, 1, 2, 3, 4), nodes: int = 1000,
             mode: str = "contamination", jobs: int = 1) -> Path:
    """Structure-vector preset: mean FSV/SSV/TSV vs q per cell variant."""
    out_dir = Path(out_dir)
    _run_fig_sweep(out_dir, seeds, nodes, mode, jobs, analyses=("qtop",))
    lines = ["nu,variant,q,Q_q,n_q,TSV_q"]
    for nu, label, per_seed in _fig_groups(out_dir, "qtop.csv"):
        acc: dict[int, list[tuple[float, float, float]]] = {}
        for _, _, rows in per_seed:
            for row in rows:
                acc.setdefault(int(row[0]), []).append(
                    (float(row[1]), float(row[2]), float(row[3]))
                )
        for q in sorted(acc):
            a = np.array(acc[q])
            lines.append(
                f"{nu:+g},{label},{q},{repr(float(a[:,0].mean()))},"
                f"{repr(float(a[:,1].mean()))},{repr(float(a[:,2].mean()))}"
            )
    out = out_dir / "fig4.csv"
    out.write_text("\n".join(lines) + "\n")
    return out


def run_fig5(out_dir, seeds=(0, 1, 2, 3, 4), nodes: int = 1000,
             mode: str = "contamination", jobs: int = 1,
             samples: int = DEFAULT_SAMPLES) -> Path:
    """Distance-distribution and gap-profile preset."""
    out_dir = Path(out_dir)
    _run_fig_sweep(out_dir, seeds, nodes, mode, jobs,
                   analyses=("hyperbolicity",), samples=samples)
    lines = ["nu,variant,d,P"]
    for nu, label, per_seed in _fig_groups(out_dir, "pdist.csv"):
        acc: dict[int, list[float]] = {}
        for _, _, rows in per_seed:
            for row in rows:
                acc.setdefault(int(row[0]), []).append(float(row[1]))
        n_seeds = len(per_seed)
        for d in sorted(acc):
            # Distances absent in a run contribute probability zero.
            mean = sum(acc[d]) / n_seeds
            lines.append(f"{nu:+g},{label},{d},{repr(mean)}")
    (out_dir / "fig5_pdist.csv").write_text("\n".join(lines) + "\n")
    lines = ["nu,variant,d_min,delta_max"]
    for nu, label, per_seed in _fig_groups(out_dir, "hyp.csv"):
        acc = {}
        for _, _, rows in per_seed:
            for row in rows:
                acc.setdefault(int(row[0]), []).append(float(row[1]))
        for dmin in sorted(acc):
            lines.append(
                f"{nu:+g},{label},{dmin},{repr(float(np.mean(acc[dmin])))}"
            )
    out = out_dir / "fig5_delta.csv"
    out.write_text("\n".join(lines) + "\n")
    return out
