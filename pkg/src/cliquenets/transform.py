"""Post-growth structure editing: defect-bond removal, the matched random
removal control, and component extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BondType, LabeledGraph


@dataclass(frozen=True)
class RemovalReport:
    """Outcome of an edge-removal transform; ``removed_defect`` tracks how
    many of the removed edges carried defect bonds."""

    removed: int
    removed_defect: int
    component_count: int
    largest_component_size: int


def _report(graph: LabeledGraph, removed: int, removed_defect: int) -> RemovalReport:
    comps = graph.components()
    return RemovalReport(
        removed=removed,
        removed_defect=removed_defect,
        component_count=len(comps),
        largest_component_size=max((len(c) for c in comps), default=0),
    )


def remove_defect_edges(graph: LabeledGraph) -> tuple[LabeledGraph, RemovalReport]:
    """Delete every defect edge; vertices are kept, pure edges untouched.

    A clique that contained a defect bond breaks into two cliques one order
    lower, glued along their common face.
    """
    out = LabeledGraph()
    out.add_vertices(graph.node_count)
    removed = 0
    for u, v, t in graph.edges():
        if t == BondType.DEFECT:
            removed += 1
        else:
            out.add_edge(u, v, t)
    return out, _report(out, removed, removed)


def remove_random_edges(
    graph: LabeledGraph, count: int, rng: np.random.Generator
) -> tuple[LabeledGraph, RemovalReport]:
    """Delete ``count`` edges chosen uniformly without replacement,
    preserving the bond types of the surviving edges."""
    if count < 0 or count > graph.edge_count:
        raise ValueError(
            f"cannot remove {count} of {graph.edge_count} edges"
        )
    edges = list(graph.edge_types.items())
    drop = set(rng.choice(len(edges), size=count, replace=False).tolist())
    out = LabeledGraph()
    out.add_vertices(graph.node_count)
    removed_defect = 0
    for i, ((u, v), t) in enumerate(edges):
        if i not in drop:
            out.add_edge(u, v, t)
        elif t == BondType.DEFECT:
            removed_defect += 1
    return out, _report(out, count, removed_defect)


def largest_component(
    graph: LabeledGraph,
) -> tuple[LabeledGraph, list[int]]:
    """Induced subgraph on the largest connected component, plus the list of
    component sizes in discovery order.

    Ties go to the component containing the smallest vertex id; component
    vertices keep their relative order, relabeled to ``0..size-1``.
    """
    comps = graph.components()
    if not comps:
        return LabeledGraph(), []
    sizes = [len(c) for c in comps]
    best = sizes.index(max(sizes))  # first maximum: smallest min vertex id
    return graph.induced_subgraph(comps[best]), sizes
