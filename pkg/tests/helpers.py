"""Shared test utilities: independent brute-force oracles and worker
functions for the ensemble-based acceptance tests.

The oracles deliberately avoid the package's own enumeration code paths:
cliques come from literal subset enumeration over the adjacency matrix,
maximality from the neighborhood definition, and connectivity from a direct
pairwise-intersection BFS.
"""

from __future__ import annotations

import itertools

import numpy as np

from cliquenets.core import BondType, LabeledGraph
from cliquenets.geometry import distance_matrix, hyperbolicity_profile
from cliquenets.growth import GrowthConfig, grow
from cliquenets.metrics import average_path_length, clustering_coefficient
from cliquenets.qanalysis import maximal_cliques, structure_vectors
from cliquenets.transform import largest_component, remove_defect_edges


def adjacency_matrix(graph: LabeledGraph) -> np.ndarray:
    a = np.zeros((graph.node_count, graph.node_count), dtype=bool)
    for u, v, _ in graph.edges():
        a[u, v] = a[v, u] = True
    return a


def random_labeled_graph(
    rng: np.random.Generator,
    n: int,
    density: float,
    p_defect: float = 0.0,
    connected: bool = False,
) -> LabeledGraph:
    g = LabeledGraph()
    g.add_vertices(n)
    if connected:
        order = rng.permutation(n)
        for i in range(1, n):
            u = int(order[i])
            v = int(order[int(rng.integers(i))])
            g.add_edge(u, v, BondType(int(rng.random() < p_defect)))
    for u, v in itertools.combinations(range(n), 2):
        if not g.has_edge(u, v) and rng.random() < density:
            g.add_edge(u, v, BondType(int(rng.random() < p_defect)))
    return g


# -- brute-force oracles -----------------------------------------------------


def brute_force_cliques_by_size(a: np.ndarray) -> dict[int, set[tuple[int, ...]]]:
    """Every clique, by literal enumeration of all vertex subsets
    (vectorized per subset size; stops at the first empty size)."""
    n = a.shape[0]
    out: dict[int, set[tuple[int, ...]]] = {1: {(i,) for i in range(n)}}
    for k in range(2, n + 1):
        combos = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), k)),
            dtype=np.int16,
        ).reshape(-1, k)
        if combos.size == 0:
            break
        ok = np.ones(len(combos), dtype=bool)
        for i in range(k):
            for j in range(i + 1, k):
                ok &= a[combos[:, i], combos[:, j]]
        sel = combos[ok]
        if len(sel) == 0:
            break
        out[k] = {tuple(int(x) for x in row) for row in sel}
    return out


def brute_force_maximal_cliques(a: np.ndarray) -> set[tuple[int, ...]]:
    """Maximal cliques straight from the definition: a clique with no
    outside vertex adjacent to all members."""
    out: set[tuple[int, ...]] = set()
    for cliques in brute_force_cliques_by_size(a).values():
        rows = np.array(sorted(cliques), dtype=np.int64)
        # vertex adjacent to every member (members excluded: diag is False)
        extendable = a[rows].all(axis=1).any(axis=1)
        for row, ext in zip(rows, extendable):
            if not ext:
                out.add(tuple(int(x) for x in row))
    return out


def brute_force_structure_vectors(max_cliques: set[tuple[int, ...]]):
    """FSV/SSV/TSV from the definitions, with per-level BFS over the
    shared-face relation."""
    cl = [frozenset(c) for c in sorted(max_cliques)]
    qmax = max(len(c) for c in cl) - 1
    fsv, ssv, tsv = [], [], []
    for q in range(qmax + 1):
        members = [c for c in cl if len(c) >= q + 1]
        n_q = len(members)
        seen = [False] * n_q
        comps = 0
        for s in range(n_q):
            if seen[s]:
                continue
            comps += 1
            stack = [s]
            seen[s] = True
            while stack:
                i = stack.pop()
                for j in range(n_q):
                    if not seen[j] and len(members[i] & members[j]) >= q + 1:
                        seen[j] = True
                        stack.append(j)
        fsv.append(comps)
        ssv.append(n_q)
        tsv.append(1.0 - comps / n_q)
    return np.array(fsv), np.array(ssv), np.array(tsv)


def bfs_distances(graph: LabeledGraph, source: int) -> list[int]:
    """Plain BFS oracle for the distance matrix."""
    dist = [-1] * graph.node_count
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for w in graph.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def all_partitions(items: list[int]):
    """Every set partition (restricted-growth enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


# -- acceptance ensemble workers (run under a forked process pool) -----------


def grown_delta_worker(args: tuple) -> dict:
    """Grow one assembly and profile its hyperbolicity (criteria 1 and 2)."""
    nu, p, seed, nodes, samples = args
    state = grow(GrowthConfig(target_nodes=nodes, nu=nu, p_defect=p, seed=seed))
    graph = state.graph
    comps = len(graph.components())
    sv = structure_vectors(maximal_cliques(graph))
    dm = distance_matrix(graph)
    if samples is None:
        prof = hyperbolicity_profile(dm)
    else:
        prof = hyperbolicity_profile(dm, samples=samples, seed=seed)
    return {
        "nu": nu, "p": p, "seed": seed, "nodes": nodes,
        "delta_g": prof.delta_g, "components": comps, "q0": int(sv.fsv[0]),
    }


def removal_delta_worker(args: tuple) -> dict:
    """Grow, remove defect edges and profile the largest component
    (criterion 5)."""
    nu, p, seed, nodes, samples = args
    state = grow(GrowthConfig(target_nodes=nodes, nu=nu, p_defect=p, seed=seed))
    stripped, report = remove_defect_edges(state.graph)
    lg, _ = largest_component(stripped)
    dm = distance_matrix(lg)
    prof = hyperbolicity_profile(dm, samples=samples, seed=seed)
    return {
        "nu": nu, "seed": seed, "delta_g": prof.delta_g,
        "component_size": lg.node_count, "removed": report.removed,
    }


def table_metrics_worker(args: tuple) -> dict:
    """Grow one assembly and compute the criterion-6 measures."""
    nu, p, seed, nodes, mode = args
    state = grow(
        GrowthConfig(
            target_nodes=nodes, nu=nu, p_defect=p, seed=seed,
            compatibility_mode=mode,
        )
    )
    graph = state.graph
    dm = distance_matrix(graph)
    return {
        "nu": nu, "p": p, "seed": seed, "mode": mode,
        "k_avg": 2 * graph.edge_count / graph.node_count,
        "l_avg": average_path_length(dm),
        "clustering": clustering_coefficient(graph),
        "diameter": dm.diameter,
        "c": graph.defect_edge_count / graph.edge_count,
    }
