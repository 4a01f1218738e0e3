"""Q-analysis of the clique complex: maximal cliques, incidence matrix,
structure vectors and the per-level face census.

Two maximal cliques are q-connected when they share at least ``q+1``
vertices; q-connectivity extends along chains.  At each topology level
``q`` the analysis restricts to maximal cliques of order >= q and reports
the number of q-connected components (FSV), the clique count (SSV) and the
connectivity degree ``1 - FSV/SSV`` (TSV).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import LabeledGraph


@dataclass(frozen=True)
class CliqueComplex:
    """Maximal cliques of a graph, canonically ordered."""

    cliques: tuple[tuple[int, ...], ...]
    n_vertices: int

    @property
    def q_max_global(self) -> int:
        """Order of the largest clique."""
        return max(len(c) for c in self.cliques) - 1


@dataclass(frozen=True)
class StructureVectors:
    """Per-level connectivity description of a clique complex.

    ``q_star`` is the smallest level ``q >= 1`` where the connectivity
    degree drops to zero (``q_max_global + 1`` when it never does);
    ``tsv_before`` is the connectivity degree one level below it.
    """

    fsv: np.ndarray  # number of q-connected components, per level
    ssv: np.ndarray  # number of cliques of order >= q, per level
    tsv: np.ndarray  # 1 - fsv/ssv, per level
    q_star: int
    tsv_before: float


@dataclass(frozen=True)
class FVector:
    """Counts of distinct cliques per level: ``f[q]`` is the number of
    complete subgraphs on ``q+1`` vertices."""

    f: np.ndarray


def maximal_cliques(graph: LabeledGraph) -> CliqueComplex:
    """Enumerate all maximal cliques (Bron-Kerbosch with pivoting).

    Isolated vertices yield singleton maximal cliques, so every vertex
    appears in at least one clique.  Output is sorted vertex tuples in
    lexicographic order, independent of traversal order.
    """
    adj = graph.adj
    out: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        # Deterministic pivot: most candidate neighbors, lowest id on ties.
        pivot = max(itertools.chain(p, x), key=lambda u: (len(p & adj[u]), -u))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand([], set(range(graph.node_count)), set())
    out.sort()
    return CliqueComplex(cliques=tuple(out), n_vertices=graph.node_count)


def incidence_matrix(complex_: CliqueComplex) -> np.ndarray:
    """Simplex-by-vertex membership matrix: row i, column v is 1 iff vertex
    v belongs to maximal clique i."""
    if not complex_.cliques:
        raise ValueError("empty clique complex")
    lam = np.zeros((len(complex_.cliques), complex_.n_vertices), dtype=np.int8)
    for i, clique in enumerate(complex_.cliques):
        lam[i, list(clique)] = 1
    return lam


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _shared_vertex_counts(
    complex_: CliqueComplex,
) -> dict[tuple[int, int], int]:
    """Pairwise intersection sizes between maximal cliques, via the
    per-vertex inverted index (only intersecting pairs appear)."""
    by_vertex: list[list[int]] = [[] for _ in range(complex_.n_vertices)]
    for i, clique in enumerate(complex_.cliques):
        for v in clique:
            by_vertex[v].append(i)
    counts: dict[tuple[int, int], int] = {}
    for members in by_vertex:
        for a, b in itertools.combinations(members, 2):
            key = (a, b)
            counts[key] = counts.get(key, 0) + 1
    return counts


def structure_vectors(complex_: CliqueComplex) -> StructureVectors:
    """Compute the three structure vectors, q* and the connectivity at the
    level just below q*."""
    if not complex_.cliques:
        raise ValueError("empty clique complex")
    m = len(complex_.cliques)
    orders = np.array([len(c) - 1 for c in complex_.cliques])
    qmax = complex_.q_max_global

    ssv = np.array([int((orders >= q).sum()) for q in range(qmax + 1)])

    # Bucket clique pairs by shared-vertex count, then sweep levels from the
    # top down so each pair is unioned exactly once.
    buckets: list[list[tuple[int, int]]] = [[] for _ in range(qmax + 2)]
    for (a, b), cnt in _shared_vertex_counts(complex_).items():
        buckets[min(cnt, qmax + 1)].append((a, b))

    dsu = _DSU(m)
    fsv = np.zeros(qmax + 1, dtype=np.int64)
    for q in range(qmax, -1, -1):
        for a, b in buckets[q + 1]:
            dsu.union(a, b)
        members = np.nonzero(orders >= q)[0]
        fsv[q] = len({dsu.find(int(i)) for i in members})

    tsv = 1.0 - fsv / ssv
    q_star = qmax + 1
    for q in range(1, qmax + 1):
        if tsv[q] == 0.0:
            q_star = q
            break
    tsv_before = float(tsv[q_star - 1])
    return StructureVectors(
        fsv=fsv, ssv=ssv, tsv=tsv, q_star=q_star, tsv_before=tsv_before
    )


def count_cliques_by_size(graph: LabeledGraph, max_size: int) -> np.ndarray:
    """Number of distinct complete subgraphs of each size ``1..max_size``
    (index 0 unused), by ordered-extension enumeration."""
    counts = np.zeros(max_size + 1, dtype=np.int64)
    counts[1] = graph.node_count
    adj = graph.adj
    adj_gt = [sorted(w for w in adj[v] if w > v) for v in range(graph.node_count)]

    def extend(cand: list[int], size: int) -> None:
        for i, w in enumerate(cand):
            counts[size + 1] += 1
            if size + 1 < max_size:
                nxt = [x for x in cand[i + 1 :] if x in adj[w]]
                if nxt:
                    extend(nxt, size + 1)

    for v in range(graph.node_count):
        if adj_gt[v]:
            extend(adj_gt[v], 1)
    return counts


def f_vector(graph: LabeledGraph, complex_: CliqueComplex) -> FVector:
    """Per-level face census of the clique complex: ``f[0]`` is the node
    count, ``f[1]`` the edge count, and so on up to the largest clique."""
    qmax = complex_.q_max_global
    counts = count_cliques_by_size(graph, qmax + 1)
    return FVector(f=counts[1:].copy())
