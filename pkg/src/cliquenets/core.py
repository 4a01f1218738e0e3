"""Typed graph, simplex specs and the incremental clique registry.

The assembly graph is grown by gluing complete subgraphs (simplexes) onto the
existing structure along shared faces: every new edge touches at least one
fresh vertex.  Under that rule any clique of the graph lies inside the vertex
set of some placed simplex, which lets the registry maintain the full clique
census incrementally instead of re-enumerating it each step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING, Iterator, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .growth import GrowthConfig


class BondType(IntEnum):
    PURE = 0
    DEFECT = 1


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """Simple undirected graph whose edges carry a bond type.

    Vertex ids are dense integers ``0..node_count-1``.  Edge identity is the
    unordered vertex pair; a bond's type never changes after insertion.
    Edges iterate in insertion order, which keeps serialized output stable.
    """

    __slots__ = ("adj", "edge_types", "defect_deg", "_defect_count")

    def __init__(self) -> None:
        self.adj: list[set[int]] = []
        self.edge_types: dict[tuple[int, int], BondType] = {}
        self.defect_deg: list[int] = []
        self._defect_count = 0

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return len(self.edge_types)

    @property
    def defect_edge_count(self) -> int:
        return self._defect_count

    def add_vertices(self, k: int = 1) -> int:
        """Append ``k`` fresh vertices; return the first new id."""
        first = len(self.adj)
        for _ in range(k):
            self.adj.append(set())
            self.defect_deg.append(0)
        return first

    def add_edge(self, u: int, v: int, bond: BondType = BondType.PURE) -> None:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < len(self.adj) and 0 <= v < len(self.adj)):
            raise ValueError(f"edge ({u},{v}) references unknown vertex")
        key = _key(u, v)
        if key in self.edge_types:
            raise ValueError(f"parallel edge {key}")
        self.edge_types[key] = BondType(bond)
        self.adj[u].add(v)
        self.adj[v].add(u)
        if bond == BondType.DEFECT:
            self._defect_count += 1
            self.defect_deg[u] += 1
            self.defect_deg[v] += 1

    def has_edge(self, u: int, v: int) -> bool:
        return _key(u, v) in self.edge_types

    def edge_type(self, u: int, v: int) -> BondType:
        return self.edge_types[_key(u, v)]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> set[int]:
        return self.adj[v]

    def edges(self) -> Iterator[tuple[int, int, BondType]]:
        for (u, v), t in self.edge_types.items():
            yield u, v, t

    def defect_edges(self) -> list[tuple[int, int]]:
        return [e for e, t in self.edge_types.items() if t == BondType.DEFECT]

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph()
        g.adj = [s.copy() for s in self.adj]
        g.edge_types = dict(self.edge_types)
        g.defect_deg = list(self.defect_deg)
        g._defect_count = self._defect_count
        return g

    @classmethod
    def from_edges(
        cls, node_count: int, edges: Sequence[tuple[int, int, int]]
    ) -> "LabeledGraph":
        g = cls()
        g.add_vertices(node_count)
        for u, v, t in edges:
            g.add_edge(u, v, BondType(t))
        return g

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, in discovery order.

        Discovery seeds run over increasing vertex id, so the component
        containing the smallest unvisited id always comes first.
        """
        seen = [False] * self.node_count
        comps: list[list[int]] = []
        for s in range(self.node_count):
            if seen[s]:
                continue
            seen[s] = True
            stack = [s]
            comp = [s]
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            comp.sort()
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.node_count <= 1 or len(self.components()) == 1

    def induced_subgraph(self, vertices: Sequence[int]) -> "LabeledGraph":
        """Induced subgraph with vertices relabeled to ``0..len(vertices)-1``
        in the order given."""
        index = {v: i for i, v in enumerate(vertices)}
        g = LabeledGraph()
        g.add_vertices(len(vertices))
        vset = set(vertices)
        for (u, v), t in self.edge_types.items():
            if u in vset and v in vset:
                g.add_edge(index[u], index[v], t)
        return g


def defect_concentration(graph: LabeledGraph) -> float:
    """Fraction of edges whose bond type is defect."""
    if graph.edge_count == 0:
        raise ValueError("defect concentration is undefined on an empty edge set")
    return graph.defect_edge_count / graph.edge_count


@dataclass(frozen=True)
class SimplexSpec:
    """An arriving building block: a clique on ``n`` local vertices
    ``0..n-1``, optionally carrying a single defect edge."""

    n: int
    defect_edge: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("simplex size must be at least 2")
        if self.defect_edge is not None:
            a, b = self.defect_edge
            if not (0 <= a < b < self.n):
                raise ValueError(f"defect edge {self.defect_edge} out of range")

    @property
    def q_max(self) -> int:
        return self.n - 1


def face_subsets(
    spec: SimplexSpec, q: int
) -> list[tuple[tuple[int, ...], bool]]:
    """All faces of order ``q`` of a simplex, as local vertex subsets of size
    ``q+1``, each flagged with whether it contains the defect edge."""
    if not 0 <= q <= spec.q_max - 1:
        raise ValueError(f"face order {q} outside 0..{spec.q_max - 1}")
    out = []
    de = spec.defect_edge
    for sub in itertools.combinations(range(spec.n), q + 1):
        has = de is not None and de[0] in sub and de[1] in sub
        out.append((sub, has))
    return out


@dataclass(frozen=True)
class PlacedSimplex:
    """A simplex after insertion: global vertex ids, its defect edge in
    global coordinates (if any), the step index and the shared face order."""

    vertices: tuple[int, ...]
    defect_edge: Optional[tuple[int, int]]
    t: int
    q: int  # -1 for the initial simplex


@dataclass(frozen=True)
class EventRecord:
    """Per-step growth record; ``sigma`` counts all simplexes and faces."""

    t: int
    n: int
    q: int
    n_a: int
    nodes: int
    edges: int
    simplexes: int
    sigma: int


# Eligibility classes for docking faces.  Classes only degrade over growth
# (defect incidence never decreases), so a face leaving the live lists never
# returns.
CLS_NONE = 0
CLS_PURE = 1  # matches a pure face of the arriving simplex
CLS_DEFECT = 2  # matches a face containing the arriving defect edge

MODE_CONTAMINATION = "contamination"
MODE_STRICT = "strict"


class FaceRec:
    """A clique of the graph tracked by the registry.

    ``defects_in`` counts defect edges inside the face; ``touch`` sums the
    number of incident defect edges over the face's vertices (an internal
    defect edge contributes 2).  ``touch`` is exact while the face is live;
    once a face leaves the live lists it stops receiving updates, since no
    sequence of growth events can revive it.
    """

    __slots__ = ("vertices", "defects_in", "touch", "cls", "pos")

    def __init__(self, vertices: tuple[int, ...], defects_in: int, touch: int):
        self.vertices = vertices
        self.defects_in = defects_in
        self.touch = touch
        self.cls = CLS_NONE
        self.pos = -1

    def __repr__(self) -> str:  # pragma: no cover
        return f"FaceRec({self.vertices}, d={self.defects_in}, t={self.touch})"


def enumerate_cliques(
    graph: LabeledGraph, max_size: int
) -> Iterator[tuple[int, ...]]:
    """Yield every clique of size ``2..max_size`` exactly once, as a sorted
    vertex tuple (ordered-extension enumeration)."""
    n = graph.node_count
    adj_gt = [sorted(w for w in graph.adj[v] if w > v) for v in range(n)]

    def extend(base: tuple[int, ...], cand: list[int]) -> Iterator[tuple[int, ...]]:
        for i, w in enumerate(cand):
            cur = base + (w,)
            yield cur
            if len(cur) < max_size:
                nxt = [x for x in cand[i + 1 :] if x in graph.adj[w]]
                if nxt:
                    yield from extend(cur, nxt)

    for v in range(n):
        if adj_gt[v]:
            yield from extend((v,), adj_gt[v])


class CliqueRegistry:
    """Deduplicated census of all cliques of the graph up to ``max_size``
    vertices, with per-face defect counters and live eligibility lists.

    The live lists hold, per clique size, the faces currently usable as
    docking sites: ``CLS_PURE`` faces serve pure faces of an arriving
    simplex, ``CLS_DEFECT`` faces serve faces carrying its defect edge.
    Under the contamination rule a pure docking face must not touch any
    defect edge at all, and a defect docking face must contain exactly one
    defect edge and touch no other; under the strict rule only the edge-type
    pattern inside the face matters.
    """

    def __init__(self, max_size: int, mode: str = MODE_CONTAMINATION):
        if mode not in (MODE_CONTAMINATION, MODE_STRICT):
            raise ValueError(f"unknown compatibility mode {mode!r}")
        self.max_size = max_size
        self.mode = mode
        self.entries: dict[tuple[int, ...], FaceRec] = {}
        # live[k][cls-1] for cls in (CLS_PURE, CLS_DEFECT)
        self.live: list[list[list[FaceRec]]] = [
            [[], []] for _ in range(max_size + 1)
        ]
        self.membership: list[list[FaceRec]] = []
        self.counts_by_size = [0] * (max_size + 1)

    # -- classification ----------------------------------------------------

    def _classify(self, defects_in: int, touch: int) -> int:
        if self.mode == MODE_STRICT:
            if defects_in == 0:
                return CLS_PURE
            if defects_in == 1:
                return CLS_DEFECT
            return CLS_NONE
        if defects_in == 0 and touch == 0:
            return CLS_PURE
        if defects_in == 1 and touch == 2:
            return CLS_DEFECT
        return CLS_NONE

    def _insert_live(self, rec: FaceRec, cls: int) -> None:
        rec.cls = cls
        lst = self.live[len(rec.vertices)][cls - 1]
        rec.pos = len(lst)
        lst.append(rec)

    def _remove_live(self, rec: FaceRec) -> None:
        lst = self.live[len(rec.vertices)][rec.cls - 1]
        last = lst[-1]
        lst[rec.pos] = last
        last.pos = rec.pos
        lst.pop()
        rec.cls = CLS_NONE
        rec.pos = -1

    # -- growth bookkeeping -------------------------------------------------

    def grow_membership(self, node_count: int) -> None:
        while len(self.membership) < node_count:
            self.membership.append([])

    def note_defect_edge(self, graph: LabeledGraph, u: int, v: int) -> None:
        """Account for a defect edge just added to the graph.

        In contamination mode every live face touching an endpoint becomes
        ineligible (its ``touch`` leaves the eligible value).  In strict mode
        classes depend only on face-internal edges, and a new edge always has
        a fresh endpoint, so existing faces are unaffected.
        """
        self.grow_membership(graph.node_count)
        if self.mode == MODE_STRICT:
            return
        for w in (u, v):
            lst = self.membership[w]
            for rec in lst:
                rec.touch += 1
                if rec.cls != CLS_NONE:
                    self._remove_live(rec)
            lst.clear()

    def add_placed_simplex(
        self,
        graph: LabeledGraph,
        vertices: Sequence[int],
        old_vertices: Sequence[int],
    ) -> None:
        """Register all faces created by a simplex placement.

        ``old_vertices`` is the docking face; every new clique contains at
        least one fresh vertex, so subsets of the docking face are already
        present and are skipped by construction.
        """
        self.grow_membership(graph.node_count)
        verts = sorted(vertices)
        old = sorted(old_vertices)
        old_set = set(old)
        fresh = [v for v in verts if v not in old_set]
        if not fresh:
            return
        # Defect edges among the simplex vertices (usually none or one).
        simplex_defects = [
            (a, b)
            for a, b in itertools.combinations(verts, 2)
            if graph.has_edge(a, b)
            and graph.edge_type(a, b) == BondType.DEFECT
        ]
        dd = graph.defect_deg
        # Docking-face vertices may touch defect edges outside the simplex
        # (level-0 docking is open to every vertex).
        any_touch = any(dd[v] for v in verts)

        fresh_subsets = [
            c
            for r in range(1, len(fresh) + 1)
            for c in itertools.combinations(fresh, r)
        ]
        old_subsets = [
            c for r in range(len(old) + 1) for c in itertools.combinations(old, r)
        ]
        for fs in fresh_subsets:
            for os_ in old_subsets:
                k = len(fs) + len(os_)
                if k < 2 or k > self.max_size:
                    continue
                face = tuple(sorted(fs + os_))
                din = 0
                touch = 0
                if simplex_defects:
                    fset = set(face)
                    din = sum(
                        1 for a, b in simplex_defects if a in fset and b in fset
                    )
                if any_touch:
                    touch = sum(dd[x] for x in face)
                rec = FaceRec(face, din, touch)
                self.entries[face] = rec
                self.counts_by_size[k] += 1
                cls = self._classify(din, touch)
                if cls != CLS_NONE:
                    self._insert_live(rec, cls)
                    for x in face:
                        self.membership[x].append(rec)

    # -- from-scratch construction and verification -------------------------

    def rebuild(self, graph: LabeledGraph) -> None:
        """Recompute the census from scratch by clique enumeration."""
        self.entries.clear()
        self.live = [[[], []] for _ in range(self.max_size + 1)]
        self.membership = [[] for _ in range(graph.node_count)]
        self.counts_by_size = [0] * (self.max_size + 1)
        defect_set = set(graph.defect_edges())
        dd = graph.defect_deg
        for face in enumerate_cliques(graph, self.max_size):
            din = sum(
                1
                for pair in itertools.combinations(face, 2)
                if pair in defect_set
            )
            touch = sum(dd[x] for x in face)
            rec = FaceRec(face, din, touch)
            self.entries[face] = rec
            self.counts_by_size[len(face)] += 1
            cls = self._classify(din, touch)
            if cls != CLS_NONE:
                self._insert_live(rec, cls)
                for x in face:
                    self.membership[x].append(rec)

    def verify(self, graph: LabeledGraph) -> None:
        """Assert the incremental census equals a from-scratch enumeration."""
        fresh = CliqueRegistry(self.max_size, self.mode)
        fresh.rebuild(graph)
        if set(fresh.entries) != set(self.entries):
            missing = set(fresh.entries) - set(self.entries)
            extra = set(self.entries) - set(fresh.entries)
            raise AssertionError(
                f"census mismatch: missing={sorted(missing)[:5]} "
                f"extra={sorted(extra)[:5]}"
            )
        for key, rec in self.entries.items():
            ref = fresh.entries[key]
            # touch is tracked lazily: exact only while the face is live.
            same = (rec.defects_in, rec.cls) == (ref.defects_in, ref.cls) and (
                rec.cls == CLS_NONE or rec.touch == ref.touch
            )
            if not same:
                raise AssertionError(
                    f"face {key}: got (d={rec.defects_in}, t={rec.touch}, "
                    f"cls={rec.cls}), expected (d={ref.defects_in}, "
                    f"t={ref.touch}, cls={ref.cls})"
                )

    @property
    def total_faces(self) -> int:
        return sum(self.counts_by_size[2:])

    def counts(self, size: int) -> tuple[int, int]:
        """(pure-eligible, defect-eligible) face counts at a clique size."""
        pure, dfct = self.live[size]
        return len(pure), len(dfct)


@dataclass
class AssemblyState:
    """Growth state: graph, placed simplexes, per-step log and registry."""

    graph: LabeledGraph
    config: "GrowthConfig"
    rng: np.random.Generator
    registry: CliqueRegistry
    placed: list[PlacedSimplex] = field(default_factory=list)
    event_log: list[EventRecord] = field(default_factory=list)

    @classmethod
    def empty(cls, config: "GrowthConfig", rng: np.random.Generator) -> "AssemblyState":
        return cls(
            graph=LabeledGraph(),
            config=config,
            rng=rng,
            registry=CliqueRegistry(config.n_max, config.compatibility_mode),
        )

    @classmethod
    def from_graph(
        cls,
        graph: LabeledGraph,
        config: "GrowthConfig",
        rng: Optional[np.random.Generator] = None,
    ) -> "AssemblyState":
        """Wrap an existing graph, rebuilding the clique census from scratch."""
        if rng is None:
            rng = np.random.default_rng(config.seed)
        reg = CliqueRegistry(config.n_max, config.compatibility_mode)
        reg.rebuild(graph)
        return cls(graph=graph, config=config, rng=rng, registry=reg)

    @property
    def sigma(self) -> int:
        """Total number of simplexes and faces (cliques of every size ≥ 1)."""
        return self.graph.node_count + self.registry.total_faces

    def verify_census(self) -> None:
        self.registry.verify(self.graph)


def apply_placement(
    state: AssemblyState,
    spec: SimplexSpec,
    shared_locals: tuple[int, ...],
    shared_globals: tuple[int, ...],
) -> EventRecord:
    """Insert a simplex into the assembly.

    ``shared_locals[i]`` is identified with the existing vertex
    ``shared_globals[i]``; the remaining local vertices become fresh nodes.
    All missing edges are inserted with the spec's bond types, the registry
    and logs are updated, and the step's event record is returned.
    """
    graph = state.graph
    if len(shared_locals) != len(shared_globals):
        raise ValueError("shared face mapping length mismatch")
    mapping = dict(zip(shared_locals, shared_globals))
    fresh_locals = sorted(set(range(spec.n)) - set(shared_locals))
    if not fresh_locals:
        raise ValueError("placement must add at least one vertex")
    first = graph.add_vertices(len(fresh_locals))
    for j, loc in enumerate(fresh_locals):
        mapping[loc] = first + j

    de = spec.defect_edge
    new_defects = []
    for i, j in itertools.combinations(range(spec.n), 2):
        gu, gv = mapping[i], mapping[j]
        if graph.has_edge(gu, gv):
            continue
        bond = BondType.DEFECT if de == (i, j) else BondType.PURE
        graph.add_edge(gu, gv, bond)
        if bond == BondType.DEFECT:
            new_defects.append((gu, gv))

    for u, v in new_defects:
        state.registry.note_defect_edge(graph, u, v)
    state.registry.add_placed_simplex(
        graph, [mapping[i] for i in range(spec.n)], shared_globals
    )

    global_defect = None
    if de is not None:
        global_defect = _key(mapping[de[0]], mapping[de[1]])
        assert graph.edge_type(*global_defect) == BondType.DEFECT
    t = len(state.placed)
    q = len(shared_locals) - 1
    state.placed.append(
        PlacedSimplex(
            vertices=tuple(sorted(mapping[i] for i in range(spec.n))),
            defect_edge=global_defect,
            t=t,
            q=q,
        )
    )
    rec = EventRecord(
        t=t,
        n=spec.n,
        q=q,
        n_a=len(fresh_locals),
        nodes=graph.node_count,
        edges=graph.edge_count,
        simplexes=len(state.placed),
        sigma=state.sigma,
    )
    state.event_log.append(rec)
    return rec
