"""Stochastic aggregation of cliques with optional defect bonds.

Each step draws a simplex size from a power law, optionally assigns one
defect edge, counts geometrically compatible docking sites per face order,
tilts the level choice by the affinity parameter, and glues the simplex onto
a uniformly chosen compatible site.

Randomness comes from a single ``numpy.random.Generator`` seeded with the
run's 64-bit seed (PCG64, numpy's default bit generator).  Runs are
self-reproducible: identical config and seed give identical output bytes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .core import (
    CLS_DEFECT,
    CLS_PURE,
    MODE_CONTAMINATION,
    MODE_STRICT,
    AssemblyState,
    BondType,
    FaceRec,
    SimplexSpec,
    apply_placement,
)


@dataclass(frozen=True)
class GrowthConfig:
    """Parameters of a growth run."""

    target_nodes: int
    nu: float = 0.0
    p_defect: float = 0.0
    alpha: float = 2.0
    n_min: int = 2
    n_max: int = 10
    seed: int = 0
    compatibility_mode: str = MODE_CONTAMINATION

    def __post_init__(self) -> None:
        if not 2 <= self.n_min <= self.n_max:
            raise ValueError(f"invalid size range [{self.n_min}, {self.n_max}]")
        if not 0.0 <= self.p_defect <= 1.0:
            raise ValueError(f"defect probability {self.p_defect} outside [0, 1]")
        if self.target_nodes < self.n_min:
            raise ValueError("target node count below the minimum simplex size")
        if self.compatibility_mode not in (MODE_CONTAMINATION, MODE_STRICT):
            raise ValueError(f"unknown mode {self.compatibility_mode!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GrowthConfig":
        return cls(**d)


def size_distribution(alpha: float, n_min: int, n_max: int) -> np.ndarray:
    """Normalized probabilities of sizes ``n_min..n_max`` under ``n**-alpha``."""
    sizes = np.arange(n_min, n_max + 1, dtype=float)
    w = sizes**-alpha
    return w / w.sum()


def sample_size(
    alpha: float,
    n_range: tuple[int, int],
    rng: np.random.Generator,
    size: Optional[int] = None,
):
    """Draw simplex sizes with probability proportional to ``n**-alpha``."""
    n_min, n_max = n_range
    if not 2 <= n_min <= n_max:
        raise ValueError(f"invalid size range [{n_min}, {n_max}]")
    probs = size_distribution(alpha, n_min, n_max)
    out = rng.choice(np.arange(n_min, n_max + 1), size=size, p=probs)
    return int(out) if size is None else out


def make_spec(n: int, p: float, rng: np.random.Generator) -> SimplexSpec:
    """Build an arriving simplex: with probability ``p`` one of its
    ``C(n,2)`` edges, chosen uniformly, is a defect bond."""
    if n < 2:
        raise ValueError("simplex size must be at least 2")
    if rng.random() >= p:
        return SimplexSpec(n=n)
    pairs = list(itertools.combinations(range(n), 2))
    i = int(rng.integers(len(pairs)))
    return SimplexSpec(n=n, defect_edge=pairs[i])


@dataclass
class DockingCensus:
    """Per-level docking site counts for one arriving simplex.

    Level 0 sites are all current vertices.  For ``q >= 1`` the eligible
    sites are live (q+1)-cliques from the registry: pure-eligible faces
    always count; defect-eligible faces count only when the arriving simplex
    carries a defect edge.
    """

    c: np.ndarray  # counts for q = 0..q_max-1
    node_count: int
    spec_has_defect: bool
    levels: list  # per q >= 1: (pure list, defect list) registry references

    def eligible_faces(self, q: int) -> list[tuple[int, ...]]:
        """Materialize the eligible face vertex sets at level ``q``."""
        if q == 0:
            return [(v,) for v in range(self.node_count)]
        pure, dfct = self.levels[q]
        faces = [r.vertices for r in pure]
        if self.spec_has_defect:
            faces += [r.vertices for r in dfct]
        return faces

    def pick_face(self, q: int, index: int) -> FaceRec:
        pure, dfct = self.levels[q]
        if index < len(pure):
            return pure[index]
        return dfct[index - len(pure)]


def count_docking_sites(state: AssemblyState, spec: SimplexSpec) -> DockingCensus:
    """Count geometrically similar docking sites per face order."""
    if state.graph.node_count == 0:
        raise ValueError("cannot count docking sites in an empty assembly")
    q_max = spec.q_max
    has_defect = spec.defect_edge is not None
    c = np.zeros(q_max, dtype=np.int64)
    c[0] = state.graph.node_count
    levels: list = [None]
    for q in range(1, q_max):
        pure, dfct = state.registry.live[q + 1]
        levels.append((pure, dfct))
        c[q] = len(pure) + (len(dfct) if has_defect else 0)
    return DockingCensus(
        c=c, node_count=state.graph.node_count,
        spec_has_defect=has_defect, levels=levels,
    )


@dataclass(frozen=True)
class AttachmentDistribution:
    """Normalized attachment-level probabilities for one arriving simplex:
    level ``q`` has weight ``c_q * exp(-nu * (q_max - q))``."""

    probs: np.ndarray

    @property
    def mean_q(self) -> float:
        return float(np.dot(np.arange(len(self.probs)), self.probs))


def attachment_distribution(
    census: DockingCensus, nu: float, q_max: int
) -> AttachmentDistribution:
    """Evaluate the attachment-level distribution from site counts."""
    c = np.asarray(census.c, dtype=float)
    if len(c) != q_max:
        raise ValueError(f"census covers {len(c)} levels, expected {q_max}")
    qs = np.arange(q_max)
    # Work in log space: exp(-nu*(q_max-q)) overflows for strongly negative nu.
    logw = np.full(q_max, -np.inf)
    pos = c > 0
    logw[pos] = np.log(c[pos]) - nu * (q_max - qs[pos])
    assert np.any(pos), "no docking sites at any level (c_0 > 0 should hold)"
    logw -= logw[pos].max()
    w = np.exp(logw)
    probs = w / w.sum()
    assert abs(probs.sum() - 1.0) < 1e-12
    return AttachmentDistribution(probs=probs)


def sample_attachment_level(
    dist: AttachmentDistribution, rng: np.random.Generator
) -> int:
    p = dist.probs
    return int(rng.choice(len(p), p=p / p.sum()))


def _choose_spec_face_pure(
    spec: SimplexSpec, q: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """Uniform face of order ``q`` not containing the defect edge."""
    de = spec.defect_edge
    while True:
        sub = rng.choice(spec.n, size=q + 1, replace=False)
        if de is None or not (de[0] in sub and de[1] in sub):
            return tuple(sorted(int(x) for x in sub))


def _choose_spec_face_defect(
    spec: SimplexSpec, q: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """Uniform face of order ``q`` containing the defect edge."""
    a, b = spec.defect_edge
    rest = [i for i in range(spec.n) if i != a and i != b]
    extra = rng.choice(len(rest), size=q - 1, replace=False) if q > 1 else []
    return tuple(sorted([a, b] + [rest[int(i)] for i in extra]))


def _site_defect_pair(state: AssemblyState, face: tuple[int, ...]) -> tuple[int, int]:
    graph = state.graph
    for u, v in itertools.combinations(face, 2):
        if graph.edge_type(u, v) == BondType.DEFECT:
            return (u, v)
    raise AssertionError(f"defect-eligible face {face} has no defect edge")


def attach_step(
    state: AssemblyState, spec: SimplexSpec, rng: np.random.Generator
):
    """Attach one simplex: sample the level, the site, the spec face and the
    vertex identification, then insert vertices and edges."""
    census = count_docking_sites(state, spec)
    dist = attachment_distribution(census, state.config.nu, spec.q_max)
    q = sample_attachment_level(dist, rng)

    if q == 0:
        site = (int(rng.integers(census.node_count)),)
        local = int(rng.integers(spec.n))
        return apply_placement(state, spec, (local,), site)

    rec = census.pick_face(q, int(rng.integers(census.c[q])))
    site = rec.vertices
    if rec.cls == CLS_DEFECT:
        # The spec's defect edge nests along the site's defect edge; the
        # orientation and the identification of the remaining vertices are
        # uniform.
        a, b = spec.defect_edge
        face_locals = _choose_spec_face_defect(spec, q, rng)
        u, v = _site_defect_pair(state, site)
        if rng.integers(2):
            u, v = v, u
        rest_locals = tuple(x for x in face_locals if x != a and x != b)
        rest_site = [x for x in site if x != u and x != v]
        perm = rng.permutation(len(rest_site))
        shared_locals = (a, b) + rest_locals
        shared_globals = (u, v) + tuple(rest_site[int(i)] for i in perm)
    else:
        face_locals = _choose_spec_face_pure(spec, q, rng)
        perm = rng.permutation(len(site))
        shared_locals = face_locals
        shared_globals = tuple(site[int(i)] for i in perm)
    return apply_placement(state, spec, shared_locals, shared_globals)


def grow(
    config: GrowthConfig, rng: Optional[np.random.Generator] = None
) -> AssemblyState:
    """Run the aggregation until the node count reaches the target.

    Starts from an initial simplex drawn from the same size and defect
    distributions as later arrivals; deterministic given config and seed.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = AssemblyState.empty(config, rng)
    n0 = sample_size(config.alpha, (config.n_min, config.n_max), rng)
    spec0 = make_spec(n0, config.p_defect, rng)
    apply_placement(state, spec0, (), ())
    while state.graph.node_count < config.target_nodes:
        n = sample_size(config.alpha, (config.n_min, config.n_max), rng)
        spec = make_spec(n, config.p_defect, rng)
        attach_step(state, spec, rng)
    return state
