"""Shortest-path structure and four-point hyperbolicity.

For a vertex quadruple the three pairing sums of distances are formed; with
S <= M <= L their gap delta = (L - M)/2 is bounded by d_min, the smaller of
the two distances in the smallest-sum pairing.  The graph's hyperbolicity
delta(G) is the worst case over quadruples, evaluated either exhaustively
(all quadruples, feasible up to a size threshold) or by uniform sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numba import njit
from scipy.sparse.csgraph import dijkstra

from .core import LabeledGraph

EXHAUSTIVE_THRESHOLD = 250  # vertices; beyond this, use sampled mode
DEFAULT_SAMPLES = 10_000_000
_APSP_BLOCK = 2048


@dataclass(frozen=True)
class DistanceMatrix:
    """Hop distances between all vertex pairs of a connected graph."""

    d: np.ndarray  # (n, n) int16, symmetric, zero diagonal
    diameter: int

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class HyperbolicityProfile:
    """Distance distribution and worst-case quadruple gaps per d_min."""

    p_of_d: np.ndarray  # normalized histogram over unordered pairs, index d
    dmin: np.ndarray  # d_min values with at least one evaluated quadruple
    delta_max: np.ndarray  # max delta per d_min (half-integers)
    delta_g: float
    mode: str  # "exhaustive" | "sampled"
    quadruples: int
    seed: Optional[int] = None


def distance_matrix(graph: LabeledGraph) -> DistanceMatrix:
    """All-pairs hop distances via per-source BFS (computed in blocks).

    The graph must be connected; run components through
    ``transform.largest_component`` first.
    """
    n = graph.node_count
    if n == 0:
        raise ValueError("distance matrix of an empty graph")
    rows, cols = [], []
    for u, v, _ in graph.edges():
        rows += (u, v)
        cols += (v, u)
    adj = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
    )
    d = np.empty((n, n), dtype=np.int16)
    for start in range(0, n, _APSP_BLOCK):
        idx = np.arange(start, min(start + _APSP_BLOCK, n))
        block = dijkstra(adj, unweighted=True, indices=idx)
        if np.isinf(block).any():
            raise ValueError(
                "graph is disconnected; compute distances on the largest "
                "component"
            )
        d[idx] = block.astype(np.int16)
    return DistanceMatrix(d=d, diameter=int(d.max()) if n > 1 else 0)


def four_point_delta(
    dm: DistanceMatrix, a: int, b: int, c: int, d: int
) -> tuple[float, int]:
    """Gap and d_min for one quadruple.

    Returns ``((L - M)/2, d_min)``; on tied smallest sums the first pairing
    in the order (ab|cd), (ac|bd), (ad|bc) defines d_min.
    """
    if len({a, b, c, d}) != 4:
        raise ValueError("four-point condition needs four distinct vertices")
    D = dm.d
    s1 = int(D[a, b]) + int(D[c, d])
    s2 = int(D[a, c]) + int(D[b, d])
    s3 = int(D[a, d]) + int(D[b, c])
    if s1 <= s2 and s1 <= s3:
        dmin, r1, r2 = min(D[a, b], D[c, d]), s2, s3
    elif s2 <= s3:
        dmin, r1, r2 = min(D[a, c], D[b, d]), s1, s3
    else:
        dmin, r1, r2 = min(D[a, d], D[b, c]), s1, s2
    return abs(r1 - r2) / 2.0, int(dmin)


@njit(cache=True)
def _exhaustive_kernel(D: np.ndarray, nbins: int) -> np.ndarray:
    """Max 2*delta per d_min over all vertex quadruples (-1 where unseen)."""
    n = D.shape[0]
    prof = np.full(nbins, -1, dtype=np.int64)
    for a in range(n - 3):
        Da = D[a]
        for b in range(a + 1, n - 2):
            dab = Da[b]
            Db = D[b]
            for c in range(b + 1, n - 1):
                dac = Da[c]
                dbc = Db[c]
                Dc = D[c]
                for e in range(c + 1, n):
                    dcd = Dc[e]
                    dbd = Db[e]
                    dad = Da[e]
                    s1 = dab + dcd
                    s2 = dac + dbd
                    s3 = dad + dbc
                    if s1 <= s2 and s1 <= s3:
                        dmin = dab if dab < dcd else dcd
                        r1, r2 = s2, s3
                    elif s2 <= s3:
                        dmin = dac if dac < dbd else dbd
                        r1, r2 = s1, s3
                    else:
                        dmin = dad if dad < dbc else dbc
                        r1, r2 = s1, s2
                    d2 = r1 - r2 if r1 >= r2 else r2 - r1
                    if d2 > prof[dmin]:
                        prof[dmin] = d2
    return prof


def _sampled_kernel(
    D: np.ndarray,
    count: int,
    rng: np.random.Generator,
    nbins: int,
    chunk: int = 1_000_000,
) -> np.ndarray:
    """Max 2*delta per d_min over ``count`` uniform distinct quadruples."""
    n = D.shape[0]
    prof = np.full(nbins, -1, dtype=np.int64)
    remaining = count
    while remaining > 0:
        m = min(chunk, remaining)
        idx = rng.integers(0, n, size=(m, 4))
        a, b, c, d = idx[:, 0], idx[:, 1], idx[:, 2], idx[:, 3]
        ok = (a != b) & (a != c) & (a != d) & (b != c) & (b != d) & (c != d)
        idx = idx[ok]
        if idx.shape[0] == 0:
            continue
        remaining -= idx.shape[0]
        idx.sort(axis=1)
        a, b, c, d = idx[:, 0], idx[:, 1], idx[:, 2], idx[:, 3]
        dab = D[a, b].astype(np.int64)
        dcd = D[c, d].astype(np.int64)
        dac = D[a, c].astype(np.int64)
        dbd = D[b, d].astype(np.int64)
        dad = D[a, d].astype(np.int64)
        dbc = D[b, c].astype(np.int64)
        s1 = dab + dcd
        s2 = dac + dbd
        s3 = dad + dbc
        m1 = (s1 <= s2) & (s1 <= s3)
        m2 = ~m1 & (s2 <= s3)
        dmin = np.where(
            m1,
            np.minimum(dab, dcd),
            np.where(m2, np.minimum(dac, dbd), np.minimum(dad, dbc)),
        )
        r1 = np.where(m1, s2, s1)
        r2 = np.where(m1 | m2, s3, s2)
        d2 = np.abs(r1 - r2)
        upd = d2 > prof[dmin]
        np.maximum.at(prof, dmin[upd], d2[upd])
    return prof


def distance_distribution(dm: DistanceMatrix) -> np.ndarray:
    """Normalized histogram of hop distances over unordered vertex pairs;
    index is the distance, entry 0 is zero."""
    n = dm.n
    if n < 2:
        raise ValueError("distance distribution needs at least two vertices")
    counts = np.bincount(dm.d.ravel().astype(np.int64))
    counts[0] -= n  # drop the diagonal
    p = counts / (n * (n - 1))
    assert abs(p.sum() - 1.0) < 1e-9
    return p


def hyperbolicity_profile(
    dm: DistanceMatrix,
    samples: Optional[int] = None,
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD,
    seed: Optional[int] = None,
) -> HyperbolicityProfile:
    """Worst-case four-point gaps per d_min, plus the global delta(G).

    ``samples=None`` requests exhaustive enumeration of all quadruples,
    allowed up to ``exhaustive_threshold`` vertices; otherwise ``samples``
    uniform quadruples of distinct vertices are drawn (deterministic for a
    given ``seed``).
    """
    n = dm.n
    if n < 4:
        raise ValueError("hyperbolicity needs at least four vertices")
    nbins = dm.diameter + 1
    if samples is None:
        if n > exhaustive_threshold:
            raise ValueError(
                f"{n} vertices exceed the exhaustive threshold "
                f"{exhaustive_threshold}; use sampled mode (samples=...)"
            )
        prof = _exhaustive_kernel(np.ascontiguousarray(dm.d, dtype=np.int32), nbins)
        mode = "exhaustive"
        quadruples = n * (n - 1) * (n - 2) * (n - 3) // 24
    else:
        if samples < 1:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        prof = _sampled_kernel(dm.d, samples, rng, nbins)
        mode = "sampled"
        quadruples = samples
    seen = np.nonzero(prof >= 0)[0]
    return HyperbolicityProfile(
        p_of_d=distance_distribution(dm),
        dmin=seen,
        delta_max=prof[seen] / 2.0,
        delta_g=float(prof.max()) / 2.0 if seen.size else 0.0,
        mode=mode,
        quadruples=quadruples,
        seed=seed,
    )
