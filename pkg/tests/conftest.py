import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from cliquenets.core import BondType, LabeledGraph

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=40
)
hypothesis.settings.load_profile("default")


@st.composite
def labeled_graphs(draw, min_n=2, max_n=12, with_defects=True):
    """Random labeled graphs with dense ids and no isolated-edge pathologies
    ruled out (isolated vertices allowed)."""
    n = draw(st.integers(min_n, max_n))
    density = draw(st.floats(0.1, 0.9))
    p_defect = draw(st.floats(0.0, 0.6)) if with_defects else 0.0
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    g = LabeledGraph()
    g.add_vertices(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                g.add_edge(u, v, BondType(int(rng.random() < p_defect)))
    return g


@st.composite
def connected_graphs(draw, min_n=4, max_n=14, with_defects=False):
    n = draw(st.integers(min_n, max_n))
    density = draw(st.floats(0.0, 0.5))
    p_defect = draw(st.floats(0.0, 0.6)) if with_defects else 0.0
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    g = LabeledGraph()
    g.add_vertices(n)
    order = rng.permutation(n)
    for i in range(1, n):
        u = int(order[i])
        v = int(order[int(rng.integers(i))])
        g.add_edge(u, v, BondType(int(rng.random() < p_defect)))
    for u in range(n):
        for v in range(u + 1, n):
            if not g.has_edge(u, v) and rng.random() < density:
                g.add_edge(u, v, BondType(int(rng.random() < p_defect)))
    return g


@pytest.fixture(scope="session")
def pool():
    """Forked process pool shared by the ensemble-based acceptance tests."""
    from concurrent.futures import ProcessPoolExecutor
    import os

    workers = min(2, os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as p:
        yield p
