import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cliquenets.core import (
    AssemblyState,
    BondType,
    LabeledGraph,
    SimplexSpec,
    apply_placement,
)
from cliquenets.growth import (
    AttachmentDistribution,
    DockingCensus,
    GrowthConfig,
    attach_step,
    attachment_distribution,
    count_docking_sites,
    grow,
    make_spec,
    sample_attachment_level,
    sample_size,
    size_distribution,
)


def rng_(seed=0):
    return np.random.default_rng(seed)


class TestSampleSize:
    def test_alpha_zero_uniform(self):
        probs = size_distribution(0.0, 2, 10)
        assert np.allclose(probs, 1 / 9)

    def test_degenerate_range(self):
        assert sample_size(2.0, (4, 4), rng_()) == 4

    def test_power_law_chi2(self):
        # oracle: direct normalization of the nine inverse squares
        sizes = np.arange(2, 11)
        expect_p = sizes**-2.0 / (sizes**-2.0).sum()
        assert abs(expect_p[0] - 0.4547) < 5e-4
        draws = sample_size(2.0, (2, 10), rng_(123), size=1_000_000)
        observed = np.bincount(draws, minlength=11)[2:]
        res = stats.chisquare(observed, expect_p * len(draws))
        assert res.pvalue > 0.01

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            sample_size(2.0, (1, 10), rng_())


class TestMakeSpec:
    def test_p_zero_never_defect(self):
        r = rng_(1)
        assert all(make_spec(5, 0.0, r).defect_edge is None for _ in range(200))

    def test_p_one_dumbbell(self):
        spec = make_spec(2, 1.0, rng_(2))
        assert spec.defect_edge == (0, 1)

    def test_defect_rate_estimator(self):
        r = rng_(3)
        hits = sum(make_spec(4, 0.7, r).defect_edge is not None for _ in range(100_000))
        assert abs(hits / 100_000 - 0.7) < 0.01

    def test_defect_edge_uniform_over_pairs(self):
        r = rng_(4)
        counts = {}
        for _ in range(30_000):
            e = make_spec(4, 1.0, r).defect_edge
            counts[e] = counts.get(e, 0) + 1
        assert len(counts) == 6
        res = stats.chisquare(list(counts.values()))
        assert res.pvalue > 0.01


def build_fig1_structure(all_pure=False):
    """The worked docking example: defect tetra 0-1-2-3 (defect 0-1), pure
    triangle 3-4-5, defect triangle 0-1-6 nesting on 0-1, defect tetra
    0-1-2-7 nesting its defect face, defect dumbbell 1-8."""
    d = 0 if all_pure else 1
    edges = [
        (0, 1, d), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0), (2, 3, 0),
        (3, 4, 0), (3, 5, 0), (4, 5, 0),
        (0, 6, 0), (1, 6, 0),
        (0, 7, 0), (1, 7, 0), (2, 7, 0),
        (1, 8, d),
    ]
    return LabeledGraph.from_edges(9, edges)


def state_for(graph, mode="contamination", nu=0.0):
    config = GrowthConfig(target_nodes=2, nu=nu, compatibility_mode=mode)
    return AssemblyState.from_graph(graph, config)


class TestCountDockingSites:
    def test_worked_example_with_defects(self):
        state = state_for(build_fig1_structure())
        census = count_docking_sites(state, SimplexSpec(3))
        assert census.c[0] == 9
        assert census.c[1] == 5
        faces = {f for f in census.eligible_faces(1)}
        assert faces == {(2, 3), (2, 7), (3, 4), (3, 5), (4, 5)}

    def test_worked_example_all_pure(self):
        state = state_for(build_fig1_structure(all_pure=True))
        census = count_docking_sites(state, SimplexSpec(3))
        assert census.c[1] == 15

    def test_single_triangle_site_counts(self):
        g = LabeledGraph.from_edges(3, [(0, 1, 0), (0, 2, 0), (1, 2, 0)])
        census = count_docking_sites(state_for(g), SimplexSpec(3))
        assert census.c[0] == 3 and census.c[1] == 3

    def test_defect_arrival_gains_nesting_sites(self):
        # lone defect edge, otherwise clean: eligible only for defect faces
        g = LabeledGraph.from_edges(3, [(0, 1, 1), (1, 2, 0)])
        state = state_for(g)
        pure_arrival = count_docking_sites(state, SimplexSpec(3))
        defect_arrival = count_docking_sites(
            state, SimplexSpec(3, defect_edge=(0, 1))
        )
        assert pure_arrival.c[1] == 0  # both edges touch the defect
        assert defect_arrival.c[1] == 1  # the defect edge itself

    def test_strict_mode_ignores_contamination(self):
        state = state_for(build_fig1_structure(), mode="strict")
        census = count_docking_sites(state, SimplexSpec(3))
        assert census.c[1] == 13  # all pure edges


class TestAttachmentDistribution:
    def make_census(self, c):
        c = np.asarray(c, dtype=np.int64)
        return DockingCensus(
            c=c, node_count=int(c[0]), spec_has_defect=False, levels=None
        )

    def test_nu_zero_geometry_only(self):
        dist = attachment_distribution(self.make_census([3, 3]), 0.0, 2)
        assert np.allclose(dist.probs, [0.5, 0.5])

    def test_positive_nu_tilts_up(self):
        dist = attachment_distribution(self.make_census([3, 3]), 5.0, 2)
        expect = math.exp(5) / (1 + math.exp(5))
        assert abs(dist.probs[1] - expect) < 1e-12
        assert abs(dist.probs[1] - 0.99331) < 1e-5

    def test_zero_site_level_gets_zero_probability(self):
        dist = attachment_distribution(self.make_census([5, 0]), -3.0, 2)
        assert np.allclose(dist.probs, [1.0, 0.0])

    @given(
        c=st.lists(st.integers(0, 10_000), min_size=1, max_size=9),
        nu=st.floats(-60, 60),
    )
    def test_normalization_and_support(self, c, nu):
        c = [max(c[0], 1)] + c[1:]
        dist = attachment_distribution(self.make_census(c), nu, len(c))
        assert abs(dist.probs.sum() - 1.0) < 1e-12
        for q, cq in enumerate(c):
            assert (dist.probs[q] == 0.0) == (cq == 0)

    @given(
        c=st.lists(st.integers(1, 1000), min_size=2, max_size=9),
        nu=st.floats(-20, 20),
        dnu=st.floats(0.1, 10),
    )
    def test_mean_level_monotone_in_nu(self, c, nu, dnu):
        lo = attachment_distribution(self.make_census(c), nu, len(c))
        hi = attachment_distribution(self.make_census(c), nu + dnu, len(c))
        assert hi.mean_q >= lo.mean_q - 1e-9

    def test_extreme_nu_limits(self):
        c = [7, 5, 0, 3, 2]
        r = rng_(9)
        hi = attachment_distribution(self.make_census(c), 50.0, len(c))
        lo = attachment_distribution(self.make_census(c), -50.0, len(c))
        draws_hi = {sample_attachment_level(hi, r) for _ in range(10_000)}
        draws_lo = {sample_attachment_level(lo, r) for _ in range(10_000)}
        assert draws_hi == {4}  # largest level with sites
        assert draws_lo == {0}

    def test_eq1_chi2_on_synthetic_censuses(self):
        for c, nu, seed in [
            ((7, 5, 3, 2, 1), 1.0, 10),
            ((50, 10, 5), -1.0, 11),
            ((4, 4, 4, 4), 0.5, 12),
        ]:
            dist = attachment_distribution(self.make_census(c), nu, len(c))
            r = rng_(seed)
            draws = r.choice(len(c), size=100_000, p=dist.probs)
            observed = np.bincount(draws, minlength=len(c))
            keep = dist.probs > 0
            res = stats.chisquare(
                observed[keep], dist.probs[keep] * len(draws)
            )
            assert res.pvalue > 0.01


class TestAttachStep:
    def test_pure_tetra_docks_on_edge(self):
        g = LabeledGraph.from_edges(2, [(0, 1, 0)])
        state = state_for(g, nu=50.0)  # forces the largest available level
        attach_step(state, SimplexSpec(4), rng_(0))
        assert state.graph.node_count == 4
        assert state.graph.edge_count == 1 + 5
        assert state.placed[-1].q == 1

    def test_defect_triangle_nests_on_defect_edge(self):
        g = LabeledGraph.from_edges(2, [(0, 1, 1)])
        state = state_for(g, nu=50.0)
        attach_step(state, SimplexSpec(3, defect_edge=(0, 1)), rng_(1))
        assert state.graph.node_count == 3
        assert state.graph.edge_count == 3
        assert state.graph.defect_edge_count == 1  # nested, not duplicated
        assert state.placed[-1].defect_edge == (0, 1)

    def test_defect_dumbbell_shares_a_node(self):
        g = LabeledGraph.from_edges(3, [(0, 1, 0), (1, 2, 0)])
        state = state_for(g)
        attach_step(state, SimplexSpec(2, defect_edge=(0, 1)), rng_(2))
        assert state.graph.node_count == 4
        assert state.graph.edge_count == 3
        assert state.graph.defect_edge_count == 1
        assert state.placed[-1].q == 0

    def test_every_step_distribution_normalized(self):
        state = grow(GrowthConfig(target_nodes=2, seed=0))
        r = rng_(3)
        for _ in range(60):
            spec = make_spec(sample_size(2.0, (2, 10), r), 0.5, r)
            census = count_docking_sites(state, spec)
            dist = attachment_distribution(census, 0.0, spec.q_max)
            assert abs(dist.probs.sum() - 1.0) < 1e-12
            attach_step(state, spec, r)


class TestGrow:
    def test_target_reached_within_bound(self):
        for seed in range(5):
            cfg = GrowthConfig(target_nodes=120, nu=-5.0, p_defect=0.4, seed=seed)
            state = grow(cfg)
            assert 120 <= state.graph.node_count <= 120 + cfg.n_max - 2
            assert state.graph.is_connected()

    def test_p_zero_runs_are_pure(self):
        state = grow(GrowthConfig(target_nodes=150, nu=0.0, p_defect=0.0, seed=4))
        assert state.graph.defect_edge_count == 0

    def test_defect_concentration_weakly_increases_with_p(self):
        means = []
        for p in (0.0, 0.35, 0.7):
            cs = []
            for seed in range(5):
                st_ = grow(
                    GrowthConfig(target_nodes=250, nu=0.0, p_defect=p, seed=seed)
                )
                cs.append(st_.graph.defect_edge_count / st_.graph.edge_count)
            means.append(np.mean(cs))
        assert means[0] <= means[1] <= means[2]

    def test_negative_nu_repels(self):
        state = grow(GrowthConfig(target_nodes=400, nu=-5.0, p_defect=0.0, seed=8))
        qs = [ev.q for ev in state.event_log[1:]]
        assert np.mean(qs) < 0.2
        n_a = [ev.n_a for ev in state.event_log[1:]]
        n = [ev.n for ev in state.event_log[1:]]
        assert np.mean([a / (m - 1) for a, m in zip(n_a, n)]) > 0.9

    def test_positive_nu_shares_large_faces(self):
        state = grow(GrowthConfig(target_nodes=400, nu=5.0, p_defect=0.0, seed=8))
        shares = [ev.q / (ev.n - 2) for ev in state.event_log[1:] if ev.n > 2]
        assert np.mean(shares) > 0.8

    def test_determinism_same_seed(self):
        cfg = GrowthConfig(target_nodes=200, nu=0.0, p_defect=0.5, seed=77)
        a = grow(cfg)
        b = grow(cfg)
        assert list(a.graph.edge_types.items()) == list(b.graph.edge_types.items())
        assert a.event_log == b.event_log

    def test_different_seeds_differ(self):
        a = grow(GrowthConfig(target_nodes=100, nu=0.0, p_defect=0.5, seed=1))
        b = grow(GrowthConfig(target_nodes=100, nu=0.0, p_defect=0.5, seed=2))
        assert list(a.graph.edge_types) != list(b.graph.edge_types)
