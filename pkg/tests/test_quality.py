import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kecd.centrality import KEPlot
from kecd.errors import DomainError, GeometryError
from kecd.graph import Graph
from kecd.partition import Partition
from kecd.quality import (
    SWEEP_COLUMNS,
    cluster_geometry,
    modularity,
    modularity_max,
    score,
    sweep_experiment,
    write_sweep_csv,
)


def triangle():
    return Graph.from_edges(3, [0, 1, 2], [1, 2, 0])


def two_triangles():
    return Graph.from_edges(6, [0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3])


def double_sum(g, labels):
    """Literal sum over all ordered node pairs, on the dense adjacency."""
    a = g.adjacency().toarray()
    k = a.sum(axis=1)
    two_w = a.sum()
    q = qmax = 0.0
    for i in range(g.n):
        for j in range(g.n):
            if labels[i] == labels[j]:
                q += a[i, j] - k[i] * k[j] / two_w
                qmax += k[i] * k[j] / two_w
    return q / two_w, 1.0 - qmax / two_w


@st.composite
def graph_and_partition(draw, max_n=30):
    n = draw(st.integers(2, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=80))
    pairs = [(a, b) for a, b in pairs if a != b] or [(0, 1)]
    w = draw(st.lists(st.floats(0.1, 5.0), min_size=len(pairs), max_size=len(pairs)))
    g = Graph.from_edges(n, [a for a, _ in pairs], [b for _, b in pairs], w)
    labels = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return g, Partition.from_labels(labels)


class TestModularity:
    def test_anchors(self):
        assert modularity(triangle(), Partition([0, 0, 0])) == pytest.approx(0.0, abs=1e-15)
        own = Partition([0, 0, 0, 1, 1, 1])
        assert modularity(two_triangles(), own) == 0.5
        assert modularity_max(two_triangles(), own) == 0.5
        assert modularity(two_triangles(), Partition([0] * 6)) == pytest.approx(0.0, abs=1e-15)

    def test_qmax_single_and_singletons(self):
        assert modularity_max(triangle(), Partition([0, 0, 0])) == 0.0
        assert modularity_max(triangle(), Partition([0, 1, 2])) == pytest.approx(2 / 3)

    def test_score(self):
        rep = score(two_triangles(), Partition([0, 0, 0, 1, 1, 1]))
        assert rep.as_dict() == {"q": 0.5, "q_max": 0.5, "q_normalized": 1.0, "k": 2}
        rep = score(triangle(), Partition([0, 0, 0]))
        assert rep.q_max == 0.0 and rep.q_normalized is None and rep.k == 1

    @settings(max_examples=150, deadline=None)
    @given(graph_and_partition())
    def test_matches_double_sum(self, gp):
        g, part = gp
        q, qmax = double_sum(g, part.labels)
        assert abs(modularity(g, part) - q) <= 1e-12
        assert abs(modularity_max(g, part) - qmax) <= 1e-12

    @settings(max_examples=80, deadline=None)
    @given(graph_and_partition(), st.randoms(use_true_random=False))
    def test_relabeling_invariance_and_bound(self, gp, rnd):
        g, part = gp
        perm = list(range(part.k))
        rnd.shuffle(perm)
        relabeled = Partition(np.asarray(perm)[part.labels])
        assert modularity(g, relabeled) == pytest.approx(modularity(g, part), abs=1e-14)
        assert modularity(g, part) <= modularity_max(g, part) + 1e-14

    @settings(max_examples=40, deadline=None)
    @given(graph_and_partition(max_n=12), graph_and_partition(max_n=12))
    def test_merging_disjoint_blocks_never_helps(self, a, b):
        (g1, _), (g2, _) = a, b
        u1, v1, w1 = g1.edges()
        u2, v2, w2 = g2.edges()
        g = Graph.from_edges(g1.n + g2.n, np.r_[u1, u2 + g1.n], np.r_[v1, v2 + g1.n], np.r_[w1, w2])
        split = Partition(np.repeat([0, 1], [g1.n, g2.n]))
        assert modularity(g, Partition([0] * g.n)) <= modularity(g, split) + 1e-15

    def test_errors(self):
        with pytest.raises(DomainError):
            modularity(Graph.from_edges(3, [], []), Partition([0, 0, 0]))
        with pytest.raises(DomainError):
            modularity(triangle(), Partition([0, 0]))


def ray_points(angle, radii):
    t = math.radians(angle)
    return np.asarray(radii) * math.cos(t), np.asarray(radii) * math.sin(t)


def two_clusters(a, b, ra, rb):
    xa, ya = ray_points(a, ra)
    xb, yb = ray_points(b, rb)
    plot = KEPlot(np.r_[xa, xb], np.r_[ya, yb])
    return plot, Partition(np.repeat([0, 1], [len(ra), len(rb)]))


class TestGeometry:
    def test_ray_angle(self):
        plot, part = two_clusters(30, 60, np.linspace(0.1, 1, 20), np.linspace(0.1, 0.8, 30))
        geo = cluster_geometry(plot, part)
        assert geo.theta_deg == pytest.approx(30.0, abs=1e-9)
        geo = cluster_geometry(plot, part, through_origin=False)
        assert geo.theta_deg == pytest.approx(30.0, abs=1e-6)

    def test_identical_clusters(self):
        x, y = ray_points(40, np.linspace(0.2, 1, 10))
        plot = KEPlot(np.r_[x, x], np.r_[y, y])
        geo = cluster_geometry(plot, Partition(np.repeat([0, 1], 10)))
        assert geo.theta_deg == 0 and geo.base_distance == 0 and geo.length_ratio == 1

    def test_length_ratio(self):
        plot = KEPlot(np.array([0, 1, 0, 0.5]), np.array([0, 1, 0, 0.5]))
        part = Partition([0, 0, 1, 1])
        assert cluster_geometry(plot, part, sparse_first=True).length_ratio == pytest.approx(2.0)
        assert cluster_geometry(plot, part, sparse_first=False).length_ratio == pytest.approx(0.5)
        assert cluster_geometry(plot, part).length_ratio == pytest.approx(0.5)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(1, 89), st.floats(1, 89), st.integers(0, 1000))
    def test_order_symmetry(self, a, b, seed):
        rng = np.random.default_rng(seed)
        plot, part = two_clusters(a, b, rng.uniform(0.05, 1, 12), rng.uniform(0.05, 0.7, 15))
        swapped = Partition(1 - part.labels)
        g1 = cluster_geometry(plot, part, sparse_first=True)
        g2 = cluster_geometry(plot, swapped, sparse_first=False)
        g3 = cluster_geometry(plot, swapped, sparse_first=True)
        assert g1.theta_deg == pytest.approx(g2.theta_deg, abs=1e-12)
        assert g1.base_distance == pytest.approx(g2.base_distance, abs=1e-12)
        assert g1.length_ratio == pytest.approx(g2.length_ratio)
        assert g3.length_ratio == pytest.approx(1 / g1.length_ratio)

    def test_base_is_origin_proximal_half(self):
        plot, part = two_clusters(0, 90, [0.1, 0.2, 0.9, 1.0], [0.3, 0.4, 0.8, 1.0])
        geo = cluster_geometry(plot, part)
        assert geo.base_distance == pytest.approx(math.hypot(0.15, 0.35))

    def test_errors(self):
        plot = KEPlot(np.array([0.5, 0.5, 0.1, 0.2]), np.array([0.5, 0.5, 0.3, 0.4]))
        with pytest.raises(GeometryError):
            cluster_geometry(plot, Partition([0, 0, 1, 1]))
        with pytest.raises(DomainError):
            cluster_geometry(plot, Partition([0, 1, 2, 2]))


class TestSweep:
    def test_shape_and_columns(self):
        rows = sweep_experiment("BA", [((2, 8), 50), ((2, 8), 400), ((3, 6), 100)], 80, 80, seeds=2)
        assert len(rows) == 3 and all(r.seeds == 2 and not r.errors for r in rows)
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].split(",") == SWEEP_COLUMNS
        assert lines[1].startswith("2:8,50,")
        assert rows[0].q_mean > rows[1].q_mean

    def test_failures_are_recorded(self):
        # ER blocks with p=0 have zero density: every seed fails, sweep continues
        rows = sweep_experiment("ER", [((0.0, 0.2), 10), ((0.1, 0.2), 10)], 30, 30, seeds=2)
        assert rows[0].seeds == 0 and len(rows[0].errors) == 2
        assert rows[1].seeds == 2 and not rows[1].errors

    def test_parallel_matches_serial(self):
        grid = [((2, 6), 50), ((2, 6), 200)]
        a = sweep_experiment("BA", grid, 60, 60, seeds=2)
        b = sweep_experiment("BA", grid, 60, 60, seeds=2, workers=2)
        assert a == b

    def test_needs_two_seeds(self):
        with pytest.raises(DomainError):
            sweep_experiment("BA", [((2, 8), 50)], 50, 50, seeds=1)
