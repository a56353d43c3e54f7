import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kecd.centrality import (
    CentralityVector,
    KatzParams,
    eigenvector_centrality,
    katz_centrality,
    katz_closed_form,
    ke_points,
    normalize,
    spectral_radius,
)
from kecd.errors import ConvergenceError, DivergenceError, DomainError
from kecd.graph import Graph, connected_components
from kecd.netgen import gen_er

TOL = 1e-10


def path3():
    return Graph.from_edges(3, [0, 1], [1, 2])


def triangle():
    return Graph.from_edges(3, [0, 1, 2], [1, 2, 0])


def cycle(n):
    return Graph.from_edges(n, range(n), [(i + 1) % n for i in range(n)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [0] * leaves, range(1, leaves + 1))


def dense_leading(g):
    vals, vecs = np.linalg.eigh(g.adjacency().toarray())
    return vals[-1], np.abs(vecs[:, -1])


class TestSpectralRadius:
    @pytest.mark.parametrize("g, expected", [(triangle(), 2.0), (path3(), math.sqrt(2)), (star(4), 2.0)])
    def test_examples(self, g, expected):
        assert spectral_radius(g, TOL) == pytest.approx(expected, abs=1e-8)

    def test_bipartite_does_not_oscillate(self):
        # even cycles and stars have -lambda_1 in the spectrum as well
        assert spectral_radius(cycle(6), TOL) == pytest.approx(2.0, abs=1e-8)
        assert spectral_radius(star(9), TOL) == pytest.approx(3.0, abs=1e-8)

    def test_matches_dense(self):
        g = gen_er(60, 0.1, 3)
        assert spectral_radius(g, TOL) == pytest.approx(dense_leading(g)[0], rel=1e-8)

    def test_no_edges(self):
        with pytest.raises(DomainError):
            spectral_radius(Graph.from_edges(3, [], []))


class TestEigenvector:
    def test_cycle(self):
        v = eigenvector_centrality(cycle(5), TOL)
        np.testing.assert_allclose(v.values, 1.0, atol=1e-12)

    def test_path(self):
        v = eigenvector_centrality(path3(), TOL)
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(v.values, [s, 1.0, s], atol=1e-9)
        assert v.values.max() == 1.0
        assert v.residual <= TOL

    def test_two_triangles_per_component(self):
        g = Graph.from_edges(6, [0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3])
        v = eigenvector_centrality(g, TOL)
        np.testing.assert_allclose(v.values, 1.0)
        assert v.warnings

    def test_isolated_nodes_score_zero(self):
        g = Graph.from_edges(5, [0, 1], [1, 2])
        v = eigenvector_centrality(g, TOL)
        assert v.values[3] == v.values[4] == 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(5, 120), st.integers(0, 10_000))
    def test_cosine_with_dense_eigensolver(self, n, seed):
        g = gen_er(n, min(1.0, 6.0 / n), seed)
        if g.m == 0 or connected_components(g).max() > 0:
            return
        v = eigenvector_centrality(g, TOL).values
        _, ref = dense_leading(g)
        cos = float(v @ ref / (np.linalg.norm(v) * np.linalg.norm(ref)))
        assert cos >= 1 - 1e-8

    def test_non_convergence_reports_residual(self):
        with pytest.raises(ConvergenceError) as err:
            eigenvector_centrality(gen_er(50, 0.2, 1), TOL, max_iter=2)
        assert err.value.residual is not None and err.value.residual > TOL


class TestKatz:
    def test_alpha_zero_gives_beta(self):
        v = katz_centrality(gen_er(20, 0.3, 0), KatzParams(alpha=0.0, beta=1.0), TOL)
        np.testing.assert_array_equal(v.values, 1.0)
        np.testing.assert_array_equal(katz_closed_form(gen_er(20, 0.3, 0), KatzParams(alpha=0.0)).values, 1.0)

    def test_path(self):
        v = katz_centrality(path3(), KatzParams(alpha=0.5), TOL)
        np.testing.assert_allclose(v.values, [3, 4, 3], atol=1e-8)
        assert not v.normalized

    def test_triangle(self):
        v = katz_centrality(triangle(), KatzParams(alpha=0.25), TOL)
        np.testing.assert_allclose(v.values, 2.0, atol=1e-8)

    def test_closed_form_path_by_hand(self):
        a = 0.5
        end = (1 + a) / (1 - 2 * a * a)
        np.testing.assert_allclose(katz_closed_form(path3(), KatzParams(alpha=a)).values,
                                   [end, 1 + 2 * a * end, end], rtol=1e-14)

    def test_power_series_oracle(self):
        # x = beta * sum_k (alpha A)^k 1, truncated far past machine precision
        g = gen_er(30, 0.2, 5)
        a = g.adjacency().toarray()
        alpha = 0.5 / np.linalg.eigvalsh(a)[-1]
        term = np.ones(g.n)
        total = term.copy()
        for _ in range(200):
            term = alpha * a @ term
            total += term
        v = katz_centrality(g, KatzParams(alpha=alpha), TOL)
        np.testing.assert_allclose(v.values, total, atol=1e-8)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 50), st.integers(0, 10_000), st.floats(0.05, 0.9), st.floats(0.1, 5.0))
    def test_matches_closed_form(self, n, seed, frac, beta):
        g = gen_er(n, 0.2, seed)
        p = KatzParams(alpha_fraction=frac, beta=beta)
        if g.m == 0:
            return
        it = katz_centrality(g, p, TOL)
        cf = katz_closed_form(g, KatzParams(alpha=it.alpha, beta=beta))
        assert np.max(np.abs(it.values - cf.values)) <= 10 * TOL * max(1.0, beta / (1 - frac))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 10_000), st.floats(0.01, 0.95))
    def test_free_centrality_floor(self, n, seed, frac):
        g = gen_er(n, 0.3, seed)
        if g.m == 0:
            return
        assert katz_centrality(g, KatzParams(alpha_fraction=frac), TOL).values.min() >= 1.0

    def test_divergent_alpha_refused(self):
        with pytest.raises(DivergenceError) as err:
            katz_centrality(path3(), KatzParams(alpha=0.8), TOL)
        assert err.value.spectral_radius == pytest.approx(math.sqrt(2), abs=1e-8)
        assert "1.41421" in str(err.value)
        with pytest.raises(DivergenceError):
            katz_closed_form(path3(), KatzParams(alpha=1 / math.sqrt(2)))

    def test_params_validation(self):
        for kwargs in ({"alpha": -1.0}, {"beta": 0.0}, {"alpha_fraction": 1.0}, {"alpha_fraction": 0.0}):
            with pytest.raises(DomainError):
                KatzParams(**kwargs)

    def test_closed_form_size_guard(self):
        with pytest.raises(DomainError):
            katz_closed_form(Graph.from_edges(2001, [0], [1]))


class TestNormalize:
    def _vec(self, values):
        return CentralityVector(np.asarray(values, dtype=float), "katz", False, 0, 0.0)

    def test_examples(self):
        np.testing.assert_array_equal(normalize(self._vec([3, 4, 3])).values, [0.75, 1.0, 0.75])
        np.testing.assert_array_equal(normalize(self._vec([2, 2])).values, [1, 1])

    def test_idempotent(self):
        once = normalize(self._vec([0.3, 2.0, 1.1]))
        np.testing.assert_array_equal(normalize(once).values, once.values)
        assert once.normalized

    def test_zero_vector(self):
        with pytest.raises(DomainError):
            normalize(self._vec([0.0, 0.0]))


class TestKEPoints:
    def test_cycle(self):
        plot = ke_points(cycle(5))
        np.testing.assert_allclose(plot.x, 1.0)
        np.testing.assert_allclose(plot.y, 1.0)

    def test_path(self):
        plot = ke_points(path3(), KatzParams(alpha=0.5))
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(plot.x, [s, 1, s], atol=1e-9)
        np.testing.assert_allclose(plot.y, [0.75, 1, 0.75], atol=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(3, 80), st.integers(0, 10_000))
    def test_unit_box(self, n, seed):
        g = gen_er(n, 0.15, seed)
        if g.m == 0:
            return
        plot = ke_points(g)
        for axis in (plot.x, plot.y):
            assert axis.min() >= 0 and axis.max() == 1.0

    def test_beta_invariance(self):
        g = gen_er(40, 0.2, 9)
        a = ke_points(g, KatzParams(alpha_fraction=0.4, beta=1.0))
        b = ke_points(g, KatzParams(alpha_fraction=0.4, beta=7.5))
        np.testing.assert_allclose(a.y, b.y, atol=1e-9)

    def test_alpha_continuity(self):
        g = gen_er(40, 0.2, 9)
        a = ke_points(g, KatzParams(alpha_fraction=0.4))
        b = ke_points(g, KatzParams(alpha_fraction=0.4 + 1e-6))
        assert np.max(np.abs(a.y - b.y)) < 1e-4

    def test_csv_header(self):
        buf = io.StringIO()
        ke_points(path3(), KatzParams(alpha=0.5)).write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "node,evc,katz"
        assert len(lines) == 4
