import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from geoutlier.core import Graph, LabeledDataset
from geoutlier.metrics import (
    EmptyInput,
    InvalidP,
    LengthMismatch,
    MetricKindMismatch,
    MetricSpec,
    NegativeMass,
    VertexCountMismatch,
    dtw_distance,
    frobenius_laplacian_distance,
    laplacian,
    lp_distance,
    metric_function,
    pairwise_matrix,
    wasserstein1_distance,
)
from oracles import dtw_oracle

finite = st.floats(-100, 100, allow_nan=False)


def vec(n):
    return arrays(np.float64, n, elements=finite)


# -- Lp ----------------------------------------------------------------------

def test_lp_examples():
    assert lp_distance([1.5, -2.0], [1.5, -2.0], 3) == 0.0
    assert lp_distance([0, 0], [3, 4], 2) == 5.0
    # (3**10 + 4**10) ** 0.1 evaluated with mpmath at 30 digits
    assert lp_distance([0, 0], [3, 4], 10) == pytest.approx(4.02197414982233161710, rel=1e-14)


def test_lp_errors():
    with pytest.raises(LengthMismatch):
        lp_distance([0, 1], [0, 1, 2])
    with pytest.raises(InvalidP):
        lp_distance([0], [1], 0.5)
    with pytest.raises(InvalidP):
        MetricSpec("lp", 0.9)


@given(vec(6), vec(6), st.floats(1, 30))
def test_lp_matches_formula(x, y, p):
    expected = np.sum(np.abs(x - y) ** p) ** (1 / p)
    assert lp_distance(x, y, p) == pytest.approx(expected, rel=1e-12, abs=1e-300)


@given(vec(5), vec(5), st.floats(1, 20), st.floats(1, 20))
def test_lp_non_increasing_in_p(x, y, p, q):
    lo, hi = sorted((p, q))
    assert lp_distance(x, y, hi) <= lp_distance(x, y, lo) * (1 + 1e-12) + 1e-300


@given(vec(4), vec(4), vec(4), st.sampled_from([1.0, 2.0, 3.5, 10.0]))
def test_lp_triangle_inequality(x, y, z, p):
    assert lp_distance(x, z, p) <= (lp_distance(x, y, p) + lp_distance(y, z, p)) * (1 + 1e-9) + 1e-12


# -- graphs -------------------------------------------------------------------

def test_laplacian_examples():
    assert laplacian(Graph(2)).tolist() == [[0, 0], [0, 0]]
    assert laplacian(Graph(2, [(0, 1)])).tolist() == [[1, -1], [-1, 1]]
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert laplacian(tri).tolist() == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]


def test_frobenius_examples():
    g = Graph(4, [(0, 1), (2, 3)])
    assert frobenius_laplacian_distance(g, g) == 0.0
    assert frobenius_laplacian_distance(Graph(2, [(0, 1)]), Graph(2)) == 2.0
    with pytest.raises(VertexCountMismatch):
        frobenius_laplacian_distance(Graph(2), Graph(3))


def graphs(n=6):
    pairs = list(itertools.combinations(range(n), 2))
    return st.lists(st.sampled_from(pairs), unique=True).map(lambda e: Graph(n, e))


@given(graphs(), graphs(), st.permutations(range(6)))
def test_frobenius_invariant_under_relabeling(g1, g2, perm):
    def relabel(g):
        return Graph(g.vertex_count, [(perm[u], perm[v]) for u, v in g.edges])

    d = frobenius_laplacian_distance(g1, g2)
    assert frobenius_laplacian_distance(relabel(g1), relabel(g2)) == pytest.approx(d, rel=1e-12)


@given(graphs(), graphs(), graphs())
def test_frobenius_triangle_inequality(a, b, c):
    d = frobenius_laplacian_distance
    assert d(a, c) <= (d(a, b) + d(b, c)) * (1 + 1e-9) + 1e-12


# -- DTW ------------------------------------------------------------------------

def test_dtw_examples():
    assert dtw_distance([1, 2, 3], [1, 2, 3]) == 0.0
    assert dtw_distance([0, 0, 1], [0, 1, 1]) == 0.0
    assert dtw_distance([0], [5]) == 5.0
    with pytest.raises(EmptyInput):
        dtw_distance([], [1])


@given(arrays(np.float64, st.integers(1, 8), elements=finite), arrays(np.float64, st.integers(1, 8), elements=finite))
def test_dtw_matches_plain_python_and_is_symmetric(x, y):
    d = dtw_distance(x, y)
    assert d == pytest.approx(dtw_oracle(list(x), list(y)), rel=1e-12, abs=1e-12)
    assert d == pytest.approx(dtw_distance(y, x), rel=1e-12, abs=1e-12)
    assert d >= 0


# -- Wasserstein ---------------------------------------------------------------

def test_wasserstein_examples():
    x = [0.2, 0.5, 0.3]
    assert wasserstein1_distance(x, x) == 0.0
    assert wasserstein1_distance([1, 0, 0, 0], [0, 0, 0, 1]) == 3.0
    assert wasserstein1_distance([1, 0], [0, 2]) == 2.0
    with pytest.raises(NegativeMass):
        wasserstein1_distance([1, -1], [0, 0])
    with pytest.raises(LengthMismatch):
        wasserstein1_distance([1], [0, 0])


mass = arrays(np.float64, 5, elements=st.floats(0, 10))


@given(mass, mass, mass)
def test_wasserstein_metric_properties(x, y, z):
    w = wasserstein1_distance
    assert w(x, x) == 0.0
    assert w(x, y) == w(y, x) >= 0
    assert w(x, z) <= (w(x, y) + w(y, z)) * (1 + 1e-9) + 1e-12


# -- pairwise -----------------------------------------------------------------

def test_pairwise_points_on_a_line():
    dm = pairwise_matrix(LabeledDataset(np.array([[0.0], [1.0], [3.0]])), MetricSpec())
    assert dm.entries[0, 1] == 1 and dm.entries[0, 2] == 3 and dm.entries[1, 2] == 2


@pytest.mark.parametrize("spec", [MetricSpec("lp", 2), MetricSpec("lp", 1), MetricSpec("lp", 10),
                                  MetricSpec("dtw"), MetricSpec("wasserstein1")])
def test_pairwise_equals_double_loop_oracle_bitwise(spec, rng):
    X = rng.uniform(0, 5, size=(10, 7))
    dm = pairwise_matrix(LabeledDataset(X), spec)
    f = metric_function(spec)
    for i in range(10):
        for j in range(10):
            expected = 0.0 if i == j else f(X[i], X[j])
            assert dm.entries[i, j] == expected


def test_pairwise_graphs_bitwise(rng):
    from geoutlier.simgen import er_graph

    gs = [er_graph(8, 0.3, rng) for _ in range(10)]
    dm = pairwise_matrix(LabeledDataset(gs), MetricSpec("frobenius_laplacian"))
    for i in range(10):
        for j in range(i + 1, 10):
            assert dm.entries[i, j] == dm.entries[j, i] == frobenius_laplacian_distance(gs[i], gs[j])


def test_pairwise_threads_match_serial(rng):
    X = rng.normal(size=(40, 30))
    a = pairwise_matrix(LabeledDataset(X), MetricSpec("dtw"))
    b = pairwise_matrix(LabeledDataset(X), MetricSpec("dtw"), n_jobs=4)
    assert np.array_equal(a.entries, b.entries)


def test_pairwise_kind_mismatch():
    with pytest.raises(MetricKindMismatch):
        pairwise_matrix(LabeledDataset([Graph(3)]), MetricSpec("lp"))
    with pytest.raises(MetricKindMismatch):
        pairwise_matrix(LabeledDataset(np.zeros((2, 3))), MetricSpec("frobenius_laplacian"))


@settings(max_examples=30)
@given(st.sampled_from(["lp", "dtw", "wasserstein1"]), arrays(np.float64, (6, 4), elements=st.floats(0, 50)))
def test_pairwise_is_valid_distance_matrix(kind, X):
    dm = pairwise_matrix(LabeledDataset(X), MetricSpec(kind))
    assert np.all(dm.entries >= 0)
    assert np.array_equal(dm.entries, dm.entries.T)
    assert np.all(np.diag(dm.entries) == 0)
