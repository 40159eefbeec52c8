import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from geoutlier.core import (
    AsymmetryBeyondTolerance,
    Embedding,
    Graph,
    LabeledDataset,
    NegativeEntry,
    NonFinite,
    NonSquare,
    NonZeroDiagonal,
    ScoreVector,
    ValidationError,
    ranks_from_scores,
    validate_distance_matrix,
)


def test_minimal_metric_space_accepted():
    dm = validate_distance_matrix([[0, 1], [1, 0]])
    assert dm.n == 2
    assert dm.entries.tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize(
    "m, err",
    [
        ([[0, 1], [2, 0]], AsymmetryBeyondTolerance),
        ([[0, -1], [-1, 0]], NegativeEntry),
        ([[0, 1, 2], [1, 0, 3]], NonSquare),
        ([[1e-9, 1], [1, 0]], NonZeroDiagonal),
        ([[0, np.nan], [np.nan, 0]], NonFinite),
        ([[0, np.inf], [np.inf, 0]], NonFinite),
    ],
)
def test_invalid_matrices_rejected(m, err):
    with pytest.raises(err):
        validate_distance_matrix(m)


def test_tiny_asymmetry_is_symmetrized():
    m = np.array([[0.0, 1.0], [1.0 + 5e-13, 0.0]])
    dm = validate_distance_matrix(m)
    assert dm.entries[0, 1] == dm.entries[1, 0] == (1.0 + (1.0 + 5e-13)) / 2


def test_distance_matrix_is_read_only():
    dm = validate_distance_matrix([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        dm.entries[0, 1] = 5.0


@given(arrays(np.float64, (5, 5), elements=st.floats(0, 1e6)))
def test_validate_is_identity_on_valid_input(a):
    m = np.triu(a, 1)
    m = m + m.T
    once = validate_distance_matrix(m)
    assert np.array_equal(once.entries, m)
    assert np.array_equal(validate_distance_matrix(once.entries).entries, once.entries)


@pytest.mark.parametrize(
    "scores, ranks",
    [((0.9, 2.1, 1.0), (3, 1, 2)), ((1.0, 1.0), (1, 2)), ((5.0,), (1,))],
)
def test_ranks_examples(scores, ranks):
    assert tuple(ranks_from_scores(scores)) == ranks


def test_ranks_reject_nan():
    with pytest.raises(NonFinite):
        ranks_from_scores([1.0, np.nan])


def test_infinite_score_ranks_first():
    assert tuple(ranks_from_scores([1.0, np.inf, 2.0])) == (3, 1, 2)


@given(st.lists(st.floats(-1e9, 1e9) | st.sampled_from([0.0, 1.0]), min_size=1, max_size=40))
def test_ranks_form_a_permutation_ordered_by_score(scores):
    r = ranks_from_scores(scores)
    assert sorted(r) == list(range(1, len(scores) + 1))
    by_rank = np.asarray(scores)[np.argsort(r)]
    assert np.all(np.diff(by_rank) <= 0)
    for i in range(len(scores)):
        for j in range(len(scores)):
            if scores[i] > scores[j] or (scores[i] == scores[j] and i < j):
                assert r[i] < r[j]


def test_score_vector_derives_ranks():
    sv = ScoreVector([0.5, 3.0, 1.0])
    assert sv.ranks.tolist() == [3, 1, 2]
    assert len(sv) == 3


def test_embedding_invariants():
    Embedding(np.zeros((3, 2)), [2.0, 1.0])
    with pytest.raises(ValidationError):
        Embedding(np.zeros((3, 2)), [1.0, 2.0])
    with pytest.raises(ValidationError):
        Embedding(np.zeros((2, 2)), [2.0, 1.0])  # d > n - 1
    with pytest.raises(ValidationError):
        Embedding(np.zeros((3, 1)), [0.0])


def test_graph_validation():
    g = Graph(3, [(1, 0), (2, 1)])
    assert g.sorted_edges() == [(0, 1), (1, 2)]
    for bad in ([(0, 0)], [(0, 3)], [(0, 1), (1, 0)]):
        with pytest.raises(ValidationError):
            Graph(3, bad)


def test_dataset_flags_and_kinds():
    ds = LabeledDataset(np.zeros((3, 4)), structural_flags=[1, 0, 0], distributional_flags=[0, 1, 0])
    assert ds.kind == "vector" and ds.n == 3
    with pytest.raises(ValidationError):
        LabeledDataset(np.zeros((3, 4)), structural_flags=[1, 0])
    with pytest.raises(ValidationError):
        LabeledDataset(np.zeros((2, 4)), structural_flags=[1, 0], distributional_flags=[1, 0])
    with pytest.raises(ValidationError):
        LabeledDataset([Graph(3), Graph(4)])
    graphs = LabeledDataset([Graph(3), Graph(3, [(0, 1)])], structural_flags=[0, 1])
    assert graphs.kind == "graph"
    sub = graphs.take([1])
    assert sub.n == 1 and sub.structural_flags.tolist() == [True]
