import numpy as np
import pytest

from geoutlier.core import Embedding, LabeledDataset, validate_distance_matrix
from geoutlier.embed import (
    DegenerateInput,
    MdsConfig,
    NoPositiveEigenvalues,
    SizeMismatch,
    fix_signs,
    reconstruction_error,
    torgerson_mds,
)
from geoutlier.metrics import MetricSpec, pairwise_matrix
from oracles import distance_table, euclid


def l2_matrix(points):
    return pairwise_matrix(LabeledDataset(np.asarray(points, dtype=float)), MetricSpec())


def test_three_points_on_a_line():
    dm = validate_distance_matrix([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    emb = torgerson_mds(dm, MdsConfig(1))
    y = emb.coords[:, 0]
    assert abs(y[0] - y[1]) == pytest.approx(1, abs=1e-12)
    assert abs(y[0] - y[2]) == pytest.approx(3, abs=1e-12)
    assert abs(y[1] - y[2]) == pytest.approx(2, abs=1e-12)
    assert y.sum() == pytest.approx(0, abs=1e-12)


def test_coincident_points_have_no_embedding():
    with pytest.raises(NoPositiveEigenvalues):
        torgerson_mds(validate_distance_matrix(np.zeros((4, 4))), MdsConfig(2))


def test_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        torgerson_mds(validate_distance_matrix([[0.0]]), MdsConfig(1))
    with pytest.raises(ValueError):
        torgerson_mds(validate_distance_matrix([[0, 1], [1, 0]]), MdsConfig(2))


@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_isometry_at_intrinsic_dimension(dim, rng):
    pts = rng.normal(scale=3.0, size=(25, dim))
    dm = l2_matrix(pts)
    emb = torgerson_mds(dm, MdsConfig(dim))
    assert emb.d == dim
    assert reconstruction_error(dm, emb) <= 1e-8 * dm.entries.max()


def test_narrower_embedding_when_rank_is_short(rng, caplog):
    pts = np.c_[rng.normal(size=(10, 2)), np.zeros(10)]
    emb = torgerson_mds(l2_matrix(pts), MdsConfig(4))
    assert emb.d == 2
    assert "only 2 positive eigenvalues" in caplog.text


def test_centering_and_ordering(rng):
    dm = l2_matrix(rng.uniform(size=(30, 6)))
    emb = torgerson_mds(dm, MdsConfig(4))
    scale = np.abs(emb.coords).max(axis=0)
    assert np.all(np.abs(emb.coords.sum(axis=0)) <= 1e-9 * emb.n * scale)
    assert np.all(np.diff(emb.eigenvalues) < 0)


def test_sign_convention(rng):
    emb = torgerson_mds(l2_matrix(rng.normal(size=(20, 4))), MdsConfig(3))
    for col in emb.coords.T:
        assert col[np.argmax(np.abs(col))] >= 0
    v = np.array([[0.5, -1.0], [-0.5, 1.0]])
    # magnitude tie in column 1: the first row wins, so it is made nonnegative
    assert fix_signs(v).tolist() == [[0.5, 1.0], [-0.5, -1.0]]


def test_nested_embeddings(rng):
    dm = l2_matrix(rng.normal(size=(30, 6)) * [6, 5, 4, 3, 2, 1])
    small = torgerson_mds(dm, MdsConfig(2))
    big = torgerson_mds(dm, MdsConfig(3))
    assert np.min(np.abs(np.diff(big.eigenvalues))) > 1e-9
    np.testing.assert_allclose(small.coords, big.coords[:, :2], rtol=0, atol=1e-10)


def test_negative_eigenvalues_are_dropped():
    # a non-Euclidean dissimilarity (violates the triangle inequality)
    dm = validate_distance_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    emb = torgerson_mds(dm, MdsConfig(2))
    assert np.all(emb.eigenvalues > 0)


def test_reconstruction_error_of_degenerate_embedding():
    dm = validate_distance_matrix([[0, 2, 7], [2, 0, 4], [7, 4, 0]])
    emb = Embedding(np.zeros((3, 1)), [1.0])
    assert reconstruction_error(dm, emb) == 7.0
    with pytest.raises(SizeMismatch):
        reconstruction_error(dm, Embedding(np.zeros((4, 1)), [1.0]))


def test_reconstruction_error_matches_brute_force(rng):
    pts = rng.normal(size=(20, 5))
    dm = validate_distance_matrix(distance_table(pts.tolist()))
    emb = torgerson_mds(dm, MdsConfig(5))
    y = emb.coords.tolist()
    worst = 0.0
    for i in range(20):
        for j in range(i + 1, 20):
            worst = max(worst, abs(euclid(y[i], y[j]) - dm.entries[i, j]))
    assert reconstruction_error(dm, emb) == pytest.approx(worst, rel=1e-12, abs=1e-15)


def test_deterministic(rng):
    dm = l2_matrix(rng.normal(size=(40, 10)))
    a, b = torgerson_mds(dm, MdsConfig(3)), torgerson_mds(dm, MdsConfig(3))
    assert np.array_equal(a.coords, b.coords)
