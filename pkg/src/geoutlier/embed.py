"""Classical (Torgerson) multidimensional scaling."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .core import DistanceMatrix, Embedding, LabeledDataset, ValidationError
from .metrics import MetricSpec, pairwise_matrix

log = logging.getLogger(__name__)

RELATIVE_EIGEN_TOL = 1e-10


class DegenerateInput(ValidationError):
    pass


class NoPositiveEigenvalues(ArithmeticError):
    pass


class SizeMismatch(ValidationError):
    pass


@dataclass(frozen=True)
class MdsConfig:
    """Target dimension and eigenvalue cutoff.

    ``eigen_tolerance=None`` means ``1e-10 * largest eigenvalue``.
    """

    d: int = 2
    eigen_tolerance: Optional[float] = None

    def __post_init__(self):
        if int(self.d) < 1:
            raise ValidationError(f"embedding dimension must be >= 1, got {self.d}")
        if self.eigen_tolerance is not None and self.eigen_tolerance < 0:
            raise ValidationError("eigen_tolerance must be nonnegative")


def double_center(sq: np.ndarray) -> np.ndarray:
    """``-0.5 * J @ sq @ J`` with ``J = I - 11'/n``, without forming J."""
    b = sq - sq.mean(axis=0, keepdims=True)
    b = b - b.mean(axis=1, keepdims=True)
    b = -0.5 * b
    return (b + b.T) / 2.0


def fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is nonnegative.

    Ties in magnitude resolve to the smallest row index.
    """
    if vecs.size == 0:
        return vecs
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[pivot, np.arange(vecs.shape[1])] < 0, -1.0, 1.0)
    return vecs * signs


def torgerson_mds(dist: DistanceMatrix, cfg: MdsConfig = MdsConfig()) -> Embedding:
    """Embed a distance matrix by classical scaling.

    Only positive eigenvalues above the tolerance are kept; negative
    eigenvalues from non-Euclidean dissimilarities are dropped. If fewer than
    ``cfg.d`` eigenvalues qualify, the returned embedding is narrower and a
    warning is logged. Cost is one dense symmetric eigendecomposition,
    O(n^3).
    """
    n = dist.n
    if n < 2:
        raise DegenerateInput("classical scaling needs at least 2 observations")
    if cfg.d > n - 1:
        raise ValidationError(f"embedding dimension {cfg.d} exceeds n - 1 = {n - 1}")
    b = double_center(dist.entries ** 2)
    evals, evecs = scipy.linalg.eigh(b)
    evals, evecs = evals[::-1], evecs[:, ::-1]
    top = evals[0]
    tol = RELATIVE_EIGEN_TOL * max(top, 0.0) if cfg.eigen_tolerance is None else cfg.eigen_tolerance
    keep = np.flatnonzero((evals > tol) & (evals > 0))[: cfg.d]
    if keep.size == 0:
        raise NoPositiveEigenvalues("no eigenvalue above tolerance; all points coincide")
    if keep.size < cfg.d:
        log.warning("only %d positive eigenvalues; embedding has d=%d instead of %d",
                    keep.size, keep.size, cfg.d)
    vecs = fix_signs(evecs[:, keep])
    lam = evals[keep]
    return Embedding(vecs * np.sqrt(lam), lam)


def embedding_distances(emb: Embedding) -> DistanceMatrix:
    """Euclidean distances between embedding coordinates."""
    return pairwise_matrix(LabeledDataset(np.asarray(emb.coords)), MetricSpec("lp", 2.0))


def reconstruction_error(dist: DistanceMatrix, emb: Embedding) -> float:
    """Worst absolute distortion ``max_{i<j} | ||y_i - y_j|| - dist[i, j] |``."""
    if emb.n != dist.n:
        raise SizeMismatch(f"embedding has {emb.n} rows, distance matrix {dist.n}")
    if dist.n < 2:
        return 0.0
    rec = embedding_distances(emb).entries
    iu = np.triu_indices(dist.n, 1)
    return float(np.max(np.abs(rec[iu] - dist.entries[iu])))
