"""Pairwise distances for vector and graph observations.

Every scalar metric and :func:`pairwise_matrix` share the same row kernels, so
an entry of the pairwise matrix is bitwise equal to the scalar metric applied
to that pair.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .core import DistanceMatrix, Graph, LabeledDataset, NonFinite, ValidationError, validate_distance_matrix

VECTOR_KINDS = ("lp", "dtw", "wasserstein1")
GRAPH_KINDS = ("frobenius_laplacian",)


class LengthMismatch(ValidationError):
    pass


class InvalidP(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class NegativeMass(ValidationError):
    pass


class VertexCountMismatch(ValidationError):
    pass


class MetricKindMismatch(ValidationError):
    pass


@dataclass(frozen=True)
class MetricSpec:
    kind: str = "lp"
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in VECTOR_KINDS + GRAPH_KINDS:
            raise ValidationError(f"unknown metric kind {self.kind!r}")
        if self.kind == "lp" and not (self.p >= 1):
            raise InvalidP(f"p must be >= 1, got {self.p!r}")

    @property
    def accepts(self) -> str:
        return "graph" if self.kind in GRAPH_KINDS else "vector"

    def __str__(self):
        return f"lp(p={self.p:g})" if self.kind == "lp" else self.kind


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise NonFinite("vector contains non-finite values")
    return x


def _lp_rows(x: np.ndarray, ys: np.ndarray, p: float) -> np.ndarray:
    """Lp distance from ``x`` to each row of ``ys``."""
    diff = np.abs(ys - x)
    if p == 2:
        return np.sqrt(np.sum(diff * diff, axis=1))
    if p == 1:
        return np.sum(diff, axis=1)
    if np.isinf(p):
        return np.max(diff, axis=1)
    # factor out the max so |d|**p cannot overflow for large p
    scale = np.max(diff, axis=1)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * np.sum((diff / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def lp_distance(x, y, p: float = 2.0) -> float:
    """Discrete Lp distance ``(sum_k |x_k - y_k|**p) ** (1/p)`` on a shared grid."""
    if not p >= 1:
        raise InvalidP(f"p must be >= 1, got {p!r}")
    x, y = _as_vector(x), _as_vector(y)
    if x.size != y.size:
        raise LengthMismatch(f"lengths {x.size} and {y.size} differ")
    return float(_lp_rows(x, y[None, :], p)[0])


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``Deg - Adj``."""
    adj = g.adjacency()
    return np.diag(adj.sum(axis=1)) - adj


def frobenius_laplacian_distance(g1: Graph, g2: Graph) -> float:
    if g1.vertex_count != g2.vertex_count:
        raise VertexCountMismatch(f"{g1.vertex_count} vs {g2.vertex_count} vertices")
    return float(_lp_rows(laplacian(g1).ravel(), laplacian(g2).ravel()[None, :], 2)[0])


@numba.njit(cache=True)
def _dtw(x, y):
    m, n = x.shape[0], y.shape[0]
    acc = np.empty((m, n))
    acc[0, 0] = abs(x[0] - y[0])
    for j in range(1, n):
        acc[0, j] = acc[0, j - 1] + abs(x[0] - y[j])
    for i in range(1, m):
        acc[i, 0] = acc[i - 1, 0] + abs(x[i] - y[0])
        for j in range(1, n):
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = abs(x[i] - y[j]) + best
    return acc[m - 1, n - 1]


@numba.njit(cache=True)
def _dtw_rows(x, ys):
    out = np.empty(ys.shape[0])
    for r in range(ys.shape[0]):
        out[r] = _dtw(x, ys[r])
    return out


def dtw_distance(x, y) -> float:
    """Unconstrained DTW with absolute-difference cost and steps (1,0), (0,1), (1,1).

    The accumulated cost is not normalized by path length. Series may differ
    in length.
    """
    x, y = _as_vector(x), _as_vector(y)
    if x.size == 0 or y.size == 0:
        raise EmptyInput("DTW needs two nonempty series")
    return float(_dtw_rows(x, y[None, :])[0])


def _w1_rows(cx: np.ndarray, cys: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(cys - cx), axis=1)


def _check_mass(x):
    x = _as_vector(x)
    if np.any(x < 0):
        raise NegativeMass("mass vectors must be nonnegative")
    return x


def wasserstein1_distance(x, y) -> float:
    """Unnormalized 1-D Wasserstein-1: L1 distance between cumulative sums.

    ``x`` and ``y`` are masses on a common unit-spaced grid; total masses need
    not agree.
    """
    x, y = _check_mass(x), _check_mass(y)
    if x.size != y.size:
        raise LengthMismatch(f"lengths {x.size} and {y.size} differ")
    return float(_w1_rows(np.cumsum(x), np.cumsum(y)[None, :])[0])


def _row_kernel(data: LabeledDataset, metric: MetricSpec):
    """Return (prepared rows, kernel(i, rows_after_i) -> distances)."""
    if metric.kind == "lp":
        X = np.stack([_as_vector(r) for r in data.observations])
        return X, lambda x, ys: _lp_rows(x, ys, metric.p)
    if metric.kind == "dtw":
        X = np.ascontiguousarray(data.observations, dtype=float)
        if X.shape[1] == 0:
            raise EmptyInput("DTW needs nonempty series")
        _as_vector(X)
        return X, _dtw_rows
    if metric.kind == "wasserstein1":
        X = np.stack([np.cumsum(_check_mass(r)) for r in data.observations])
        return X, _w1_rows
    L = np.stack([laplacian(g).ravel() for g in data.observations])
    return L, lambda x, ys: _lp_rows(x, ys, 2)


def pairwise_matrix(data: LabeledDataset, metric: MetricSpec, n_jobs: Optional[int] = None) -> DistanceMatrix:
    """Distance matrix of ``data`` under ``metric``.

    The upper triangle is computed one row at a time (optionally on a thread
    pool) and mirrored; each entry is written exactly once, so the result
    does not depend on scheduling.
    """
    if data.kind != metric.accepts:
        raise MetricKindMismatch(f"metric {metric} does not accept {data.kind} observations")
    n = data.n
    rows, kernel = _row_kernel(data, metric)
    out = np.zeros((n, n))

    def fill(i):
        if i + 1 < n:
            d = kernel(rows[i], rows[i + 1:])
            out[i, i + 1:] = d
            out[i + 1:, i] = d

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(fill, range(n)))
    else:
        for i in range(n):
            fill(i)
    return validate_distance_matrix(out)


def metric_function(metric: MetricSpec):
    """Scalar metric for a spec; used for pairwise oracles and ad-hoc use."""
    if metric.kind == "lp":
        return lambda x, y: lp_distance(x, y, metric.p)
    return {
        "dtw": dtw_distance,
        "wasserstein1": wasserstein1_distance,
        "frobenius_laplacian": frobenius_laplacian_distance,
    }[metric.kind]
