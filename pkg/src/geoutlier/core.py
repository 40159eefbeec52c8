"""Shared data model: distance matrices, embeddings, score vectors, datasets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

SYMMETRY_TOL = 1e-12


class ValidationError(ValueError):
    """Base class for input validation failures."""


class NonSquare(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class NonZeroDiagonal(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class AsymmetryBeyondTolerance(ValidationError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal n x n matrix.

    Construct through :func:`validate_distance_matrix`; the constructor itself
    only stores a read-only copy.
    """

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def subset(self, idx: Sequence[int]) -> "DistanceMatrix":
        idx = np.asarray(idx, dtype=np.intp)
        return DistanceMatrix(self.entries[np.ix_(idx, idx)])


def validate_distance_matrix(m) -> DistanceMatrix:
    """Check metric-matrix invariants and return a symmetrized copy.

    Asymmetry up to ``SYMMETRY_TOL`` (absolute) is accepted and removed by
    averaging with the transpose.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquare(f"distance matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("distance matrix contains non-finite entries")
    if np.any(m < 0):
        i, j = np.argwhere(m < 0)[0]
        raise NegativeEntry(f"negative entry {m[i, j]!r} at ({i}, {j})")
    diag = np.abs(np.diag(m))
    if np.any(diag > SYMMETRY_TOL):
        i = int(np.argmax(diag))
        raise NonZeroDiagonal(f"diagonal entry {m[i, i]!r} at index {i}")
    asym = np.abs(m - m.T)
    if np.any(asym > SYMMETRY_TOL):
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise AsymmetryBeyondTolerance(
            f"|m[{i},{j}] - m[{j},{i}]| = {asym[i, j]!r} exceeds {SYMMETRY_TOL}"
        )
    sym = (m + m.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    return DistanceMatrix(sym)


@dataclass(frozen=True)
class Embedding:
    """Coordinates from classical scaling.

    ``eigenvalues`` holds the retained (positive, non-increasing) eigenvalues,
    one per coordinate column.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(np.atleast_2d(self.coords)))
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        if self.coords.shape[1] != self.eigenvalues.shape[0]:
            raise ValidationError("one eigenvalue per coordinate column required")
        if self.d > max(self.n - 1, 0):
            raise ValidationError(f"embedding dimension {self.d} exceeds n - 1")
        ev = self.eigenvalues
        if np.any(ev <= 0) or np.any(np.diff(ev) > 0):
            raise ValidationError("eigenvalues must be positive and sorted descending")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def ranks_from_scores(scores) -> np.ndarray:
    """Rank 1 for the largest score; ties go to the lower observation index.

    +inf is an orderable score (see :mod:`geoutlier.lof` on duplicate points);
    NaN and -inf are rejected.
    """
    s = np.asarray(scores, dtype=float).ravel()
    if np.any(np.isnan(s)) or np.any(s == -np.inf):
        raise NonFinite("scores must be finite (or +inf)")
    # lexsort keys: last is primary
    order = np.lexsort((np.arange(s.size), -s))
    ranks = np.empty(s.size, dtype=np.int64)
    ranks[order] = np.arange(1, s.size + 1)
    return ranks


@dataclass(frozen=True)
class ScoreVector:
    scores: np.ndarray
    ranks: np.ndarray = field(default=None)

    def __post_init__(self):
        scores = _frozen(np.asarray(self.scores, dtype=float).ravel())
        object.__setattr__(self, "scores", scores)
        ranks = ranks_from_scores(scores) if self.ranks is None else np.asarray(self.ranks)
        ranks = np.array(ranks, dtype=np.int64)
        ranks.flags.writeable = False
        object.__setattr__(self, "ranks", ranks)

    def __len__(self) -> int:
        return self.scores.size


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``vertex_count`` vertices."""

    vertex_count: int
    edges: frozenset

    def __init__(self, vertex_count: int, edges=()):
        if int(vertex_count) < 1:
            raise ValidationError("vertex_count must be positive")
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValidationError(f"edge ({u}, {v}) outside [0, {vertex_count})")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValidationError(f"duplicate edge {e}")
            norm.add(e)
        object.__setattr__(self, "vertex_count", int(vertex_count))
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a


Observations = Union[np.ndarray, Sequence[Graph]]


def _flags(f, n, name):
    if f is None:
        return None
    f = np.array(f, dtype=bool).ravel()
    if f.size != n:
        raise ValidationError(f"{name} has length {f.size}, expected {n}")
    f.flags.writeable = False
    return f


@dataclass(frozen=True)
class LabeledDataset:
    """Observations (vector rows or graphs) with optional ground truth.

    ``params`` is an (n, m) float array of generating parameters whose columns
    are named by ``param_names``; NaN marks a parameter that does not apply to
    an observation. ``labels`` carries class strings from ingested files.
    """

    observations: Observations
    structural_flags: Optional[np.ndarray] = None
    distributional_flags: Optional[np.ndarray] = None
    params: Optional[np.ndarray] = None
    param_names: tuple = ()
    labels: Optional[tuple] = None

    def __post_init__(self):
        obs = self.observations
        if isinstance(obs, np.ndarray) or (len(obs) and not isinstance(obs[0], Graph)):
            obs = _frozen(np.atleast_2d(np.asarray(obs, dtype=float)))
            if obs.ndim != 2:
                raise ValidationError("vector observations must form an (n, D) array")
        else:
            obs = tuple(obs)
            if any(not isinstance(g, Graph) for g in obs):
                raise ValidationError("mixed observation kinds")
            if len({g.vertex_count for g in obs}) > 1:
                raise ValidationError("all graphs must share a vertex count")
        object.__setattr__(self, "observations", obs)
        n = len(obs)
        sf = _flags(self.structural_flags, n, "structural_flags")
        df = _flags(self.distributional_flags, n, "distributional_flags")
        if sf is not None and df is not None and np.any(sf & df):
            raise ValidationError("an observation cannot be both structural and distributional")
        object.__setattr__(self, "structural_flags", sf)
        object.__setattr__(self, "distributional_flags", df)
        if self.params is not None:
            p = _frozen(np.asarray(self.params, dtype=float).reshape(n, -1))
            object.__setattr__(self, "params", p)
        object.__setattr__(self, "param_names", tuple(self.param_names))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise ValidationError(f"labels has length {len(labels)}, expected {n}")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def kind(self) -> str:
        return "vector" if isinstance(self.observations, np.ndarray) else "graph"

    def take(self, idx) -> "LabeledDataset":
        """Row subset in the given order."""
        idx = [int(i) for i in idx]
        if self.kind == "vector":
            obs = self.observations[idx]
        else:
            obs = tuple(self.observations[i] for i in idx)

        def pick(a):
            return None if a is None else a[idx]

        return LabeledDataset(
            obs,
            structural_flags=pick(self.structural_flags),
            distributional_flags=pick(self.distributional_flags),
            params=pick(self.params),
            param_names=self.param_names,
            labels=None if self.labels is None else tuple(self.labels[i] for i in idx),
        )
