"""Local Outlier Factor on a precomputed distance matrix.

Follows Breunig et al. (2000): neighborhoods include every point tied at the
k-distance, so a neighborhood may hold more than k points.

Duplicate points can make a neighborhood's reachability sum zero. Such a
point gets an infinite local reachability density, and density ratios use
``inf/inf = 1``, ``x/inf = 0`` and ``inf/x = inf``. As a result a point whose
neighbors include a duplicate cluster but which is not itself duplicated
receives a score of ``+inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DistanceMatrix, ScoreVector, ValidationError


class TooFewObservations(ValidationError):
    pass


class InvalidK(ValidationError):
    pass


def resolve_k(n: int, k_fraction: float) -> int:
    """``min(n - 1, max(1, floor(k_fraction * n)))``."""
    if n < 2:
        raise TooFewObservations(f"LOF needs at least 2 observations, got {n}")
    if not 0 < k_fraction <= 1:
        raise InvalidK(f"k_fraction must lie in (0, 1], got {k_fraction!r}")
    return min(n - 1, max(1, math.floor(k_fraction * n)))


@dataclass(frozen=True)
class LofConfig:
    """Neighborhood size, either absolute (``k``) or relative to n."""

    k: Optional[int] = None
    k_fraction: Optional[float] = None

    def __post_init__(self):
        if (self.k is None) == (self.k_fraction is None):
            raise InvalidK("give exactly one of k and k_fraction")

    def resolve(self, n: int) -> int:
        if self.k_fraction is not None:
            return resolve_k(n, self.k_fraction)
        if n < 2:
            raise TooFewObservations(f"LOF needs at least 2 observations, got {n}")
        if not 1 <= self.k <= n - 1:
            raise InvalidK(f"k={self.k} outside [1, {n - 1}]")
        return int(self.k)


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    num, den = np.broadcast_arrays(num, den)
    out = np.empty(num.shape)
    ninf, dinf = np.isinf(num), np.isinf(den)
    both = ninf & dinf
    fin = ~ninf & ~dinf
    out[both] = 1.0
    out[ninf & ~dinf] = np.inf
    out[~ninf & dinf] = 0.0
    out[fin] = num[fin] / den[fin]
    return out


def _neighborhoods(dist: DistanceMatrix, k: int):
    """Neighborhood membership matrix and local reachability densities."""
    d = np.array(dist.entries)
    np.fill_diagonal(d, np.inf)
    kdist = np.partition(d, k - 1, axis=1)[:, k - 1]
    member = d <= kdist[:, None]
    # reach(p, o) = max(k-distance(o), d(p, o))
    reach_sum = np.where(member, np.maximum(kdist[None, :], d), 0.0).sum(axis=1)
    positive = reach_sum > 0
    lrd = np.full(d.shape[0], np.inf)
    lrd[positive] = member.sum(axis=1)[positive] / reach_sum[positive]
    return member, lrd


def local_reachability_density(dist: DistanceMatrix, k: int) -> np.ndarray:
    return _neighborhoods(dist, k)[1]


def lof_scores(dist: DistanceMatrix, cfg: LofConfig = LofConfig(k_fraction=0.75)) -> ScoreVector:
    """LOF score per observation; values near 1 indicate inliers."""
    k = cfg.resolve(dist.n)
    member, lrd = _neighborhoods(dist, k)
    ratios = np.where(member, _ratio(lrd[None, :], lrd[:, None]), 0.0)
    return ScoreVector(ratios.sum(axis=1) / member.sum(axis=1))
