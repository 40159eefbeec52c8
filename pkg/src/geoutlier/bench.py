"""Contamination benchmark: mean ROC-AUC over replications per (ratio, k) cell."""

from __future__ import annotations

import hashlib
import io
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

import numpy as np
import scipy.stats

from .core import LabeledDataset, ScoreVector, ValidationError
from .embed import MdsConfig, embedding_distances, torgerson_mds
from .lof import LofConfig, lof_scores
from .metrics import MetricSpec, pairwise_matrix
from .simgen import DEFAULTS, GeneratorSpec

log = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.01, 0.025, 0.05, 0.1)
DEFAULT_K_FRACTIONS = (0.01, 0.1, 0.75, 0.9)


class PoolTooSmall(ValidationError):
    pass


class SingleClass(ValidationError):
    pass


class BenchError(RuntimeError):
    pass


def n_outliers(n_in: int, r: float) -> int:
    """``round(r * n_in)`` rounding half up, at least 1 when ``r > 0``."""
    if r <= 0:
        return 0
    return max(1, math.floor(r * n_in + 0.5))


def cell_seed(base_seed: int, replication: int, ratio: float) -> int:
    """Mix ``base_seed`` with a 64-bit BLAKE2b hash of ``"<replication>|<repr(ratio)>"`` by XOR."""
    h = hashlib.blake2b(f"{replication}|{float(ratio)!r}".encode(), digest_size=8).digest()
    return (int(base_seed) ^ int.from_bytes(h, "little")) & (2**64 - 1)


def _draw(n_in: int, pool_n: int, r: float, seed: int):
    """Pool indices to inject and a shuffle of the combined index set."""
    n_out = n_outliers(n_in, r)
    if n_out > pool_n:
        raise PoolTooSmall(f"need {n_out} outliers but the pool holds {pool_n}")
    if r > 0 and math.floor(r * n_in + 0.5) == 0:
        log.warning("round(%g * %d) = 0; injecting 1 outlier", r, n_in)
    rng = np.random.Generator(np.random.PCG64(seed))
    picked = rng.choice(pool_n, size=n_out, replace=False)
    order = rng.permutation(n_in + n_out)
    return picked, order


def contaminate(inliers: LabeledDataset, outlier_pool: LabeledDataset, r: float, seed: int) -> LabeledDataset:
    """Inject ``n_outliers(n_in, r)`` pool members into the inliers and shuffle.

    The result's structural flags mark exactly the injected observations.
    """
    picked, order = _draw(inliers.n, outlier_pool.n, r, seed)
    combined = _concat(inliers, outlier_pool.take(picked))
    return combined.take(order)


def _concat(a: LabeledDataset, b: LabeledDataset) -> LabeledDataset:
    if a.kind == "vector":
        obs = np.vstack([a.observations, b.observations])
    else:
        obs = tuple(a.observations) + tuple(b.observations)
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = a.labels + b.labels
    flags = np.r_[np.zeros(a.n, bool), np.ones(b.n, bool)]
    return LabeledDataset(obs, structural_flags=flags, labels=labels)


def roc_auc(scores, structural_flags) -> float:
    """Mann-Whitney AUC: P(outlier score > inlier score) with ties counted as 1/2."""
    s = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=float)
    y = np.asarray(structural_flags, dtype=bool)
    if s.shape != y.shape:
        raise ValidationError(f"{s.size} scores but {y.size} flags")
    if np.any(np.isnan(s)):
        raise ValidationError("NaN score")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs at least one flagged and one unflagged observation")
    ranks = scipy.stats.rankdata(s)  # average ranks; sums are exact multiples of 1/2
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class BenchConfig:
    inliers: LabeledDataset
    outlier_pool: LabeledDataset
    ratios: tuple = DEFAULT_RATIOS
    k_fractions: tuple = DEFAULT_K_FRACTIONS
    replications: int = 50
    embed_dim: int = 2
    metric: MetricSpec = MetricSpec("lp", 2.0)
    base_seed: int = 0
    name: str = "benchmark"
    source: dict = field(default_factory=dict)
    n_jobs: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        object.__setattr__(self, "k_fractions", tuple(float(k) for k in self.k_fractions))
        if self.replications < 1:
            raise ValidationError("replications must be >= 1")
        if not self.ratios or list(self.ratios) != sorted(self.ratios):
            raise ValidationError("ratios must be nonempty and sorted ascending")
        if any(not 0 < r <= 0.5 for r in self.ratios):
            raise ValidationError("ratios must lie in (0, 0.5]")
        if not self.k_fractions or len(set(self.k_fractions)) != len(self.k_fractions):
            raise ValidationError("k_fractions must be nonempty and distinct")
        if any(not 0 < k <= 1 for k in self.k_fractions):
            raise ValidationError("k_fractions must lie in (0, 1]")
        if self.embed_dim < 1:
            raise ValidationError("embed_dim must be >= 1")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ValidationError("base_seed must be a 64-bit unsigned integer")
        if self.inliers.kind != self.outlier_pool.kind:
            raise ValidationError("inliers and outlier pool hold different observation kinds")

    def echo(self) -> dict:
        return {
            "name": self.name,
            "source": dict(self.source),
            "n_in": self.inliers.n,
            "pool_size": self.outlier_pool.n,
            "ratios": list(self.ratios),
            "k_fractions": list(self.k_fractions),
            "replications": self.replications,
            "embed_dim": self.embed_dim,
            "metric": str(self.metric),
            "base_seed": int(self.base_seed),
        }


@dataclass(frozen=True)
class BenchReport:
    """``auc[ratio_index, k_index, replication]`` plus bookkeeping."""

    ratios: tuple
    k_fractions: tuple
    auc: np.ndarray
    n_in: int
    n_out: tuple
    seeds: np.ndarray  # [replication, ratio_index]
    seconds: np.ndarray  # wall time per [replication, ratio_index]
    config: dict

    @property
    def replications(self) -> int:
        return self.auc.shape[2]

    @property
    def grid(self) -> np.ndarray:
        return self.auc.mean(axis=2)

    @property
    def sd(self) -> np.ndarray:
        if self.replications == 1:
            return np.zeros(self.auc.shape[:2])
        return self.auc.std(axis=2, ddof=1)

    def mean(self, ratio: float, k_fraction: float) -> float:
        return float(self.grid[self.ratios.index(ratio), self.k_fractions.index(k_fraction)])

    def same_results(self, other: "BenchReport") -> bool:
        """Equality of everything except wall times."""
        return (
            self.ratios == other.ratios
            and self.k_fractions == other.k_fractions
            and np.array_equal(self.auc, other.auc)
            and self.n_out == other.n_out
            and np.array_equal(self.seeds, other.seeds)
            and self.config == other.config
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("ratio,k_fraction,mean_auc,sd_auc,n_in,n_out,replications\n")
        grid, sd = self.grid, self.sd
        for i, r in enumerate(self.ratios):
            for j, k in enumerate(self.k_fractions):
                out.write(f"{r!r},{k!r},{float(grid[i, j])!r},{float(sd[i, j])!r},"
                          f"{self.n_in},{self.n_out[i]},{self.replications}\n")
        return out.getvalue()

    def to_table(self) -> str:
        """Text table with one row per ratio and one column per k, like the published layout."""
        name = self.config.get("name", "")
        cols = [f"{k:g}n" for k in self.k_fractions]
        lines = [
            f"{name}  n_in = {self.n_in}, replications = {self.replications}, metric = {self.config.get('metric')}",
            "k".ljust(10) + "".join(c.rjust(8) for c in cols),
        ]
        for i, r in enumerate(self.ratios):
            row = f"r: {100 * r:.1f}%".ljust(10) + "".join(f"{v:8.2f}" for v in self.grid[i])
            lines.append(row)
        return "\n".join(lines) + "\n"


def _concat_pool(cfg: BenchConfig) -> LabeledDataset:
    return _concat(cfg.inliers, cfg.outlier_pool)


def run_benchmark(cfg: BenchConfig) -> BenchReport:
    """Contaminate, embed, score and evaluate every (replication, ratio) cell.

    Distances are computed once over inliers plus pool; each replication
    takes the submatrix of its contaminated set. LOF runs on Euclidean
    distances between the ``embed_dim``-dimensional embedding coordinates.
    """
    n_in, pool_n = cfg.inliers.n, cfg.outlier_pool.n
    need = n_outliers(n_in, max(cfg.ratios))
    if need > pool_n:
        raise PoolTooSmall(f"ratio {max(cfg.ratios)} needs {need} outliers but the pool holds {pool_n}")
    full = pairwise_matrix(_concat_pool(cfg), cfg.metric, n_jobs=cfg.n_jobs)
    reps, R, K = cfg.replications, len(cfg.ratios), len(cfg.k_fractions)
    seeds = np.array([[cell_seed(cfg.base_seed, i, r) for r in cfg.ratios] for i in range(reps)], dtype=np.uint64)

    def cell(job):
        i, ri = job
        r = cfg.ratios[ri]
        t0 = time.perf_counter()
        try:
            picked, order = _draw(n_in, pool_n, r, int(seeds[i, ri]))
            idx = np.r_[np.arange(n_in), n_in + picked][order]
            flags = (idx >= n_in)
            dist = full.subset(idx)
            emb = torgerson_mds(dist, MdsConfig(min(cfg.embed_dim, dist.n - 1)))
            edist = embedding_distances(emb)
            aucs = [roc_auc(lof_scores(edist, LofConfig(k_fraction=k)), flags) for k in cfg.k_fractions]
        except Exception as e:
            raise BenchError(f"replication {i}, ratio {r}: {type(e).__name__}: {e}") from e
        return i, ri, aucs, time.perf_counter() - t0

    jobs = [(i, ri) for i in range(reps) for ri in range(R)]
    auc = np.empty((R, K, reps))
    seconds = np.empty((reps, R))
    if cfg.n_jobs and cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(cell, jobs))
    else:
        results = [cell(j) for j in jobs]
    for i, ri, aucs, dt in results:
        auc[ri, :, i] = aucs
        seconds[i, ri] = dt
    return BenchReport(
        ratios=cfg.ratios,
        k_fractions=cfg.k_fractions,
        auc=auc,
        n_in=n_in,
        n_out=tuple(n_outliers(n_in, r) for r in cfg.ratios),
        seeds=seeds,
        seconds=seconds,
        config=cfg.echo(),
    )


# -- sources -----------------------------------------------------------------

def split_by_labels(data: LabeledDataset, inlier_labels: Sequence[str],
                    outlier_labels: Optional[Sequence[str]] = None):
    """Inliers are rows whose label is in ``inlier_labels``; the pool is the rest
    (or only ``outlier_labels`` when given). Pooled classes are unweighted."""
    if data.labels is None:
        raise ValidationError("dataset has no class labels")
    inl = set(inlier_labels)
    labels = np.array(data.labels)
    in_mask = np.isin(labels, list(inl))
    out_mask = ~in_mask if outlier_labels is None else np.isin(labels, list(outlier_labels))
    if not in_mask.any():
        raise ValidationError(f"no rows with labels {sorted(inl)}")
    if not out_mask.any():
        raise ValidationError("outlier pool is empty")
    return data.take(np.flatnonzero(in_mask)), data.take(np.flatnonzero(out_mask))


def load_iris() -> LabeledDataset:
    from .ingest import parse_functional_csv

    text = resources.files("geoutlier").joinpath("data/iris.csv").read_text()
    return parse_functional_csv(text)


def iris_source():
    """Setosa as inliers, versicolor and virginica pooled as outliers."""
    return split_by_labels(load_iris(), ["setosa"])


def generator_source(kind: str, n_in: Optional[int] = None, pool_size: Optional[int] = None,
                     D: Optional[int] = None, seed: int = 0, extra: Optional[dict] = None):
    """Inliers and outlier pool drawn once from a synthetic generator.

    The default pool covers the largest admissible ratio (0.5).
    """
    defaults = DEFAULTS[kind]
    n_in = defaults["n_in"] if n_in is None else n_in
    pool_size = n_outliers(n_in, 0.5) if pool_size is None else pool_size
    spec = GeneratorSpec(kind, n_in, pool_size, defaults["D"] if D is None else D, seed, extra or {})
    data = spec.generate()
    flags = data.structural_flags
    return data.take(np.flatnonzero(~flags)), data.take(np.flatnonzero(flags)), spec.to_dict()
