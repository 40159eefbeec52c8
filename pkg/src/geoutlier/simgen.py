"""Synthetic datasets with ground-truth structural and distributional labels.

Randomness: every dataset derives from ``numpy.random.SeedSequence(seed)``,
which is spawned into one child stream per observation (in output order);
each child drives a PCG64 generator. Outputs therefore do not depend on
platform or on how observations are batched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import scipy.stats

from .core import Graph, LabeledDataset, ValidationError

RNG_NAME = "numpy.PCG64/SeedSequence.spawn(per-observation)"


class InvalidProbability(ValidationError):
    pass


class BetaDensityOverflow(ArithmeticError):
    pass


class UnsupportedFamily(ValidationError):
    pass


def _streams(seed: int, n: int) -> list:
    children = np.random.SeedSequence(int(seed)).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _check_counts(n_in, n_out, D):
    if n_in < 1 or n_out < 0 or D < 1:
        raise ValidationError(f"need n_in >= 1, n_out >= 0, D >= 1 (got {n_in}, {n_out}, {D})")


@dataclass(frozen=True)
class GeneratorSpec:
    """Everything needed to regenerate a dataset bit for bit."""

    kind: str
    n_in: int
    n_out: int
    D: int
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ValidationError(f"unknown generator {self.kind!r}; choose from {sorted(GENERATORS)}")
        _check_counts(self.n_in, self.n_out, self.D)
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def generate(self) -> LabeledDataset:
        return GENERATORS[self.kind](self)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rng"] = RNG_NAME
        return d


def gen_dataset_a(n_in: int = 100, n_out: int = 10, D: int = 500, seed: int = 0,
                  n_cosine: Optional[int] = None) -> LabeledDataset:
    """Functional curves on a uniform grid of ``D`` points in [0, 1].

    Inliers ``a + 0.01 t + sin(pi t^2)`` with ``a ~ N(15, 4)``. Outliers come
    from two families: ``b + 0.05 t + cos(20 pi t)`` with ``b ~ N(5, 3)``
    (the first ``n_cosine`` outliers, default ``ceil(n_out / 2)``) and
    ``c - 0.05 t + e_t`` with ``c ~ N(25, 3)`` and white noise
    ``e_t ~ N(0, 4)`` per grid point. Normal parameters are (mean, sd).
    """
    _check_counts(n_in, n_out, D)
    n_cosine = n_out - n_out // 2 if n_cosine is None else n_cosine
    if not 0 <= n_cosine <= n_out:
        raise ValidationError("n_cosine must lie in [0, n_out]")
    t = np.linspace(0.0, 1.0, D)
    rngs = _streams(seed, n_in + n_out)
    X = np.empty((n_in + n_out, D))
    params = np.full((n_in + n_out, 3), np.nan)
    for i, rng in enumerate(rngs):
        if i < n_in:
            a = rng.normal(15.0, 4.0)
            X[i] = a + 0.01 * t + np.sin(np.pi * t**2)
            params[i, 0] = a
        elif i < n_in + n_cosine:
            b = rng.normal(5.0, 3.0)
            X[i] = b + 0.05 * t + np.cos(20 * np.pi * t)
            params[i, 1] = b
        else:
            c = rng.normal(25.0, 3.0)
            X[i] = (c - 0.05 * t) + rng.normal(0.0, 4.0, size=D)
            params[i, 2] = c
    flags = np.arange(n_in + n_out) >= n_in
    return LabeledDataset(X, structural_flags=flags, params=params, param_names=("a", "b", "c"))


def beta_grid(D: int) -> np.ndarray:
    """Interior midpoint grid ``(k + 1/2) / D``; avoids the Beta density's endpoint poles."""
    return (np.arange(D) + 0.5) / D


def beta_curve(alpha: float, beta: float, D: int) -> np.ndarray:
    return scipy.stats.beta.pdf(beta_grid(D), alpha, beta)


def gen_dataset_b(n_in: int = 100, n_out: int = 10, D: int = 50, seed: int = 0) -> LabeledDataset:
    """Beta(alpha, beta) density curves, alpha, beta ~ U[0.1, 2].

    Outliers are the same curves shifted vertically by ``b ~ U[-5, 5]``.
    ``params`` columns are (alpha, beta, b) with ``b = 0`` for inliers.
    """
    _check_counts(n_in, n_out, D)
    rngs = _streams(seed, n_in + n_out)
    X = np.empty((n_in + n_out, D))
    params = np.zeros((n_in + n_out, 3))
    for i, rng in enumerate(rngs):
        a, b = rng.uniform(0.1, 2.0, size=2)
        shift = rng.uniform(-5.0, 5.0) if i >= n_in else 0.0
        X[i] = shift + beta_curve(a, b, D)
        params[i] = a, b, shift
    if not np.all(np.isfinite(X)):
        raise BetaDensityOverflow("Beta density overflowed on the evaluation grid")
    flags = np.arange(n_in + n_out) >= n_in
    return LabeledDataset(X, structural_flags=flags, params=params, param_names=("alpha", "beta", "b"))


def er_graph(vertices: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi G(n, p); one uniform draw per vertex pair in (u, v) lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"edge probability {p!r} outside [0, 1]")
    iu, ju = np.triu_indices(vertices, 1)
    keep = rng.random(iu.size) < p
    return Graph(vertices, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_er_graphs(n_in: int = 100, n_out: int = 10, vertices: int = 20, p_in: float = 0.1,
                  p_out: float = 0.4, seed: int = 0) -> LabeledDataset:
    _check_counts(n_in, n_out, vertices)
    for p in (p_in, p_out):
        if not 0.0 <= p <= 1.0:
            raise InvalidProbability(f"edge probability {p!r} outside [0, 1]")
    rngs = _streams(seed, n_in + n_out)
    graphs = [er_graph(vertices, p_in if i < n_in else p_out, rng) for i, rng in enumerate(rngs)]
    flags = np.arange(n_in + n_out) >= n_in
    probs = np.where(flags, p_out, p_in)
    return LabeledDataset(graphs, structural_flags=flags, params=probs, param_names=("p",))


def gen_gaussian(n_in: int = 750, n_out: int = 0, D: int = 1000, seed: int = 0) -> LabeledDataset:
    """Inliers ~ N(0, I_D); outliers ~ N(1, I_D)."""
    _check_counts(n_in, n_out, D)
    rngs = _streams(seed, n_in + n_out)
    X = np.stack([rng.standard_normal(D) for rng in rngs])
    X[n_in:] += 1.0
    flags = np.arange(n_in + n_out) >= n_in
    return LabeledDataset(X, structural_flags=flags)


@dataclass(frozen=True)
class MinimumVolumeSpec:
    family: str = "normal"
    mu: float = 0.0
    sigma: float = 1.0
    alpha: float = 0.95

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.family == "normal" and not self.sigma > 0:
            raise ValidationError("sigma must be positive")


def minimum_volume_interval(spec: MinimumVolumeSpec) -> tuple:
    """Smallest interval with probability ``alpha``; central for the normal family."""
    if spec.family != "normal":
        raise UnsupportedFamily(f"minimum volume sets only implemented for 'normal', not {spec.family!r}")
    z = scipy.stats.norm.ppf((1.0 + spec.alpha) / 2.0)
    return spec.mu - z * spec.sigma, spec.mu + z * spec.sigma


def distributional_labels(params, spec: MinimumVolumeSpec) -> np.ndarray:
    """True where a generating parameter falls outside the minimum volume set."""
    lo, hi = minimum_volume_interval(spec)
    theta = np.asarray(params, dtype=float)
    return (theta < lo) | (theta > hi)


def label_dataset_a(data: LabeledDataset, alpha: float = 0.95) -> LabeledDataset:
    """Attach distributional flags to dataset A inliers from their intercepts."""
    a = data.params[:, 0]
    inlier = ~data.structural_flags
    flags = np.zeros(data.n, dtype=bool)
    flags[inlier] = distributional_labels(a[inlier], MinimumVolumeSpec("normal", 15.0, 4.0, alpha))
    return LabeledDataset(data.observations, data.structural_flags, flags, data.params,
                          data.param_names, data.labels)


def _gen_a(s):
    ds = gen_dataset_a(s.n_in, s.n_out, s.D, s.seed, s.extra.get("n_cosine"))
    if "alpha" in s.extra:
        ds = label_dataset_a(ds, float(s.extra["alpha"]))
    return ds


GENERATORS = {
    "dataset_a": _gen_a,
    "dataset_b": lambda s: gen_dataset_b(s.n_in, s.n_out, s.D, s.seed),
    "er_graphs": lambda s: gen_er_graphs(s.n_in, s.n_out, s.D, s.extra.get("p_in", 0.1),
                                         s.extra.get("p_out", 0.4), s.seed),
    "gaussian": lambda s: gen_gaussian(s.n_in, s.n_out, s.D, s.seed),
}

DEFAULTS = {
    "dataset_a": dict(n_in=100, n_out=10, D=500),
    "dataset_b": dict(n_in=100, n_out=10, D=50),
    "er_graphs": dict(n_in=100, n_out=10, D=20),
    "gaussian": dict(n_in=750, n_out=0, D=1000),
}
