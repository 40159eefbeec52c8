"""Command-line interface: generate, score, bench, plot.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or validation
error. Diagnostics go to stderr; stdout carries machine-readable output when
``--out`` is omitted.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import bench, ingest
from .core import LabeledDataset, ValidationError, validate_distance_matrix
from .embed import MdsConfig, embedding_distances, torgerson_mds
from .ingest import fmt
from .lof import LofConfig, lof_scores
from .metrics import MetricSpec, pairwise_matrix
from .plot import scatter_svg
from .simgen import DEFAULTS, GeneratorSpec


class UsageError(ValidationError):
    pass


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- generate ----------------------------------------------------------------

def cmd_generate(args) -> int:
    kind = args.kind.replace("-", "_")
    d = DEFAULTS[kind]
    extra = {}
    if kind == "er_graphs":
        extra = {"p_in": args.p_in, "p_out": args.p_out}
    if kind == "dataset_a" and args.alpha is not None:
        extra["alpha"] = args.alpha
    spec = GeneratorSpec(
        kind,
        d["n_in"] if args.n_in is None else args.n_in,
        (d["n_out"] if args.n_out is None else args.n_out),
        d["D"] if args.dim is None else args.dim,
        args.seed,
        extra,
    )
    data = spec.generate()
    ingest.write_dataset(args.out, data, {"generator": spec.to_dict()})
    return 0


# -- score -------------------------------------------------------------------

def _load_for_scoring(args):
    if args.distance_matrix:
        dist = validate_distance_matrix(ingest.read_distance_csv(args.input))
        meta = ingest.read_metadata(args.input) or {}
        return dist, meta.get("structural_flags"), None
    data = ingest.read_dataset(args.input)
    kind = args.metric or ("frobenius_laplacian" if data.kind == "graph" else "lp")
    metric = MetricSpec(kind, args.p)
    dist = pairwise_matrix(data, metric)
    return dist, data.structural_flags, data.labels


def score_table(dist, flags, labels, embed_dim: int, k_fraction: float, raw: bool) -> str:
    coords = np.empty((dist.n, 0))
    if raw:
        scored = dist
    else:
        emb = torgerson_mds(dist, MdsConfig(min(embed_dim, dist.n - 1)))
        coords = emb.coords
        scored = embedding_distances(emb)
    sv = lof_scores(scored, LofConfig(k_fraction=k_fraction))
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["index", "label", "structural", "score", "rank"] + [f"x{j + 1}" for j in range(coords.shape[1])])
    for i in range(dist.n):
        w.writerow([
            i,
            "" if labels is None else labels[i],
            "" if flags is None else int(bool(flags[i])),
            fmt(sv.scores[i]),
            int(sv.ranks[i]),
        ] + [fmt(c) for c in coords[i]])
    return out.getvalue()


def cmd_score(args) -> int:
    dist, flags, labels = _load_for_scoring(args)
    _emit(score_table(dist, flags, labels, args.embed_dim, args.k_fraction, args.raw_distances), args.out)
    return 0


# -- bench -------------------------------------------------------------------

LIST_KEYS = {"ratios", "k_fractions", "inlier_labels", "outlier_labels"}
INT_KEYS = {"replications", "embed_dim", "base_seed", "n_in", "pool_size", "D", "data_seed", "n_jobs"}
FLOAT_KEYS = {"p", "p_in", "p_out"}
STR_KEYS = {"source", "path", "metric", "name"}
REQUIRED = ("source",)
SOURCES = ("iris", "csv", "edges", "gaussian", "dataset_a", "dataset_b", "er_graphs")


def parse_config(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; lists are comma-separated."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in LIST_KEYS | INT_KEYS | FLOAT_KEYS | STR_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in LIST_KEYS:
                items = [v.strip() for v in value.split(",") if v.strip()]
                cfg[key] = items if key.endswith("labels") else [float(v) for v in items]
            elif key in INT_KEYS:
                cfg[key] = int(value)
            elif key in FLOAT_KEYS:
                cfg[key] = float(value)
            else:
                cfg[key] = value
        except ValueError:
            raise UsageError(f"config line {lineno}: bad value for {key!r}: {value!r}") from None
    for key in REQUIRED:
        if key not in cfg:
            raise UsageError(f"missing required key {key!r}")
    return cfg


def build_bench_config(cfg: dict, base_dir: Path = Path(".")) -> bench.BenchConfig:
    source = cfg["source"].replace("-", "_")
    if source not in SOURCES:
        raise UsageError(f"unknown source {source!r}; choose from {', '.join(SOURCES)}")
    if source == "iris":
        inliers, pool = bench.iris_source()
        echo = {"source": "iris", "inliers": "setosa", "outliers": "versicolor+virginica"}
    elif source in ("csv", "edges"):
        for key in ("path", "inlier_labels"):
            if key not in cfg:
                raise UsageError(f"missing required key {key!r} for source {source!r}")
        path = base_dir / cfg["path"]
        data = ingest.read_edge_list(path) if source == "edges" else ingest.read_functional_csv(path)
        inliers, pool = bench.split_by_labels(data, cfg["inlier_labels"], cfg.get("outlier_labels"))
        echo = {"source": source, "path": cfg["path"], "inlier_labels": cfg["inlier_labels"],
                "outlier_labels": cfg.get("outlier_labels", "all others")}
    else:
        extra = {k: cfg[k] for k in ("p_in", "p_out") if k in cfg}
        inliers, pool, echo = bench.generator_source(
            source, cfg.get("n_in"), cfg.get("pool_size"), cfg.get("D"), cfg.get("data_seed", 0), extra)
    default_metric = "frobenius_laplacian" if inliers.kind == "graph" else "lp"
    return bench.BenchConfig(
        inliers,
        pool,
        ratios=tuple(cfg.get("ratios", bench.DEFAULT_RATIOS)),
        k_fractions=tuple(cfg.get("k_fractions", bench.DEFAULT_K_FRACTIONS)),
        replications=cfg.get("replications", 50),
        embed_dim=cfg.get("embed_dim", 2),
        metric=MetricSpec(cfg.get("metric", default_metric), cfg.get("p", 2.0)),
        base_seed=cfg.get("base_seed", 0),
        name=cfg.get("name", source),
        source=echo,
        n_jobs=cfg.get("n_jobs"),
    )


def cmd_bench(args) -> int:
    path = Path(args.config)
    cfg = build_bench_config(parse_config(path.read_text()), path.parent)
    report = bench.run_benchmark(cfg)
    if args.out:
        Path(args.out).write_text(report.to_csv())
        Path(args.out).with_suffix(".txt").write_text(report.to_table())
        sys.stderr.write(report.to_table())
    else:
        sys.stdout.write(report.to_csv())
    return 0


# -- plot --------------------------------------------------------------------

def read_scores(path):
    rows = list(csv.DictReader(io.StringIO(Path(path).read_text())))
    if not rows:
        raise UsageError("scores file has no rows")
    cols = [c for c in rows[0] if c.startswith("x") and c[1:].isdigit()]
    if len(cols) < 2:
        raise UsageError("scores file needs at least 2 embedding columns (x1, x2)")
    coords = np.array([[float(r[c]) for c in cols] for r in rows])
    ranks = np.array([int(r["rank"]) for r in rows])
    raw_flags = [r.get("structural", "") for r in rows]
    flags = None if all(f == "" for f in raw_flags) else np.array([f == "1" for f in raw_flags])
    return coords, ranks, flags


def cmd_plot(args) -> int:
    coords, ranks, flags = read_scores(args.scores)
    _emit(scatter_svg(coords, ranks, flags, top=args.top, title=args.title), args.out)
    return 0


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoutlier", description="Distance -> MDS -> LOF outlier detection")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset plus metadata sidecar")
    g.add_argument("kind", choices=["dataset-a", "dataset-b", "er-graphs", "gaussian"])
    g.add_argument("--n-in", type=int)
    g.add_argument("--n-out", type=int)
    g.add_argument("--dim", type=int, help="evaluation points, dimension, or vertex count")
    g.add_argument("--p-in", type=float, default=0.1)
    g.add_argument("--p-out", type=float, default=0.4)
    g.add_argument("--alpha", type=float, help="dataset-a: flag distributional outliers at this level")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("score", help="LOF scores and ranks per observation")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--metric", choices=["lp", "dtw", "wasserstein1", "frobenius_laplacian"])
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--embed-dim", type=int, default=2)
    s.add_argument("--k-fraction", type=float, default=0.75)
    s.add_argument("--raw-distances", action="store_true", help="score on input distances, skip embedding")
    s.add_argument("--distance-matrix", action="store_true", help="input is a precomputed distance matrix CSV")
    s.add_argument("--out")
    s.set_defaults(func=cmd_score)

    b = sub.add_parser("bench", help="contamination benchmark from a key = value config")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", help="SVG scatter of a 2-D embedding from score output")
    p.add_argument("--scores", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--title")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
