"""Geometric outlier detection: pairwise distances, classical MDS, LOF scoring."""

from .bench import BenchConfig, BenchReport, contaminate, roc_auc, run_benchmark
from .core import (
    DistanceMatrix,
    Embedding,
    Graph,
    LabeledDataset,
    ScoreVector,
    ranks_from_scores,
    validate_distance_matrix,
)
from .embed import MdsConfig, reconstruction_error, torgerson_mds
from .lof import LofConfig, lof_scores, resolve_k
from .metrics import (
    MetricSpec,
    dtw_distance,
    frobenius_laplacian_distance,
    laplacian,
    lp_distance,
    pairwise_matrix,
    wasserstein1_distance,
)

__version__ = "0.1.0"
