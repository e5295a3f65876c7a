"""Ranked-differences Pearson correlation (RDPC) time series clustering."""

__version__ = "0.1.0"

from .dissimilarity import (
    MEASURES,
    DegenerateInputError,
    DissimilarityMatrix,
    RdpcParams,
    WeightScheme,
    dtw,
    euclidean,
    make_weights,
    pairwise_matrix,
    pearson_correlation,
    pearson_dissimilarity,
    rank_count,
    rank_diff,
    rdpc,
)
from .clustering import Dendrogram, KMeansResult, agglomerate, cut, kmeans, within_cluster_score
from .selection import ElbowCurve, detect_elbows, elbow_curve
from .evaluation import accuracy, contingency
from .synthetic import DatasetSpec, LabeledDataset, generate, preset
from .application import (
    ConsumptionDataset,
    ingest_csv,
    make_consumption_standin,
    outlier_split,
    profile,
    trend_classify,
)
