"""Elbow curves over a range of cluster counts and elbow-point detection."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .clustering import agglomerate, cut, kmeans, within_cluster_score
from .dissimilarity import DissimilarityMatrix, pairwise_matrix

__all__ = ["ElbowCurve", "elbow_curve", "detect_elbows"]


@dataclass
class ElbowCurve:
    ks: np.ndarray
    scores: np.ndarray
    method: str = ""

    def __post_init__(self):
        self.ks = np.asarray(self.ks, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.ks.shape != self.scores.shape:
            raise ValueError("ks and scores differ in length")
        if np.any(np.diff(self.ks) <= 0):
            raise ValueError("ks must be strictly ascending")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "score"])
        for k, s in zip(self.ks, self.scores):
            w.writerow([int(k), repr(float(s))])
        return buf.getvalue()


def elbow_curve(
    data,
    method: str = "hierarchical",
    measure: str = "rdpc",
    k_range=(1, 15),
    *,
    linkage: str = "complete",
    seed: int = 0,
    restarts: int = 10,
    matrix: DissimilarityMatrix | None = None,
    **params,
) -> ElbowCurve:
    """Within-cluster score for every ``k`` in ``k_range`` (inclusive).

    ``method="hierarchical"`` builds one dendrogram over ``measure`` and cuts
    it at each ``k``; the score is :func:`within_cluster_score` on the same
    matrix.  ``method="kmeans"`` runs K-means once per ``k`` with the same
    seed and reports its WSS.
    """
    k_min, k_max = int(k_range[0]), int(k_range[1])
    X = None if data is None else np.asarray(data, dtype=np.float64)
    n = X.shape[0] if X is not None else matrix.n
    if k_min < 1 or k_max > n or k_min > k_max:
        raise ValueError(f"k range [{k_min}, {k_max}] invalid for {n} series")
    ks = np.arange(k_min, k_max + 1)
    if method == "kmeans":
        scores = [kmeans(X, k, seed=seed, restarts=restarts).wss for k in ks]
        return ElbowCurve(ks, scores, "kmeans(euclidean)")
    if method != "hierarchical":
        raise ValueError(f"unknown method {method!r}")
    if matrix is None:
        matrix = pairwise_matrix(X, measure, **params)
    tree = agglomerate(matrix, linkage)
    scores = [within_cluster_score(matrix.values, cut(tree, k)) for k in ks]
    return ElbowCurve(ks, scores, f"hierarchical-{linkage}({matrix.tag})")


def detect_elbows(curve: ElbowCurve, max_points: int = 3) -> list[int]:
    """Up to ``max_points`` elbow locations, ascending.

    Both axes are rescaled to [0, 1]; candidates are interior ``k`` whose
    discrete second difference ``W(k-1) - 2W(k) + W(k+1)`` is positive and a
    local maximum.  The strongest candidates are kept.
    """
    if curve.ks.size < 3:
        raise ValueError("need at least three points on the curve to locate an elbow")
    if np.unique(np.diff(curve.ks)).size != 1:
        raise ValueError("elbow detection needs evenly spaced k values")
    if max_points < 1:
        return []
    w = curve.scores
    span = w.max() - w.min()
    if span <= 0:
        return []
    y = (w - w.min()) / span
    dx = 1.0 / (curve.ks[-1] - curve.ks[0])
    d2 = (y[:-2] - 2.0 * y[1:-1] + y[2:]) / dx
    m = d2.size
    cand = []
    for i in range(m):
        if d2[i] <= 1e-12:
            continue
        left = d2[i - 1] if i > 0 else -np.inf
        right = d2[i + 1] if i + 1 < m else -np.inf
        if d2[i] > left and d2[i] >= right:
            cand.append(i)
    cand.sort(key=lambda i: (-d2[i], i))
    return sorted(int(curve.ks[i + 1]) for i in cand[:max_points])
