"""Agglomerative hierarchical clustering, dendrogram cuts and Lloyd K-means."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dissimilarity import DissimilarityMatrix

__all__ = [
    "LINKAGES",
    "Dendrogram",
    "KMeansResult",
    "agglomerate",
    "cut",
    "kmeans",
    "within_cluster_score",
    "relabel_by_appearance",
]

LINKAGES = ("complete", "average", "single")


@dataclass
class Dendrogram:
    """Merge history of an agglomerative run.

    Leaves are ``0..n-1``; merge ``s`` creates cluster ``n + s`` from
    ``left[s] < right[s]`` at ``heights[s]``.
    """

    n: int
    left: np.ndarray
    right: np.ndarray
    heights: np.ndarray
    linkage: str = "complete"
    measure: str = "custom"

    @property
    def merges(self):
        return [
            (int(a), int(b), float(h), self.n + s)
            for s, (a, b, h) in enumerate(zip(self.left, self.right, self.heights))
        ]

    def to_dict(self):
        return {
            "n": self.n,
            "linkage": self.linkage,
            "measure": self.measure,
            "merges": [
                {"left": a, "right": b, "height": h, "id": c} for a, b, h, c in self.merges
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        m = d["merges"]
        return cls(
            n=int(d["n"]),
            left=np.array([x["left"] for x in m], dtype=np.int64),
            right=np.array([x["right"] for x in m], dtype=np.int64),
            heights=np.array([x["height"] for x in m], dtype=np.float64),
            linkage=d.get("linkage", "complete"),
            measure=d.get("measure", "custom"),
        )

    def to_linkage_matrix(self) -> np.ndarray:
        """SciPy-style ``(n-1, 4)`` linkage matrix, for plotting."""
        sizes = np.ones(2 * self.n - 1)
        Z = np.empty((self.n - 1, 4))
        for s, (a, b, h, c) in enumerate(self.merges):
            sizes[c] = sizes[a] + sizes[b]
            Z[s] = (a, b, h, sizes[c])
        return Z


def _matrix_values(matrix):
    if isinstance(matrix, DissimilarityMatrix):
        return matrix.values.copy(), matrix.tag
    D = np.array(matrix, dtype=np.float64)
    DissimilarityMatrix(D)  # validation only
    return D, "custom"


def agglomerate(matrix, linkage: str = "complete") -> Dendrogram:
    """Agglomerative clustering by repeated closest-pair merging.

    Cluster dissimilarities are updated with the Lance-Williams rule for the
    chosen linkage.  Exact ties are broken by the lexicographically smallest
    ``(min id, max id)`` pair of cluster ids.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    D, tag = _matrix_values(matrix)
    n = D.shape[0]
    if n < 2:
        raise ValueError("need at least two points to cluster")

    W = D.copy()
    np.fill_diagonal(W, np.inf)
    ids = np.arange(n)
    sizes = np.ones(n)
    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1)

    for step in range(n - 1):
        flat = int(np.argmin(W))
        h = W.flat[flat]
        a, b = divmod(flat, n)
        ties = np.flatnonzero(W == h)
        if ties.size > 2:
            sa, sb = np.divmod(ties, n)
            lo = np.minimum(ids[sa], ids[sb])
            hi = np.maximum(ids[sa], ids[sb])
            pick = np.lexsort((hi, lo))[0]
            a, b = int(sa[pick]), int(sb[pick])
        if a > b:
            a, b = b, a
        ia, ib = ids[a], ids[b]
        left[step], right[step] = min(ia, ib), max(ia, ib)
        heights[step] = h

        da, db = W[a], W[b]
        if linkage == "complete":
            new = np.maximum(da, db)
        elif linkage == "single":
            new = np.minimum(da, db)
        else:
            new = (sizes[a] * da + sizes[b] * db) / (sizes[a] + sizes[b])
        # inactive slots stay at +inf under all three rules
        new[a] = np.inf
        new[b] = np.inf
        W[a, :] = new
        W[:, a] = new
        W[b, :] = np.inf
        W[:, b] = np.inf
        sizes[a] += sizes[b]
        ids[a] = n + step

    return Dendrogram(n, left, right, heights, linkage, tag)


def relabel_by_appearance(labels) -> np.ndarray:
    """Renumber labels ``1..k`` in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse].astype(np.int64) + 1


def cut(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Flat labels ``1..k`` obtained by undoing the last ``k-1`` merges."""
    n = dendrogram.n
    if int(k) != k or not 1 <= k <= n:
        raise ValueError(f"k must be an integer in [1, {n}], got {k!r}")
    parent = np.arange(2 * n - 1)

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for s in range(n - int(k)):
        c = n + s
        parent[find(dendrogram.left[s])] = c
        parent[find(dendrogram.right[s])] = c
    roots = np.array([find(i) for i in range(n)])
    return relabel_by_appearance(roots)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    wss: float
    iterations: int
    seed: int
    history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _sq_dists(X, C):
    # (n, k) squared Euclidean distances
    return np.maximum(
        (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :], 0.0
    )


def _lloyd(X, k, rng, max_iter):
    n = X.shape[0]
    C = X[rng.choice(n, size=k, replace=False)].copy()
    labels = None
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        d = _sq_dists(X, C)
        new = np.argmin(d, axis=1)
        counts = np.bincount(new, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            own = d[np.arange(n), new]
            taken = set()
            for e in empty:
                for idx in np.argsort(-own, kind="stable"):
                    if idx not in taken and counts[new[idx]] > 1:
                        break
                taken.add(idx)
                counts[new[idx]] -= 1
                new[idx] = e
                counts[e] = 1
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        C = np.stack([X[labels == j].mean(axis=0) for j in range(k)])
        history.append(float(((X - C[labels]) ** 2).sum()))
    wss = float(((X - C[labels]) ** 2).sum())
    return labels, C, wss, it, history


def kmeans(data, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 100) -> KMeansResult:
    """Euclidean K-means (Lloyd), best of ``restarts`` runs by WSS.

    Restart ``i`` draws its initial centroids, ``k`` distinct data points,
    from a generator seeded with ``seed + i``.  An empty cluster takes over
    the point lying farthest from its own centroid.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("kmeans needs a non-empty 2-D dataset")
    n = X.shape[0]
    if int(k) != k or not 1 <= k <= n:
        raise ValueError(f"k must be an integer in [1, {n}], got {k!r}")
    if restarts < 1 or max_iter < 1:
        raise ValueError("restarts and max_iter must be positive")
    best = None
    for i in range(restarts):
        rng = np.random.default_rng(seed + i)
        labels, C, wss, it, hist = _lloyd(X, int(k), rng, max_iter)
        if best is None or wss < best.wss:
            best = KMeansResult(labels + 1, C, wss, it, seed + i, hist)
    return best


def within_cluster_score(matrix, labels) -> float:
    """Sum over clusters of ``1/(2|C|)`` times the within-cluster pair sum.

    Pairs are ordered, so each unordered pair counts twice.  With squared
    Euclidean entries this is the K-means WSS.
    """
    D = np.asarray(matrix, dtype=np.float64)
    labels = np.asarray(labels)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or labels.shape != (D.shape[0],):
        raise ValueError(f"labels of shape {labels.shape} do not cover a matrix of shape {D.shape}")
    total = 0.0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size > 1:
            total += D[np.ix_(idx, idx)].sum() / (2.0 * idx.size)
    return float(total)
