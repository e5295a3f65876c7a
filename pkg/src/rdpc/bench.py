"""Benchmark sweeps over the synthetic presets.

Four methods are compared at the true number of clusters: complete-linkage
hierarchical clustering with RDPC, Pearson and DTW dissimilarities, and
Euclidean K-means.  Dataset ``s`` of a run with master seed ``m`` is drawn
with seed ``m + s``; K-means uses the same seed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .clustering import agglomerate, cut, kmeans, within_cluster_score
from .dissimilarity import DissimilarityMatrix, pairwise_matrix
from .evaluation import accuracy
from .selection import ElbowCurve, detect_elbows, elbow_curve
from .synthetic import PRESET_NAMES, generate, preset

__all__ = [
    "METHODS",
    "SENSITIVITY_ALPHAS",
    "SENSITIVITY_PS",
    "BenchResult",
    "run_benchmark",
    "sensitivity_grid",
    "method_matrices",
]

METHODS = ("rdpc", "correlation", "dtw", "kmeans")
SENSITIVITY_ALPHAS = (0.05, 0.10, 0.15, 0.20, 0.25)
SENSITIVITY_PS = (0.1, 0.2, 0.3, 0.5, 0.7, 1.0)


def _fmt(x):
    return f"{x:.6f}"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def method_matrices(X, methods=METHODS, alpha=0.2, p=0.1, weights="uniform", n_jobs=1):
    """Dissimilarity matrices for the hierarchical methods among ``methods``."""
    out = {}
    if "rdpc" in methods:
        out["rdpc"] = pairwise_matrix(X, "rdpc", alpha=alpha, p=p, weights=weights, n_jobs=n_jobs)
    if "correlation" in methods:
        out["correlation"] = pairwise_matrix(X, "pearson", n_jobs=n_jobs)
    if "dtw" in methods:
        out["dtw"] = pairwise_matrix(X, "dtw")
    return out


@dataclass
class BenchResult:
    runs: list = field(default_factory=list)      # (dataset, seed, method, accuracy)
    elbows: list = field(default_factory=list)    # (dataset, seed, method, [e1, e2, e3])
    sensitivity: list = field(default_factory=list)  # (dataset, alpha, p, mean accuracy)

    def summary(self):
        """Mean accuracy per (dataset, method), in run order."""
        acc = {}
        for ds, _, m, a in self.runs:
            acc.setdefault((ds, m), []).append(a)
        return {key: float(np.mean(v)) for key, v in acc.items()}

    def runs_csv(self):
        return _csv(["dataset", "seed", "method", "accuracy"], [(d, s, m, _fmt(a)) for d, s, m, a in self.runs])

    def summary_csv(self):
        return _csv(["dataset", "method", "accuracy"], [(d, m, _fmt(a)) for (d, m), a in self.summary().items()])

    def matrix_csv(self):
        summ = self.summary()
        datasets = list(dict.fromkeys(d for d, _ in summ))
        methods = list(dict.fromkeys(m for _, m in summ))
        rows = [[d] + [_fmt(summ[(d, m)]) if (d, m) in summ else "" for m in methods] for d in datasets]
        return _csv(["dataset"] + methods, rows)

    def elbows_csv(self):
        rows = []
        for d, s, m, e in self.elbows:
            e = list(e) + [""] * (3 - len(e))
            rows.append([d, s, m] + e[:3])
        return _csv(["dataset", "seed", "method", "e1", "e2", "e3"], rows)

    def sensitivity_csv(self):
        return _csv(
            ["dataset", "alpha", "p", "accuracy"],
            [(d, f"{a:.2f}", f"{p:.1f}", _fmt(acc)) for d, a, p, acc in self.sensitivity],
        )


def run_benchmark(
    presets=PRESET_NAMES,
    seeds: int = 10,
    master_seed: int = 0,
    methods=METHODS,
    alpha: float = 0.2,
    p: float = 0.1,
    weights="uniform",
    linkage: str = "complete",
    elbows: bool = False,
    k_range=(1, 15),
    n_jobs: int = 1,
) -> BenchResult:
    """Accuracy at the true ``k`` for every preset, seed and method.

    With ``elbows=True`` each method's elbow curve over ``k_range`` is also
    evaluated and its first three elbow points recorded.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}; expected a subset of {METHODS}")
    res = BenchResult()
    for name in presets:
        for s in range(seeds):
            ds = generate(preset(name, seed=master_seed + s))
            k = ds.spec.k
            mats = method_matrices(ds.series, methods, alpha, p, weights, n_jobs)
            for m in methods:
                if m == "kmeans":
                    labels = kmeans(ds.series, k, seed=master_seed + s).labels
                    res.runs.append((name, s, m, accuracy(ds.labels, labels)))
                    if elbows:
                        curve = elbow_curve(ds.series, "kmeans", k_range=k_range, seed=master_seed + s)
                        res.elbows.append((name, s, m, detect_elbows(curve)))
                    continue
                tree = agglomerate(mats[m], linkage)
                res.runs.append((name, s, m, accuracy(ds.labels, cut(tree, k))))
                if elbows:
                    ks = np.arange(k_range[0], k_range[1] + 1)
                    scores = [within_cluster_score(mats[m].values, cut(tree, kk)) for kk in ks]
                    res.elbows.append((name, s, m, detect_elbows(ElbowCurve(ks, scores, m))))
    return res


def sensitivity_grid(
    presets=PRESET_NAMES,
    seeds: int = 3,
    master_seed: int = 0,
    alphas=SENSITIVITY_ALPHAS,
    ps=SENSITIVITY_PS,
    linkage: str = "complete",
    n_jobs: int = 1,
    result: BenchResult | None = None,
) -> BenchResult:
    """Mean RDPC accuracy over seeds for every (preset, alpha, p) cell.

    The RankDiff matrix is computed once per ``p`` and the Pearson matrix
    once per dataset; each cell recombines them, which reproduces
    ``pairwise_matrix(..., "rdpc", alpha=a, p=p)`` exactly.
    """
    res = result if result is not None else BenchResult()
    for name in presets:
        acc = np.zeros((len(alphas), len(ps)))
        for s in range(seeds):
            ds = generate(preset(name, seed=master_seed + s))
            corr = pairwise_matrix(ds.series, "pearson", n_jobs=n_jobs).values
            for j, pv in enumerate(ps):
                rd = pairwise_matrix(ds.series, "rdpc", alpha=1.0, p=pv, n_jobs=n_jobs).values
                for i, a in enumerate(alphas):
                    D = DissimilarityMatrix(a * rd + (1.0 - a) * corr, "rdpc", {"alpha": a, "p": pv})
                    acc[i, j] += accuracy(ds.labels, cut(agglomerate(D, linkage), ds.spec.k))
        acc /= seeds
        for i, a in enumerate(alphas):
            for j, pv in enumerate(ps):
                res.sensitivity.append((name, float(a), float(pv), float(acc[i, j])))
    return res
