"""Clustering accuracy under the best one-to-one cluster/class matching."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["ContingencyTable", "contingency", "accuracy"]


@dataclass
class ContingencyTable:
    counts: np.ndarray
    true_classes: np.ndarray
    pred_classes: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def contingency(true_labels, pred_labels) -> ContingencyTable:
    """``counts[a, b]`` = points with the a-th true class and b-th predicted cluster.

    Rows and columns follow the sorted label values, whatever their type.
    """
    t = np.asarray(true_labels)
    p = np.asarray(pred_labels)
    if t.ndim != 1 or t.shape != p.shape:
        raise ValueError(f"label vectors differ in shape: {t.shape} vs {p.shape}")
    tc, ti = np.unique(t, return_inverse=True)
    pc, pi = np.unique(p, return_inverse=True)
    counts = np.zeros((tc.size, pc.size), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts, tc, pc)


def accuracy(true_labels, pred_labels) -> float:
    """Fraction of points correctly labelled after optimal matching.

    Each predicted cluster maps to at most one true class and vice versa;
    surplus clusters on either side match nothing.
    """
    if len(true_labels) == 0:
        raise ValueError("accuracy of an empty labelling is undefined")
    table = contingency(true_labels, pred_labels)
    rows, cols = linear_sum_assignment(table.counts, maximize=True)
    return float(table.counts[rows, cols].sum()) / table.total
