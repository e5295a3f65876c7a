"""Pairwise dissimilarity measures for univariate time series.

RankDiff averages the largest element-wise absolute differences between two
series, the Pearson dissimilarity is ``1 - corr``, and RDPC interpolates the
two.  Euclidean and DTW distances are included as baselines.  Every measure
has a scalar form (two series) and a vectorised path used by
:func:`pairwise_matrix`.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from numba import njit, prange

__all__ = [
    "DegenerateInputError",
    "WeightScheme",
    "RdpcParams",
    "DissimilarityMatrix",
    "MEASURES",
    "make_weights",
    "rank_count",
    "rank_diff",
    "pearson_correlation",
    "pearson_dissimilarity",
    "rdpc",
    "euclidean",
    "dtw",
    "pairwise_matrix",
]

# numba probes TBB before falling back to OpenMP; an old TBB only costs a warning
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

MEASURES = ("rdpc", "pearson", "euclidean", "dtw")

_WEIGHT_KINDS = ("uniform", "increasing", "decreasing", "explicit")
_SUM_TOL = 1e-12


class DegenerateInputError(ValueError):
    """A series cannot be used by a correlation-based measure (zero variance)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class WeightScheme:
    """How the ``r`` rank weights are built.

    ``increasing`` puts the smallest weight on the largest difference,
    ``decreasing`` the largest.  ``explicit`` takes ``weights`` verbatim.
    """

    kind: str = "uniform"
    weights: tuple | None = None

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight scheme {self.kind!r}; expected one of {_WEIGHT_KINDS}")
        if self.kind == "explicit":
            if self.weights is None:
                raise ValueError("explicit weight scheme needs weights")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        elif self.weights is not None:
            raise ValueError(f"weights given for non-explicit scheme {self.kind!r}")

    @classmethod
    def coerce(cls, value) -> "WeightScheme":
        if isinstance(value, WeightScheme):
            return value
        if isinstance(value, str):
            return cls(value)
        return cls("explicit", tuple(value))

    def __str__(self):
        if self.kind == "explicit":
            return "explicit(" + ",".join(repr(w) for w in self.weights) + ")"
        return self.kind


WeightLike = Union[WeightScheme, str, Sequence[float]]


def make_weights(scheme: WeightLike, r: int) -> np.ndarray:
    """Materialise ``r`` positive weights summing to one.

    >>> make_weights("increasing", 3)
    array([0.16666667, 0.33333333, 0.5       ])
    """
    scheme = WeightScheme.coerce(scheme)
    if int(r) != r or r < 1:
        raise ValueError(f"rank count must be a positive integer, got {r!r}")
    r = int(r)
    j = np.arange(1, r + 1, dtype=np.float64)
    if scheme.kind == "uniform":
        w = np.full(r, 1.0 / r)
    elif scheme.kind == "increasing":
        w = 2.0 * j / (r * (r + 1))
    elif scheme.kind == "decreasing":
        w = 2.0 * (r - j + 1) / (r * (r + 1))
    else:
        w = np.asarray(scheme.weights, dtype=np.float64)
        if w.shape != (r,):
            raise ValueError(f"explicit weights have length {w.size}, need {r}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("explicit weights must be finite and strictly positive")
        if abs(w.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"explicit weights sum to {w.sum()!r}, not 1")
    return w


def rank_count(p: float, n: int) -> int:
    """``ceil(p * n)``, robust to float noise such as ``0.1 * 30``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    return max(1, min(n, math.ceil(round(p * n, 9))))


@dataclass(frozen=True)
class RdpcParams:
    """Mixing weight ``alpha``, rank fraction ``p`` and the weight scheme."""

    alpha: float = 0.2
    p: float = 0.1
    weights: WeightScheme = field(default_factory=WeightScheme)

    def __post_init__(self):
        object.__setattr__(self, "weights", WeightScheme.coerce(self.weights))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if self.alpha > 0 and self.p == 0:
            raise ValueError("p = 0 selects no ranks; RankDiff is undefined")

    def as_dict(self):
        return {"alpha": self.alpha, "p": self.p, "weights": str(self.weights)}


def _series(x, name="x") -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return a


def _pair(x, y):
    x, y = _series(x, "x"), _series(y, "y")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} != {y.size}")
    return x, y


def rank_diff(x, y, p: float = 0.1, weights: WeightLike = "uniform") -> float:
    """Weighted mean of the ``ceil(p*n)`` largest ``|x_i - y_i|``.

    The largest difference is paired with the first weight.
    """
    x, y = _pair(x, y)
    r = rank_count(p, x.size)
    w = make_weights(weights, r)
    diffs = np.abs(x - y)
    top = np.sort(diffs)[::-1][:r]
    return float(np.dot(w, top))


def _check_variance(a, name, index=None):
    if np.ptp(a) == 0.0:
        where = f" (series {index})" if index is not None else ""
        raise DegenerateInputError(f"{name}{where} is constant; correlation is undefined", index)


def pearson_correlation(x, y) -> float:
    """Pearson correlation with 1/n moments, clamped to [-1, 1]."""
    x, y = _pair(x, y)
    if x.size < 2:
        raise DegenerateInputError("correlation needs at least two observations")
    _check_variance(x, "x")
    _check_variance(y, "y")
    xc = x - x.mean()
    yc = y - y.mean()
    cov = np.mean(xc * yc)
    c = cov / (np.sqrt(np.mean(xc * xc)) * np.sqrt(np.mean(yc * yc)))
    return float(min(1.0, max(-1.0, c)))


def pearson_dissimilarity(x, y) -> float:
    """``1 - corr(x, y)``, in [0, 2]."""
    return 1.0 - pearson_correlation(x, y)


def rdpc(x, y, alpha: float = 0.2, p: float = 0.1, weights: WeightLike = "uniform") -> float:
    """``alpha * RankDiff(x, y | p, w) + (1 - alpha) * (1 - corr(x, y))``.

    Each term is only evaluated when its coefficient is non-zero, so
    ``alpha=1`` accepts constant series and ``alpha=0`` ignores ``p``.
    """
    params = RdpcParams(alpha, p, weights)
    x, y = _pair(x, y)
    total = 0.0
    if params.alpha > 0:
        total += params.alpha * rank_diff(x, y, params.p, params.weights)
    if params.alpha < 1:
        total += (1.0 - params.alpha) * pearson_dissimilarity(x, y)
    return total


def euclidean(x, y) -> float:
    x, y = _pair(x, y)
    return float(np.sqrt(np.sum((x - y) ** 2)))


@njit(cache=True, nogil=True)
def _dtw_kernel(x, y):
    # two-row rolling DP; prev[j] holds D(i-1, j)
    m = y.shape[0]
    prev = np.full(m + 1, np.inf)
    curr = np.full(m + 1, np.inf)
    prev[0] = 0.0
    for i in range(x.shape[0]):
        curr[0] = np.inf
        xi = x[i]
        for j in range(1, m + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if curr[j - 1] < best:
                best = curr[j - 1]
            curr[j] = abs(xi - y[j - 1]) + best
        for j in range(m + 1):
            prev[j] = curr[j]
    return prev[m]


@njit(cache=True, parallel=True)
def _dtw_matrix_kernel(X, out):
    n = X.shape[0]
    for i in prange(n):
        for j in range(i + 1, n):
            out[i, j] = _dtw_kernel(X[i], X[j])


def dtw(x, y) -> float:
    """Unconstrained DTW with absolute-difference local cost.

    Steps are match, insertion and deletion, each costing the local
    ``|x_i - y_j|``; both endpoints are anchored.
    """
    x, y = _series(x, "x"), _series(y, "y")
    return float(_dtw_kernel(x, y))


_SCALAR = {
    "pearson": lambda x, y, **kw: pearson_dissimilarity(x, y),
    "euclidean": lambda x, y, **kw: euclidean(x, y),
    "dtw": lambda x, y, **kw: dtw(x, y),
    "rdpc": lambda x, y, **kw: rdpc(x, y, **kw),
}


@dataclass
class DissimilarityMatrix:
    """Symmetric n x n matrix of non-negative dissimilarities."""

    values: np.ndarray
    measure: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"dissimilarity matrix must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("dissimilarity matrix contains NaN or infinite entries")
        if np.any(v < 0):
            raise ValueError("dissimilarity matrix has negative entries")
        if not np.array_equal(v, v.T):
            raise ValueError("dissimilarity matrix is not symmetric")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def tag(self) -> str:
        if not self.params:
            return self.measure
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.measure}({inner})"

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _as_dataset(data) -> np.ndarray:
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"dataset must be a 2-D array (series x time), got shape {X.shape}")
    if X.shape[0] < 2:
        raise ValueError("need at least two series for a pairwise matrix")
    if X.shape[1] == 0:
        raise ValueError("series are empty")
    bad = np.flatnonzero(~np.all(np.isfinite(X), axis=1))
    if bad.size:
        raise ValueError(f"series {int(bad[0])} contains NaN or infinite values")
    return X


def _row_blocks(n, n_jobs):
    # each block writes a disjoint set of rows of the upper triangle
    rows = np.arange(n - 1)
    return [b for b in np.array_split(rows, max(1, min(n_jobs, n - 1))) if b.size]


def _run_blocks(fill_rows, n, n_jobs):
    blocks = _row_blocks(n, n_jobs)
    if n_jobs <= 1 or len(blocks) == 1:
        for b in blocks:
            fill_rows(b)
        return
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        list(pool.map(fill_rows, blocks))


def _rankdiff_upper(X, r, w, out, n_jobs):
    n, T = X.shape

    def fill_rows(rows):
        for i in rows:
            D = np.abs(X[i + 1:] - X[i])
            if r < T:
                D = np.partition(D, T - r, axis=1)[:, T - r:]
            top = -np.sort(-D, axis=1)
            out[i, i + 1:] = top @ w

    _run_blocks(fill_rows, n, n_jobs)


def _euclid_upper(X, out, n_jobs):
    n = X.shape[0]

    def fill_rows(rows):
        for i in rows:
            out[i, i + 1:] = np.sqrt(np.sum((X[i + 1:] - X[i]) ** 2, axis=1))

    _run_blocks(fill_rows, n, n_jobs)


def _pearson_upper(X, out, n_jobs):
    n, T = X.shape
    if T < 2:
        raise DegenerateInputError("correlation needs at least two observations")
    flat = np.flatnonzero(np.ptp(X, axis=1) == 0.0)
    if flat.size:
        idx = int(flat[0])
        raise DegenerateInputError(f"series {idx} is constant; correlation is undefined", idx)
    Z = X - X.mean(axis=1, keepdims=True)
    Z /= np.sqrt(np.mean(Z * Z, axis=1, keepdims=True))

    def fill_rows(rows):
        for i in rows:
            c = (Z[i + 1:] @ Z[i]) / T
            out[i, i + 1:] = 1.0 - np.clip(c, -1.0, 1.0)

    _run_blocks(fill_rows, n, n_jobs)


def _mirror(upper):
    iu = np.triu_indices(upper.shape[0], 1)
    full = np.zeros_like(upper)
    full[iu] = upper[iu]
    full.T[iu] = upper[iu]
    return full


def pairwise_matrix(
    data,
    measure: str | Callable = "rdpc",
    *,
    n_jobs: int = 1,
    **params,
) -> DissimilarityMatrix:
    """Build the symmetric dissimilarity matrix of a dataset.

    Parameters
    ----------
    data : array-like, shape (n, T)
        One series per row.  ``dtw`` also accepts a list of series of
        differing lengths.
    measure : str or callable
        One of :data:`MEASURES`, or ``f(x, y) -> float``.  A callable is
        evaluated exactly once per unordered pair.
    n_jobs : int
        Worker threads.  Output does not depend on the schedule.
    **params
        ``alpha``, ``p`` and ``weights`` for ``rdpc``.

    Errors raised for one pair are re-raised naming the offending series.
    """
    if callable(measure):
        return _callable_matrix(data, measure, n_jobs, params)
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if measure != "rdpc" and params:
        raise TypeError(f"measure {measure!r} takes no parameters, got {sorted(params)}")

    if measure == "dtw" and not _is_rectangular(data):
        return _callable_matrix(data, dtw, n_jobs, {}, tag="dtw")

    X = _as_dataset(data)
    n = X.shape[0]
    upper = np.zeros((n, n))
    tag_params = {}
    if measure == "rdpc":
        prm = RdpcParams(**params)
        tag_params = prm.as_dict()
        if prm.alpha > 0:
            r = rank_count(prm.p, X.shape[1])
            _rankdiff_upper(X, r, make_weights(prm.weights, r), upper, n_jobs)
            upper *= prm.alpha
        if prm.alpha < 1:
            corr = np.zeros((n, n))
            _pearson_upper(X, corr, n_jobs)
            upper += (1.0 - prm.alpha) * corr
    elif measure == "pearson":
        _pearson_upper(X, upper, n_jobs)
    elif measure == "euclidean":
        _euclid_upper(X, upper, n_jobs)
    else:
        _dtw_matrix_kernel(np.ascontiguousarray(X), upper)
    return DissimilarityMatrix(_mirror(upper), measure, tag_params)


def _is_rectangular(data):
    if isinstance(data, np.ndarray):
        return data.ndim == 2
    lengths = {len(s) for s in data}
    return len(lengths) == 1


def _callable_matrix(data, func, n_jobs, params, tag=None):
    if isinstance(data, np.ndarray) and data.ndim == 2:
        series = list(_as_dataset(data))
    else:
        series = [_series(s, f"series {i}") for i, s in enumerate(data)]
        if len(series) < 2:
            raise ValueError("need at least two series for a pairwise matrix")
    n = len(series)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def evaluate(pair):
        i, j = pair
        try:
            return func(series[i], series[j], **params)
        except DegenerateInputError as exc:
            raise DegenerateInputError(f"pair ({i}, {j}): {exc}", (i, j)) from exc
        except (ValueError, ArithmeticError) as exc:
            raise ValueError(f"pair ({i}, {j}): {exc}") from exc

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(evaluate, pairs))
    else:
        results = [evaluate(pr) for pr in pairs]
    out = np.zeros((n, n))
    for (i, j), v in zip(pairs, results):
        out[i, j] = out[j, i] = v
    name = tag or getattr(func, "__name__", "custom")
    return DissimilarityMatrix(out, name, dict(params))
