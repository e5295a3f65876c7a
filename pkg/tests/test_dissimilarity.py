import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_dtw, sorted_top_mean
from rdpc import (
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

X1 = (1.0, -1.3, -0.7)
Y1 = (-0.9, -0.3, -1.0)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def pair_strategy(min_len=2, max_len=40):
    return st.integers(min_len, max_len).flatmap(
        lambda n: st.tuples(arrays(np.float64, n, elements=finite), arrays(np.float64, n, elements=finite))
    )


def nonconstant(a):
    return np.ptp(a) > 1e-6 * max(1.0, np.abs(a).max())


# --- weights ---------------------------------------------------------------


@pytest.mark.parametrize(
    "kind, r, expected",
    [
        ("uniform", 4, [0.25, 0.25, 0.25, 0.25]),
        ("increasing", 3, [1 / 6, 2 / 6, 3 / 6]),
        ("decreasing", 3, [3 / 6, 2 / 6, 1 / 6]),
        ("decreasing", 1, [1.0]),
    ],
)
def test_weight_schemes(kind, r, expected):
    np.testing.assert_allclose(make_weights(kind, r), expected, rtol=0, atol=1e-15)


@given(st.sampled_from(["uniform", "increasing", "decreasing"]), st.integers(1, 500))
def test_weights_are_a_distribution(kind, r):
    w = make_weights(kind, r)
    assert w.shape == (r,)
    assert np.all(w > 0)
    assert abs(w.sum() - 1) < 1e-12


def test_explicit_weights_validated():
    np.testing.assert_array_equal(make_weights((0.7, 0.3), 2), [0.7, 0.3])
    with pytest.raises(ValueError, match="length"):
        make_weights((0.5, 0.5), 3)
    with pytest.raises(ValueError, match="sum"):
        make_weights((0.5, 0.6), 2)
    with pytest.raises(ValueError, match="positive"):
        make_weights((1.5, -0.5), 2)
    with pytest.raises(ValueError, match="unknown"):
        WeightScheme("triangular")


@pytest.mark.parametrize("p, n, r", [(0.1, 30, 3), (0.1, 36, 4), (1 / 3, 3, 1), (2 / 3, 3, 2), (0.7, 3, 3), (1.0, 7, 7), (1e-9, 5, 1)])
def test_rank_count(p, n, r):
    assert rank_count(p, n) == r


def test_params_validation():
    with pytest.raises(ValueError):
        RdpcParams(alpha=1.2)
    with pytest.raises(ValueError):
        RdpcParams(alpha=0.5, p=0.0)
    assert RdpcParams(alpha=0.0, p=0.0).p == 0.0
    with pytest.raises(ValueError):
        RdpcParams(p=1.5)


# --- RankDiff --------------------------------------------------------------


def test_rank_diff_examples():
    assert rank_diff(X1, Y1, p=1 / 3) == pytest.approx(1.9, abs=1e-12)
    assert rank_diff((0, 0, 0, 0), (1, 2, 3, 4), p=0.5) == pytest.approx(3.5, abs=1e-12)
    # largest difference carries the first (largest) decreasing weight
    assert rank_diff((0, 0, 0), (3, 2, 1), p=1.0, weights="decreasing") == pytest.approx(14 / 6)
    assert rank_diff((0, 0, 0), (3, 2, 1), p=1.0, weights="increasing") == pytest.approx(10 / 6)


@given(pair_strategy(1, 60), st.floats(0.01, 1.0), st.sampled_from(["uniform", "increasing", "decreasing"]))
def test_rank_diff_matches_sorted_oracle(xy, p, kind):
    x, y = xy
    r = rank_count(p, x.size)
    expected = sorted_top_mean(x, y, r, make_weights(kind, r))
    assert rank_diff(x, y, p, kind) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_rank_diff_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        rank_diff([1, 2, 3], [1, 2])
    with pytest.raises(ValueError, match="NaN"):
        rank_diff([1, np.nan], [1, 2])


# --- Pearson ---------------------------------------------------------------


def test_pearson_examples():
    assert pearson_correlation((1, 2), (2, 4)) == pytest.approx(1.0)
    assert pearson_dissimilarity((1, 2), (2, 4)) == pytest.approx(0.0, abs=1e-15)
    assert pearson_dissimilarity((1, 2, 3), (3, 2, 1)) == pytest.approx(2.0)
    with pytest.raises(DegenerateInputError):
        pearson_dissimilarity((1, 1, 1), (1, 2, 3))
    with pytest.raises(DegenerateInputError):
        pearson_dissimilarity((1,), (2,))


def test_pearson_against_numpy():
    rng = np.random.default_rng(4)
    x, y = rng.normal(size=(2, 50))
    assert pearson_correlation(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


def test_pearson_dissimilarity_hand_value():
    # d_P(x1, y1) by hand with 1/n moments
    x, y = np.array(X1), np.array(Y1)
    xc, yc = x - x.mean(), y - y.mean()
    expected = 1 - (xc @ yc) / math.sqrt((xc @ xc) * (yc @ yc))
    assert pearson_dissimilarity(X1, Y1) == pytest.approx(expected, abs=1e-12)
    assert pearson_dissimilarity(X1, Y1) == pytest.approx(1.601464, abs=5e-7)


# --- RDPC ------------------------------------------------------------------


def test_rdpc_hand_example():
    expected = 0.2 * 1.9 + 0.8 * pearson_dissimilarity(X1, Y1)
    assert rdpc(X1, Y1, alpha=0.2, p=1 / 3) == pytest.approx(expected, abs=1e-12)


def test_rdpc_endpoints_are_exact():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(2, 20))
    assert rdpc(x, y, alpha=0.0, p=0.3) == pearson_dissimilarity(x, y)
    assert rdpc(x, y, alpha=1.0, p=0.3) == rank_diff(x, y, 0.3)
    # alpha=1 never touches the correlation term
    assert rdpc((1, 1, 1), (1, 2, 3), alpha=1.0, p=1.0) == pytest.approx(1.0)


@given(pair_strategy(2, 30), st.floats(0, 1), st.floats(0.01, 1))
def test_rdpc_is_linear_in_alpha(xy, alpha, p):
    x, y = xy
    if not (nonconstant(x) and nonconstant(y)):
        return
    expected = alpha * rank_diff(x, y, p) + (1 - alpha) * pearson_dissimilarity(x, y)
    assert rdpc(x, y, alpha, p) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@settings(max_examples=200)
@given(pair_strategy(2, 40), st.floats(0, 1), st.floats(0.01, 1), st.sampled_from(["uniform", "increasing", "decreasing"]))
def test_rdpc_nonnegative_and_symmetric(xy, alpha, p, kind):
    x, y = xy
    if not (nonconstant(x) and nonconstant(y)):
        return
    d = rdpc(x, y, alpha, p, kind)
    assert d >= 0
    assert d == pytest.approx(rdpc(y, x, alpha, p, kind), rel=1e-12, abs=1e-12)


@given(arrays(np.float64, st.integers(2, 30), elements=finite), st.floats(0, 1), st.floats(0.01, 1))
def test_rdpc_self_distance_zero(x, alpha, p):
    if not nonconstant(x):
        return
    assert rdpc(x, x, alpha, p) == pytest.approx(0.0, abs=1e-12)


def test_scale_invariance_breaks_identity_only_at_alpha_zero():
    x, y = (1, 2), (2, 4)
    assert rdpc(x, y, alpha=0.0) == pytest.approx(0.0, abs=1e-15)
    assert rdpc(x, y, alpha=0.01, p=1.0) > 0


# --- baselines -------------------------------------------------------------


def test_euclidean():
    assert euclidean((0, 0), (3, 4)) == 5.0


def test_dtw_examples():
    assert dtw((1, 2, 3), (1, 2, 2, 3)) == 0.0
    assert dtw((0, 0), (1, 1)) == 2.0
    assert dtw((1, 2), (2, 1)) == pytest.approx(2.0)


@settings(max_examples=150)
@given(
    arrays(np.float64, st.integers(1, 6), elements=st.floats(-10, 10)),
    arrays(np.float64, st.integers(1, 6), elements=st.floats(-10, 10)),
)
def test_dtw_matches_path_enumeration(x, y):
    assert dtw(x, y) == pytest.approx(brute_dtw(x, y), rel=1e-12, abs=1e-12)


# --- matrices --------------------------------------------------------------


@pytest.mark.parametrize("measure, scalar", [("rdpc", rdpc), ("pearson", pearson_dissimilarity), ("euclidean", euclidean), ("dtw", dtw)])
def test_matrix_matches_scalar_calls(measure, scalar):
    rng = np.random.default_rng(11)
    X = rng.normal(size=(9, 17))
    kw = {"alpha": 0.3, "p": 0.25, "weights": "decreasing"} if measure == "rdpc" else {}
    D = pairwise_matrix(X, measure, **kw)
    assert isinstance(D, DissimilarityMatrix)
    np.testing.assert_array_equal(D.values, D.values.T)
    assert np.all(np.diag(D.values) == 0)
    for i in range(9):
        for j in range(i + 1, 9):
            assert D.values[i, j] == pytest.approx(scalar(X[i], X[j], **kw), rel=1e-10, abs=1e-12)


def test_matrix_independent_of_thread_count():
    X = np.random.default_rng(2).normal(size=(30, 24))
    for measure in ("rdpc", "pearson", "euclidean"):
        a = pairwise_matrix(X, measure).values
        b = pairwise_matrix(X, measure, n_jobs=4).values
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("n_jobs", [1, 3])
def test_callable_evaluated_once_per_pair(n_jobs):
    calls = []
    lock = threading.Lock()

    def counting(x, y):
        with lock:
            calls.append(1)
        return float(np.abs(x - y).sum())

    X = np.random.default_rng(0).normal(size=(12, 5))
    D = pairwise_matrix(X, counting, n_jobs=n_jobs)
    assert len(calls) == 12 * 11 // 2
    assert D.values[3, 7] == pytest.approx(np.abs(X[3] - X[7]).sum())


def test_rdpc_params_are_tagged():
    X = np.random.default_rng(0).normal(size=(4, 10))
    D = pairwise_matrix(X, "rdpc", alpha=0.5, p=0.2)
    assert D.params == {"alpha": 0.5, "p": 0.2, "weights": "uniform"}
    assert "alpha=0.5" in D.tag


def test_constant_series_is_named():
    X = np.random.default_rng(0).normal(size=(5, 6))
    X[3] = 2.0
    with pytest.raises(DegenerateInputError) as err:
        pairwise_matrix(X, "rdpc")
    assert err.value.index == 3
    # RankDiff alone is fine with a flat series
    assert pairwise_matrix(X, "rdpc", alpha=1.0).n == 5


def test_callable_errors_name_the_pair():
    def boom(x, y):
        if 99 in (x[0], y[0]):
            raise ValueError("bad series")
        return 0.0

    X = np.zeros((3, 2))
    X[2, 0] = 99
    with pytest.raises(ValueError, match=r"pair \(\d, \d\)"):
        pairwise_matrix(X, boom)


def test_ragged_dtw():
    D = pairwise_matrix([[1, 2, 3], [1, 2, 2, 3], [0.0]], "dtw")
    assert D.values[0, 1] == 0.0
    assert D.values[0, 2] == pytest.approx(6.0)


@pytest.mark.parametrize(
    "bad, match",
    [
        (np.zeros((1, 4)), "two series"),
        (np.array([[0, np.inf], [1, 2]]), "series 0"),
        (np.zeros(4), "2-D"),
    ],
)
def test_matrix_input_validation(bad, match):
    with pytest.raises(ValueError, match=match):
        pairwise_matrix(bad, "euclidean")


def test_matrix_rejects_unknown_measure_and_params():
    with pytest.raises(ValueError, match="unknown measure"):
        pairwise_matrix(np.zeros((2, 2)), "cosine")
    with pytest.raises(TypeError):
        pairwise_matrix(np.eye(3), "euclidean", alpha=0.5)


def test_dissimilarity_matrix_validation():
    with pytest.raises(ValueError, match="symmetric"):
        DissimilarityMatrix(np.array([[0, 1], [2, 0.0]]))
    with pytest.raises(ValueError, match="negative"):
        DissimilarityMatrix(np.array([[0, -1], [-1, 0.0]]))
    with pytest.raises(ValueError, match="square"):
        DissimilarityMatrix(np.zeros((2, 3)))


@settings(max_examples=300)
@given(
    st.integers(2, 30).flatmap(lambda n: st.tuples(*[arrays(np.float64, n, elements=finite)] * 3)),
    st.floats(0.01, 1),
    st.sampled_from(["uniform", "decreasing"]),
)
def test_rank_diff_triangle_for_non_increasing_weights(xyz, p, kind):
    x, y, z = xyz
    lhs = rank_diff(x, y, p, kind)
    rhs = rank_diff(x, z, p, kind) + rank_diff(z, y, p, kind)
    assert lhs <= rhs * (1 + 1e-12) + 1e-9


def test_rank_diff_triangle_fails_for_increasing_weights():
    # the smallest weight lands on the largest gap, so RankDiff stops being a norm
    x, y, z = (0, 0), (3, 3), (0, 3)
    assert rank_diff(x, y, 1.0, "increasing") == pytest.approx(3.0)
    assert rank_diff(x, z, 1.0, "increasing") + rank_diff(z, y, 1.0, "increasing") == pytest.approx(2.0)


def test_printed_counterexamples():
    # distance values quoted alongside the first two triples
    x, y, z = X1, Y1, (-0.2, -0.3, -0.3)
    assert (rank_diff(x, z, 1 / 3), rank_diff(z, y, 1 / 3)) == pytest.approx((1.2, 0.7))
    assert pearson_dissimilarity(x, z) == pytest.approx(0.03213216, abs=5e-9)
    assert pearson_dissimilarity(z, y) == pytest.approx(1.381246, abs=5e-7)
    x, y, z = (-2.8, 0.5, 1.4), (1.0, 0.3, -1.2), (-0.9, 0.8, -0.5)
    got = [rank_diff(x, y, 0.5), rank_diff(x, z, 0.5), rank_diff(z, y, 0.5)]
    assert got == pytest.approx([3.2, 1.9, 1.3])
    got = [pearson_dissimilarity(x, y), pearson_dissimilarity(x, z), pearson_dissimilarity(z, y)]
    assert got == pytest.approx([1.865018, 0.481042, 1.02002], abs=5e-6)
