import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rdpc import ElbowCurve, detect_elbows, elbow_curve


def curve(scores, start=1):
    return ElbowCurve(np.arange(start, start + len(scores)), scores)


def test_single_elbow():
    assert detect_elbows(curve([100, 50, 20, 18, 17, 16])) == [3]


def test_linear_curve_has_none():
    assert detect_elbows(curve([10, 8, 6, 4, 2, 0])) == []
    assert detect_elbows(curve([5, 5, 5, 5])) == []


def test_two_knees_reported_ascending():
    assert detect_elbows(curve([100, 60, 50, 40, 30, 28, 26])) == [2, 5]


def test_max_points_keeps_the_strongest():
    w = [100, 60, 50, 40, 30, 28, 26]
    assert detect_elbows(curve(w), max_points=1) == [2]
    assert detect_elbows(curve(w), max_points=0) == []


def test_short_or_uneven_curves_rejected():
    with pytest.raises(ValueError, match="three"):
        detect_elbows(curve([3, 1]))
    with pytest.raises(ValueError, match="evenly"):
        detect_elbows(ElbowCurve([1, 2, 4], [3, 2, 1]))
    with pytest.raises(ValueError):
        ElbowCurve([1, 2], [1.0])


# integer scores with power-of-two scales keep the rescaled curve bit-identical
decreasing = arrays(np.int64, st.integers(3, 15), elements=st.integers(0, 10_000)).map(
    lambda a: np.sort(a)[::-1].astype(np.float64)
)


@given(decreasing, st.sampled_from([2.0**e for e in range(-6, 11)]), st.integers(-1000, 1000))
def test_affine_invariance(w, scale, shift):
    ks = np.arange(1, w.size + 1)
    base = detect_elbows(ElbowCurve(ks, w))
    assert detect_elbows(ElbowCurve(ks, w * scale + shift)) == base


@given(decreasing)
def test_output_ascending_positive_second_difference(w):
    out = detect_elbows(curve(w))
    assert out == sorted(set(out))
    assert len(out) <= 3
    for k in out:
        i = k - 1
        assert w[i - 1] - 2 * w[i] + w[i + 1] > 0


def two_blobs():
    rng = np.random.default_rng(0)
    t = np.arange(24)
    a = np.sin(t / 2) + rng.normal(0, 0.05, (8, 24))
    b = 10 + np.cos(t / 3) + rng.normal(0, 0.05, (8, 24))
    return np.vstack([a, b])


@pytest.mark.parametrize("method", ["hierarchical", "kmeans"])
def test_two_blob_curve(method):
    c = elbow_curve(two_blobs(), method, "euclidean", (1, 8))
    assert c.ks.tolist() == list(range(1, 9))
    assert c.scores[0] > 10 * c.scores[1]
    assert np.all(np.diff(c.scores) <= 1e-9)
    assert detect_elbows(c)[0] == 2


def test_identical_points_give_flat_zero_curve():
    c = elbow_curve(np.ones((6, 5)), "hierarchical", "euclidean", (1, 6))
    np.testing.assert_array_equal(c.scores, 0)
    assert detect_elbows(c) == []


def test_hierarchical_curve_uses_given_matrix():
    from rdpc import pairwise_matrix

    X = two_blobs()
    D = pairwise_matrix(X, "rdpc")
    assert np.array_equal(elbow_curve(X, matrix=D, k_range=(1, 5)).scores, elbow_curve(X, k_range=(1, 5)).scores)


def test_k_range_validation():
    with pytest.raises(ValueError, match="range"):
        elbow_curve(two_blobs(), k_range=(1, 40))
    with pytest.raises(ValueError, match="method"):
        elbow_curve(two_blobs(), "spectral", k_range=(1, 4))


def test_csv_format():
    text = curve([3.0, 1.5, 1.0]).to_csv()
    assert text.splitlines() == ["k,score", "1,3.0", "2,1.5", "3,1.0"]
