"""Slow, obviously-correct reference implementations used by the tests."""

import itertools

import numpy as np


def naive_agglomerate(D, linkage):
    """O(n^3) agglomeration straight from the linkage definitions.

    Cluster distances are recomputed from the leaf matrix every step, with
    ties broken on the smallest ``(min id, max id)`` pair.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    members = {i: [i] for i in range(n)}
    reduce = {"complete": np.max, "single": np.min, "average": np.mean}[linkage]
    merges = []
    for step in range(n - 1):
        best = None
        for a, b in itertools.combinations(sorted(members), 2):
            h = reduce(D[np.ix_(members[a], members[b])])
            key = (h, a, b)
            if best is None or key < best:
                best = key
        h, a, b = best
        merges.append((a, b, h))
        members[n + step] = members.pop(a) + members.pop(b)
    return merges


def _paths(n, m):
    # every monotone, continuous warping path from (0, 0) to (n-1, m-1)
    def walk(i, j):
        if (i, j) == (n - 1, m - 1):
            yield [(i, j)]
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for rest in walk(a, b):
                    yield [(i, j)] + rest

    return walk(0, 0)


def brute_dtw(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return min(sum(abs(x[i] - y[j]) for i, j in path) for path in _paths(len(x), len(y)))


def exhaustive_accuracy(true, pred):
    """Best one-to-one matching found by trying every injection."""
    true, pred = list(true), list(pred)
    tc, pc = sorted(set(true)), sorted(set(pred))
    best = 0
    if len(pc) <= len(tc):
        for image in itertools.permutations(tc, len(pc)):
            m = dict(zip(pc, image))
            best = max(best, sum(m[p] == t for t, p in zip(true, pred)))
    else:
        for image in itertools.permutations(pc, len(tc)):
            m = dict(zip(image, tc))
            best = max(best, sum(m.get(p) == t for t, p in zip(true, pred)))
    return best / len(true)


def sorted_top_mean(x, y, r, w):
    d = sorted((abs(a - b) for a, b in zip(x, y)), reverse=True)
    return sum(wi * di for wi, di in zip(w, d[:r]))
