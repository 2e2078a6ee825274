"""Pure numpy implementations of the hot kernels.

Every floating point expression here mirrors the Cython version operation
for operation, so both backends return bit-identical results.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit splitmix generator; shared with the compiled kernel bit for bit."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def permutation(self, n: int) -> list:
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.next() % (i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def best_split(X, y, samples, features, max_features):
    """Find the Gini-optimal binary split of ``samples``.

    Features are visited in the given order. Features that are constant over
    the node are skipped and do not count towards ``max_features``.

    Returns ``(feature, threshold, score)`` where ``score`` is the sum over
    both children of ``n0 * n1 / n`` (proportional to the weighted Gini
    impurity). ``feature`` is -1 when no split exists.
    """
    samples = np.asarray(samples, dtype=np.intp)
    n = samples.shape[0]
    best_feature = -1
    best_threshold = 0.0
    best_score = np.inf
    if n < 2:
        return best_feature, best_threshold, best_score

    labels = np.asarray(y, dtype=np.int64)[samples]
    visited = 0
    for f in features:
        if visited >= max_features:
            break
        vals = X[samples, f]
        order = np.argsort(vals, kind="stable")
        xs = vals[order]
        if xs[0] == xs[n - 1]:
            continue
        visited += 1
        ys = labels[order]
        ones_left = np.cumsum(ys)[:-1]
        n_left = np.arange(1, n, dtype=np.int64)
        n_right = n - n_left
        ones_right = ones_left[-1] + ys[-1] - ones_left
        zeros_left = n_left - ones_left
        zeros_right = n_right - ones_right
        score = (zeros_left * ones_left).astype(np.float64) / n_left.astype(np.float64) + (
            zeros_right * ones_right
        ).astype(np.float64) / n_right.astype(np.float64)
        valid = xs[:-1] != xs[1:]
        score = np.where(valid, score, np.inf)
        pos = int(np.argmin(score))
        if score[pos] < best_score:
            best_score = float(score[pos])
            best_feature = int(f)
            lo = xs[pos]
            hi = xs[pos + 1]
            threshold = (lo + hi) / 2.0
            if threshold == hi:
                threshold = lo
            best_threshold = float(threshold)
    return best_feature, best_threshold, best_score


def grow_tree(X, y, samples, seed, max_features, min_samples_split):
    """Grow one unpruned CART tree on ``samples`` (a bootstrap index array).

    Nodes are split until pure, smaller than ``min_samples_split`` or
    unsplittable. Each split attempt draws a fresh feature permutation from
    a splitmix64 stream seeded with ``seed``. Node ids are assigned when a
    parent splits; the left subtree is grown first.

    Returns ``(feature, threshold, left, right, counts)`` arrays; leaves have
    feature -1 and ``counts`` holds per-node class counts.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n_features = X.shape[1]
    rng = SplitMix64(seed)
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        ones = int(y[idx].sum())
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append((idx.shape[0] - ones, ones))
        return len(feature) - 1

    root = new_node(np.asarray(samples, dtype=np.intp))
    stack = [(root, np.asarray(samples, dtype=np.intp))]
    while stack:
        node, idx = stack.pop()
        c0, c1 = counts[node]
        if c0 == 0 or c1 == 0 or idx.shape[0] < min_samples_split:
            continue
        order = rng.permutation(n_features)
        f, thr, _ = best_split(X, y, idx, order, max_features)
        if f < 0:
            continue
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri))
        stack.append((left[node], li))
    return (
        np.asarray(feature, dtype=np.intp),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(counts, dtype=np.int64).reshape(-1, 2),
    )


def points_in_ring(lats, lons, ring):
    """Containment of each point in a closed ring of (lat, lon) vertices.

    Even-odd crossing rule on a ray towards +longitude; points lying exactly
    on an edge count as inside.
    """
    lats = np.asarray(lats, dtype=np.float64)
    lons = np.asarray(lons, dtype=np.float64)
    ring = np.asarray(ring, dtype=np.float64)
    m = ring.shape[0]
    inside = np.zeros(lats.shape[0], dtype=bool)
    on_edge = np.zeros(lats.shape[0], dtype=bool)
    j = m - 1
    for i in range(m):
        yi, xi = ring[i, 0], ring[i, 1]
        yj, xj = ring[j, 0], ring[j, 1]
        cross = (xj - xi) * (lats - yi) - (lons - xi) * (yj - yi)
        within = (
            (lons >= min(xi, xj))
            & (lons <= max(xi, xj))
            & (lats >= min(yi, yj))
            & (lats <= max(yi, yj))
        )
        on_edge |= (cross == 0.0) & within
        straddles = (yi > lats) != (yj > lats)
        if yj > yi:
            hit = straddles & (cross > 0.0)
        else:
            hit = straddles & (cross < 0.0)
        inside ^= hit
        j = i
    return inside | on_edge
