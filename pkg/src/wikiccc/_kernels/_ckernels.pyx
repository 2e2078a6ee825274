# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Gini tree growing and ray-casting containment.

Arithmetic and random draws match ``_pykernels`` exactly; see that module
for semantics.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free, qsort
from libc.math cimport INFINITY

cnp.import_array()


cdef struct ValueLabel:
    double value
    long label


cdef int _cmp_value(const void* a, const void* b) noexcept nogil:
    cdef double va = (<ValueLabel*>a).value
    cdef double vb = (<ValueLabel*>b).value
    if va < vb:
        return -1
    if va > vb:
        return 1
    return 0


cdef inline uint64_t _splitmix_next(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef void _permutation(uint64_t* state, Py_ssize_t* perm, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, tmp
    for i in range(n):
        perm[i] = i
    i = n - 1
    while i > 0:
        j = <Py_ssize_t>(_splitmix_next(state) % <uint64_t>(i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
        i -= 1


cdef Py_ssize_t _best_split(const double[:, ::1] X, const long[::1] labels, const Py_ssize_t* idx,
                            Py_ssize_t n, const Py_ssize_t* feats, Py_ssize_t n_feats,
                            Py_ssize_t max_features, ValueLabel* buf,
                            double* out_threshold, double* out_score) noexcept nogil:
    cdef Py_ssize_t best_feature = -1
    cdef double best_threshold = 0.0
    cdef double best_score = INFINITY
    cdef Py_ssize_t visited = 0
    cdef Py_ssize_t k, i, f
    cdef long total_ones, ones_left, n_left, n_right, ones_right
    cdef double score, lo, hi, threshold

    if n >= 2:
        for k in range(n_feats):
            if visited >= max_features:
                break
            f = feats[k]
            total_ones = 0
            for i in range(n):
                buf[i].value = X[idx[i], f]
                buf[i].label = labels[idx[i]]
                total_ones = total_ones + buf[i].label
            qsort(buf, n, sizeof(ValueLabel), _cmp_value)
            if buf[0].value == buf[n - 1].value:
                continue
            visited = visited + 1
            ones_left = 0
            for i in range(n - 1):
                ones_left = ones_left + buf[i].label
                if buf[i].value == buf[i + 1].value:
                    continue
                n_left = i + 1
                n_right = n - n_left
                ones_right = total_ones - ones_left
                score = (<double>((n_left - ones_left) * ones_left)) / (<double>n_left) + (
                    <double>((n_right - ones_right) * ones_right)) / (<double>n_right)
                if score < best_score:
                    best_score = score
                    best_feature = f
                    lo = buf[i].value
                    hi = buf[i + 1].value
                    threshold = (lo + hi) / 2.0
                    if threshold == hi:
                        threshold = lo
                    best_threshold = threshold
    out_threshold[0] = best_threshold
    out_score[0] = best_score
    return best_feature


def best_split(const double[:, ::1] X, y, samples, features, Py_ssize_t max_features):
    cdef const long[::1] labels = np.ascontiguousarray(y, dtype=np.int_)
    cdef const Py_ssize_t[::1] idx = np.ascontiguousarray(samples, dtype=np.intp)
    cdef const Py_ssize_t[::1] feats = np.ascontiguousarray(features, dtype=np.intp)
    cdef Py_ssize_t n = idx.shape[0]
    cdef double threshold = 0.0, score = INFINITY
    cdef Py_ssize_t f = -1
    cdef ValueLabel* buf
    if n < 2:
        return -1, 0.0, INFINITY
    buf = <ValueLabel*>malloc(n * sizeof(ValueLabel))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            f = _best_split(X, labels, &idx[0], n, &feats[0], feats.shape[0], max_features,
                            buf, &threshold, &score)
    finally:
        free(buf)
    return f, threshold, score


def grow_tree(X, y, samples, seed, Py_ssize_t max_features, Py_ssize_t min_samples_split):
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const long[::1] labels = np.ascontiguousarray(y, dtype=np.int_)
    cdef Py_ssize_t[::1] work = np.array(samples, dtype=np.intp, copy=True)
    cdef Py_ssize_t n = work.shape[0]
    cdef Py_ssize_t n_features = Xv.shape[1]
    cdef uint64_t state = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t cap = 2 * n + 1
    feature_a = np.full(cap, -1, dtype=np.intp)
    threshold_a = np.zeros(cap, dtype=np.float64)
    left_a = np.full(cap, -1, dtype=np.intp)
    right_a = np.full(cap, -1, dtype=np.intp)
    counts_a = np.zeros((cap, 2), dtype=np.int64)
    cdef Py_ssize_t[::1] feature = feature_a
    cdef double[::1] threshold = threshold_a
    cdef Py_ssize_t[::1] left = left_a
    cdef Py_ssize_t[::1] right = right_a
    cdef cnp.int64_t[:, ::1] counts = counts_a

    cdef ValueLabel* buf = <ValueLabel*>malloc((n + 1) * sizeof(ValueLabel))
    cdef Py_ssize_t* tmp = <Py_ssize_t*>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* perm = <Py_ssize_t*>malloc((n_features + 1) * sizeof(Py_ssize_t))
    # stack entries: node, start, end
    cdef Py_ssize_t* stack = <Py_ssize_t*>malloc(3 * (cap + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t n_nodes = 0, top = 0
    cdef Py_ssize_t node, start, end, m, i, nl, nr, f, ln, rn
    cdef long ones
    cdef double thr, score
    if buf == NULL or tmp == NULL or perm == NULL or stack == NULL:
        free(buf); free(tmp); free(perm); free(stack)
        raise MemoryError()
    try:
        with nogil:
            ones = 0
            for i in range(n):
                ones = ones + labels[work[i]]
            counts[0, 0] = n - ones
            counts[0, 1] = ones
            n_nodes = 1
            stack[0] = 0
            stack[1] = 0
            stack[2] = n
            top = 1
            while top > 0:
                top -= 1
                node = stack[3 * top]
                start = stack[3 * top + 1]
                end = stack[3 * top + 2]
                m = end - start
                if counts[node, 0] == 0 or counts[node, 1] == 0 or m < min_samples_split:
                    continue
                _permutation(&state, perm, n_features)
                f = _best_split(Xv, labels, &work[start], m, perm, n_features, max_features,
                                buf, &thr, &score)
                if f < 0:
                    continue
                # stable partition of work[start:end] on X[:, f] <= thr
                nl = 0
                nr = 0
                for i in range(start, end):
                    if Xv[work[i], f] <= thr:
                        work[start + nl] = work[i]
                        nl += 1
                    else:
                        tmp[nr] = work[i]
                        nr += 1
                for i in range(nr):
                    work[start + nl + i] = tmp[i]
                feature[node] = f
                threshold[node] = thr
                ln = n_nodes
                rn = n_nodes + 1
                n_nodes += 2
                left[node] = ln
                right[node] = rn
                ones = 0
                for i in range(start, start + nl):
                    ones = ones + labels[work[i]]
                counts[ln, 0] = nl - ones
                counts[ln, 1] = ones
                counts[rn, 0] = nr - (counts[node, 1] - ones)
                counts[rn, 1] = counts[node, 1] - ones
                stack[3 * top] = rn
                stack[3 * top + 1] = start + nl
                stack[3 * top + 2] = end
                top += 1
                stack[3 * top] = ln
                stack[3 * top + 1] = start
                stack[3 * top + 2] = start + nl
                top += 1
    finally:
        free(buf); free(tmp); free(perm); free(stack)
    return (
        feature_a[:n_nodes].copy(),
        threshold_a[:n_nodes].copy(),
        left_a[:n_nodes].copy(),
        right_a[:n_nodes].copy(),
        counts_a[:n_nodes].copy(),
    )


def points_in_ring(lats, lons, ring):
    cdef const double[::1] la = np.ascontiguousarray(lats, dtype=np.float64)
    cdef const double[::1] lo = np.ascontiguousarray(lons, dtype=np.float64)
    cdef const double[:, ::1] r = np.ascontiguousarray(ring, dtype=np.float64)
    cdef Py_ssize_t n = la.shape[0]
    cdef Py_ssize_t m = r.shape[0]
    out = np.zeros(n, dtype=bool)
    cdef cnp.npy_bool[::1] res = out
    cdef Py_ssize_t p, i, j
    cdef double px, py, xi, yi, xj, yj, cross
    cdef bint inside, on_edge, straddles

    with nogil:
        for p in range(n):
            py = la[p]
            px = lo[p]
            inside = False
            on_edge = False
            j = m - 1
            for i in range(m):
                yi = r[i, 0]
                xi = r[i, 1]
                yj = r[j, 0]
                xj = r[j, 1]
                cross = (xj - xi) * (py - yi) - (px - xi) * (yj - yi)
                if (cross == 0.0 and px >= (xi if xi < xj else xj) and px <= (xj if xi < xj else xi)
                        and py >= (yi if yi < yj else yj) and py <= (yj if yi < yj else yi)):
                    on_edge = True
                    break
                straddles = (yi > py) != (yj > py)
                if straddles:
                    if yj > yi:
                        if cross > 0.0:
                            inside = not inside
                    elif cross < 0.0:
                        inside = not inside
                j = i
            res[p] = inside or on_edge
    return out
