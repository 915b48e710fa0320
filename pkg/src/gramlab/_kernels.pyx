# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: suffix array, LCP, repeat intervals, occurrence selection.

Same signatures and results as ``_kernels_py``.
"""

import numpy as np
from libc.stdint cimport int64_t, uint8_t


def suffix_array(const int64_t[::1] s):
    """Prefix doubling with two counting-sort passes per round."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t i, j, k, p, q, m, sigma
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    sigma = 0
    for i in range(n):
        if s[i] + 1 > sigma:
            sigma = s[i] + 1
    m = n if n > sigma else sigma
    sa_arr = np.empty(n, dtype=np.int64)
    rank_arr = np.empty(n, dtype=np.int64)
    tmp_arr = np.empty(n, dtype=np.int64)
    cnt_arr = np.zeros(m + 1, dtype=np.int64)
    cdef int64_t[::1] sa = sa_arr
    cdef int64_t[::1] rank = rank_arr
    cdef int64_t[::1] tmp = tmp_arr
    cdef int64_t[::1] cnt = cnt_arr
    cdef int64_t r, a, b, prev_a, prev_b

    for i in range(n):
        rank[i] = s[i]
        cnt[s[i] + 1] += 1
    for i in range(1, sigma + 1):
        cnt[i] += cnt[i - 1]
    for i in range(n):
        sa[cnt[s[i]]] = i
        cnt[s[i]] += 1
    # ranks of single symbols are the symbols themselves; re-rank densely
    r = 0
    tmp[sa[0]] = 0
    for i in range(1, n):
        if s[sa[i]] != s[sa[i - 1]]:
            r += 1
        tmp[sa[i]] = r
    for i in range(n):
        rank[i] = tmp[i]
    if r == n - 1:
        return sa_arr

    k = 1
    while True:
        # order by second key: suffixes with no partner first
        p = 0
        for i in range(n - k, n):
            tmp[p] = i
            p += 1
        for i in range(n):
            if sa[i] >= k:
                tmp[p] = sa[i] - k
                p += 1
        # stable counting sort on first key
        for i in range(r + 2):
            cnt[i] = 0
        for i in range(n):
            cnt[rank[i] + 1] += 1
        for i in range(1, r + 2):
            cnt[i] += cnt[i - 1]
        for i in range(n):
            j = tmp[i]
            sa[cnt[rank[j]]] = j
            cnt[rank[j]] += 1
        # new ranks
        tmp[sa[0]] = 0
        r = 0
        prev_a = rank[sa[0]]
        prev_b = rank[sa[0] + k] if sa[0] + k < n else -1
        for i in range(1, n):
            q = sa[i]
            a = rank[q]
            b = rank[q + k] if q + k < n else -1
            if a != prev_a or b != prev_b:
                r += 1
            tmp[q] = r
            prev_a = a
            prev_b = b
        for i in range(n):
            rank[i] = tmp[i]
        if r == n - 1 or k >= n:
            return sa_arr
        k *= 2


def lcp_array(const int64_t[::1] s, const int64_t[::1] sa):
    """Kasai et al.; ``lcp[i]`` is the LCP of suffixes ``sa[i-1]`` and ``sa[i]``."""
    cdef Py_ssize_t n = sa.shape[0]
    cdef Py_ssize_t i, j, h = 0
    lcp_arr = np.zeros(n, dtype=np.int64)
    rank_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] lcp = lcp_arr
    cdef int64_t[::1] rank = rank_arr
    for i in range(n):
        rank[sa[i]] = i
    for i in range(n):
        if rank[i] > 0:
            j = sa[rank[i] - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[rank[i]] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return lcp_arr


def max_lcp(const int64_t[::1] lcp):
    cdef Py_ssize_t i
    cdef int64_t best = 0
    for i in range(lcp.shape[0]):
        if lcp[i] > best:
            best = lcp[i]
    return int(best)


cdef bint _left_maximal(const int64_t[::1] s, const int64_t[::1] sa, Py_ssize_t lb, Py_ssize_t rb):
    cdef Py_ssize_t x
    cdef int64_t p = sa[lb]
    cdef int64_t first
    if p == 0:
        return True
    first = s[p - 1]
    for x in range(lb + 1, rb + 1):
        p = sa[x]
        if p == 0 or s[p - 1] != first:
            return True
    return False


def lcp_intervals(const int64_t[::1] s, const int64_t[::1] sa, const int64_t[::1] lcp,
                  int64_t min_len, bint left_maximal):
    """Bottom-up enumeration of LCP intervals with ``lcp >= min_len``."""
    cdef Py_ssize_t n = sa.shape[0]
    cdef Py_ssize_t i, top = 0, out = 0, cap
    cdef int64_t cur, lb, h
    st_h_arr = np.zeros(n + 1, dtype=np.int64)
    st_lb_arr = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] st_h = st_h_arr
    cdef int64_t[::1] st_lb = st_lb_arr
    cap = n if n > 0 else 1
    lens_arr = np.empty(cap, dtype=np.int64)
    lbs_arr = np.empty(cap, dtype=np.int64)
    rbs_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] lens = lens_arr
    cdef int64_t[::1] lbs = lbs_arr
    cdef int64_t[::1] rbs = rbs_arr
    st_h[0] = 0
    st_lb[0] = 0
    for i in range(1, n + 1):
        cur = lcp[i] if i < n else 0
        lb = i - 1
        while cur < st_h[top]:
            h = st_h[top]
            lb = st_lb[top]
            top -= 1
            if h >= min_len and (not left_maximal or _left_maximal(s, sa, lb, i - 1)):
                lens[out] = h
                lbs[out] = lb
                rbs[out] = i - 1
                out += 1
        if cur > st_h[top]:
            top += 1
            st_h[top] = cur
            st_lb[top] = lb
    return lens_arr[:out].copy(), lbs_arr[:out].copy(), rbs_arr[:out].copy()


def select_occurrences(const int64_t[::1] positions, int64_t length, const uint8_t[::1] covered):
    """Left-to-right non-overlapping occurrences avoiding covered cells."""
    cdef Py_ssize_t m = positions.shape[0]
    cdef Py_ssize_t i, x, out = 0
    cdef int64_t p, last_end = -1
    cdef bint free
    chosen_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] chosen = chosen_arr
    for i in range(m):
        p = positions[i]
        if p < last_end:
            continue
        free = True
        for x in range(p, p + length):
            if covered[x]:
                free = False
                break
        if free:
            chosen[out] = p
            out += 1
            last_end = p + length
    return chosen_arr[:out].copy()


def cover(uint8_t[::1] covered, const int64_t[::1] chosen, int64_t length):
    cdef Py_ssize_t i
    cdef int64_t x
    for i in range(chosen.shape[0]):
        for x in range(chosen[i], chosen[i] + length):
            covered[x] = 1
