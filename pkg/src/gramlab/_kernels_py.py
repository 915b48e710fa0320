"""Pure-Python reference implementations of the compiled kernels.

Inputs are already rank-compressed ``int64`` arrays (see
:mod:`gramlab.kernels`).  Output must match ``_kernels.pyx`` exactly.
"""

import numpy as np


def suffix_array(s):
    n = len(s)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.asarray(s, dtype=np.int64).copy()
    k = 1
    sa = np.argsort(rank, kind="stable").astype(np.int64)
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank)).astype(np.int64)
        r0 = rank[sa]
        r1 = second[sa]
        step = np.empty(n, dtype=np.int64)
        step[0] = 0
        step[1:] = (r0[1:] != r0[:-1]) | (r1[1:] != r1[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(step)
        rank = new_rank
        if rank.max() == n - 1 or k >= n:
            return sa
        k *= 2


def lcp_array(s, sa):
    n = len(sa)
    lcp = [0] * n
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    s = s.tolist() if hasattr(s, "tolist") else list(s)
    sa_l = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa_l):
        rank[p] = i
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa_l[r - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[r] = h
            if h > 0:
                h -= 1
        else:
            h = 0
    return np.asarray(lcp, dtype=np.int64)


def max_lcp(lcp):
    return int(lcp.max()) if len(lcp) else 0


def lcp_intervals(s, sa, lcp, min_len, left_maximal):
    n = len(sa)
    s_l = s.tolist()
    sa_l = sa.tolist()
    lcp_l = lcp.tolist()
    lens, lbs, rbs = [], [], []
    stack = [(0, 0)]
    for i in range(1, n + 1):
        cur = lcp_l[i] if i < n else 0
        lb = i - 1
        while cur < stack[-1][0]:
            h, lb = stack.pop()
            if h >= min_len and (not left_maximal or _is_left_maximal(s_l, sa_l, lb, i - 1)):
                lens.append(h)
                lbs.append(lb)
                rbs.append(i - 1)
        if cur > stack[-1][0]:
            stack.append((cur, lb))
    return (
        np.asarray(lens, dtype=np.int64),
        np.asarray(lbs, dtype=np.int64),
        np.asarray(rbs, dtype=np.int64),
    )


def _is_left_maximal(s, sa, lb, rb):
    p = sa[lb]
    first = s[p - 1] if p > 0 else -1
    if first < 0:
        return True
    for x in range(lb + 1, rb + 1):
        p = sa[x]
        if p == 0 or s[p - 1] != first:
            return True
    return False


def select_occurrences(positions, length, covered):
    chosen = []
    last_end = -1
    for p in positions.tolist():
        if p < last_end:
            continue
        if covered[p:p + length].any():
            continue
        chosen.append(p)
        last_end = p + length
    return np.asarray(chosen, dtype=np.int64)


def cover(covered, chosen, length):
    for p in chosen.tolist():
        covered[p:p + length] = 1
