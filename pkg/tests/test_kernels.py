import itertools
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from gramlab import kernels
from gramlab.kernels import as_ranks, backends, lcp_array, longest_repeat, repeat_intervals, suffix_array

IMPLS = sorted(backends())


def brute_sa(s):
    s = list(s)
    return sorted(range(len(s)), key=lambda i: s[i:])


def brute_lcp(s, sa):
    s = list(s)
    out = [0]
    for a, b in zip(sa, sa[1:]):
        k = 0
        while a + k < len(s) and b + k < len(s) and s[a + k] == s[b + k]:
            k += 1
        out.append(k)
    return out


def brute_longest_repeat(s):
    s = list(s)
    n = len(s)
    best = 0
    for i in range(n):
        for j in range(i + 1, n):
            k = 0
            while j + k < n and s[i + k] == s[j + k]:
                k += 1
            best = max(best, k)
    return best


def brute_repeats(s, min_len, left_maximal):
    """(substring, positions) of every right-maximal (and optionally left-maximal) repeat."""
    s = list(s)
    n = len(s)
    occ = {}
    for i in range(n):
        for j in range(i + min_len, n + 1):
            occ.setdefault(tuple(s[i:j]), []).append(i)
    out = set()
    for t, pos in occ.items():
        if len(pos) < 2:
            continue
        right = {s[p + len(t)] if p + len(t) < n else ("end", p) for p in pos}
        if len(right) < 2:
            continue
        if left_maximal:
            left = {s[p - 1] if p > 0 else ("start",) for p in pos}
            if len(left) < 2:
                continue
        out.add((t, tuple(sorted(pos))))
    return out


def all_binary(max_len):
    for L in range(max_len + 1):
        yield from itertools.product([0, 1], repeat=L)


@pytest.mark.parametrize("impl", IMPLS)
def test_suffix_and_lcp_arrays_exhaustive(impl):
    mod = backends()[impl]
    for w in all_binary(10):
        sa = suffix_array(w, impl=mod)
        assert sa.tolist() == brute_sa(w)
        if len(w):
            assert lcp_array(w, impl=mod).tolist() == brute_lcp(w, sa.tolist())


@pytest.mark.parametrize("impl", IMPLS)
def test_suffix_arrays_random(impl):
    mod = backends()[impl]
    rng = random.Random(30)
    for _ in range(300):
        w = [rng.randrange(rng.randint(1, 5)) for _ in range(rng.randint(1, 300))]
        sa = suffix_array(w, impl=mod).tolist()
        assert sa == brute_sa(w)
        assert lcp_array(w, impl=mod).tolist() == brute_lcp(w, sa)


@pytest.mark.parametrize("impl", IMPLS)
def test_longest_repeat_matches_brute_force(impl):
    mod = backends()[impl]
    for w in all_binary(11):
        assert longest_repeat(w, impl=mod) == brute_longest_repeat(w)


@pytest.mark.parametrize("impl", IMPLS)
@pytest.mark.parametrize("left_maximal", [False, True])
def test_repeat_intervals_match_brute_force(impl, left_maximal):
    mod = backends()[impl]
    rng = random.Random(31)
    cases = list(all_binary(9)) + [
        tuple(rng.randrange(3) for _ in range(rng.randint(2, 40))) for _ in range(200)
    ]
    for w in cases:
        if len(w) < 2:
            continue
        s = as_ranks(w)
        for min_len in (1, 2, 3):
            sa, lens, lbs, rbs = repeat_intervals(s, min_len, left_maximal, impl=mod)
            got = set()
            for L, lb, rb in zip(lens.tolist(), lbs.tolist(), rbs.tolist()):
                pos = sorted(sa[lb:rb + 1].tolist())
                got.add((tuple(w[pos[0]:pos[0] + L]), tuple(pos)))
            assert got == brute_repeats(w, min_len, left_maximal), (w, min_len)


def test_backends_agree_on_selection_and_cover():
    mods = list(backends().values())
    rng = np.random.default_rng(32)
    for _ in range(300):
        n = int(rng.integers(5, 200))
        covered = (rng.random(n) < 0.2).astype(np.uint8)
        length = int(rng.integers(1, 6))
        positions = np.sort(rng.choice(n - length + 1, size=int(rng.integers(1, n - length + 2)), replace=False)).astype(np.int64)
        results = []
        for m in mods:
            chosen = kernels.select_occurrences(positions, length, covered.copy(), impl=m)
            cov = covered.copy()
            kernels.cover(cov, chosen, length, impl=m)
            results.append((chosen.tolist(), cov.tolist()))
            # chosen occurrences are pairwise disjoint and avoid covered cells
            c = chosen.tolist()
            assert all(b >= a + length for a, b in zip(c, c[1:]))
            assert all(not covered[p:p + length].any() for p in c)
        assert all(r == results[0] for r in results)


def test_as_ranks_inputs():
    assert as_ranks(b"cab").tolist() == [2, 0, 1]
    assert as_ranks("cab").tolist() == [2, 0, 1]
    assert as_ranks([10, -5, 10]).tolist() == [1, 0, 1]
    assert as_ranks([]).tolist() == []


def test_longest_repeat_edge_cases():
    assert longest_repeat(b"") == 0
    assert longest_repeat(b"a") == 0
    assert longest_repeat(b"abab") == 2
    assert longest_repeat(b"aaa") == 2
    assert longest_repeat(b"abc") == 0


def test_pure_python_backend_forced_by_environment():
    env = dict(os.environ, GRAMLAB_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import gramlab.kernels as k; print(k.BACKEND, sorted(k.backends()))"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python ['python']"


def test_compiled_backend_present():
    # the extension is optional; when built it is the default
    if "cython" in backends():
        assert kernels.BACKEND == "cython"
    else:
        pytest.skip("compiled kernels not built")
