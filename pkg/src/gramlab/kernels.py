"""Backend selection for the hot kernels.

The compiled extension ``gramlab._kernels`` is used when it imports;
otherwise (or with ``GRAMLAB_PURE_PYTHON=1``) the numpy/Python twin in
``gramlab._kernels_py`` is used.  Both produce identical results.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("GRAMLAB_PURE_PYTHON", "") != "1":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py


def backends() -> dict:
    """Available kernel modules keyed by name."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def as_ranks(seq) -> np.ndarray:
    """Dense ``int64`` ranks of a symbol sequence (bytes, str, list or array)."""
    if isinstance(seq, (bytes, bytearray, memoryview)):
        arr = np.frombuffer(bytes(seq), dtype=np.uint8)
    elif isinstance(seq, str):
        arr = np.fromiter(map(ord, seq), dtype=np.int64, count=len(seq))
    else:
        arr = np.asarray(seq)
        if arr.dtype == object:
            arr = arr.astype(np.int64)
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, inv = np.unique(arr, return_inverse=True)
    return np.ascontiguousarray(inv.reshape(-1), dtype=np.int64)


def suffix_array(seq, impl=None) -> np.ndarray:
    s = as_ranks(seq)
    return (impl or _impl).suffix_array(s)


def lcp_array(seq, sa=None, impl=None) -> np.ndarray:
    impl = impl or _impl
    s = as_ranks(seq)
    if sa is None:
        sa = impl.suffix_array(s)
    return impl.lcp_array(s, np.ascontiguousarray(sa, dtype=np.int64))


def longest_repeat(seq, impl=None) -> int:
    impl = impl or _impl
    s = as_ranks(seq)
    if len(s) < 2:
        return 0
    sa = impl.suffix_array(s)
    return impl.max_lcp(impl.lcp_array(s, sa))


def repeat_intervals(s: np.ndarray, min_len: int = 2, left_maximal: bool = True, impl=None):
    """Suffix array plus the LCP intervals of ``s`` (already rank-compressed).

    Returns ``(sa, lengths, lb, rb)``: the repeated substring
    ``s[sa[lb] : sa[lb] + length]`` occurs exactly at ``sa[lb..rb]``.
    """
    impl = impl or _impl
    sa = impl.suffix_array(s)
    lcp = impl.lcp_array(s, sa)
    lens, lbs, rbs = impl.lcp_intervals(s, sa, lcp, min_len, left_maximal)
    return sa, lens, lbs, rbs


def select_occurrences(positions: np.ndarray, length: int, covered: np.ndarray, impl=None) -> np.ndarray:
    return (impl or _impl).select_occurrences(positions, length, covered)


def cover(covered: np.ndarray, chosen: np.ndarray, length: int, impl=None) -> None:
    (impl or _impl).cover(covered, chosen, length)
