"""Grammar transforms: exhaustive minimal grammars, greedy word discovery, k-blocks.

Objectives
----------
``Objective.yk()`` scores a grammar by its Yang-Kieffer length and
``Objective.code_length(code)`` by ``len(encode_grammar(G, code))``.

Exhaustive search
-----------------
Candidate rule expansions are the substrings of ``w`` of length at least 2
that occur at least twice (overlaps allowed).  For every subset of at most
``max_rules`` candidates and every ordering of it, each rule body is the
cheapest parse of its expansion into terminals and references to rules
allowed by the class (none for flat grammars, later rules otherwise).  The
parse is a shortest path over positions.  Ties go to fewer rules, then to
the lexicographically smallest integer serialisation.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from . import kernels
from .coder import IntCode, code_length
from .grammar import FLAT, GENERAL, Grammar, GrammarClass, nt, yk_length
from .ops import flatten

__all__ = [
    "Objective",
    "YK",
    "TransformSpec",
    "exhaustive_minimal",
    "GreedyStep",
    "GreedyResult",
    "greedy_run",
    "greedy_transform",
    "kblock_transform",
    "k_of_n",
    "word_vocab",
]


@dataclass(frozen=True)
class Objective:
    """Grammar cost: ``"yk"`` (Yang-Kieffer length) or ``"code"`` (encoded digits)."""

    kind: str = "yk"
    code: IntCode | None = None

    def __post_init__(self):
        if self.kind not in ("yk", "code"):
            raise ValueError(f"unknown objective {self.kind!r}")
        if self.kind == "code" and self.code is None:
            raise ValueError("code-length objective needs an IntCode")

    @classmethod
    def yk(cls) -> "Objective":
        return cls("yk")

    @classmethod
    def code_length(cls, code: IntCode | int) -> "Objective":
        if isinstance(code, int):
            code = IntCode(code)
        return cls("code", code)

    def __call__(self, G: Grammar) -> int:
        if self.kind == "yk":
            return yk_length(G)
        return code_length(G, self.code)

    def value_cost(self, v: int) -> int:
        """Cost of one body symbol serialised as ``v``."""
        return 1 if self.kind == "yk" else self.code.length(v)

    def marker_cost(self, v: int) -> int:
        """Cost of a separator or terminator; free under Yang-Kieffer length."""
        return 0 if self.kind == "yk" else self.code.length(v)

    def __str__(self) -> str:
        return "yk" if self.kind == "yk" else f"code(D_Y={self.code.radix})"


YK = Objective.yk()


@dataclass(frozen=True)
class TransformSpec:
    """Grammar class, objective and search method of a transform.

    ``method`` is ``"exhaustive"``, ``"greedy"`` or ``"kblock"``.
    """

    grammar_class: GrammarClass = GENERAL
    objective: Objective = YK
    method: str = "exhaustive"
    max_len: int = 10
    k: int | None = None
    max_rules: int = 4

    def __post_init__(self):
        if self.method not in ("exhaustive", "greedy", "kblock"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "kblock" and (self.k is None or self.k < 1):
            raise ValueError("kblock needs k >= 1")
        if self.method == "exhaustive":
            if self.grammar_class not in (GENERAL, FLAT):
                raise ValueError("exhaustive search covers the general and flat classes only")
            if self.max_len < 0:
                raise ValueError("max_len must be >= 0")

    def apply(self, w: Sequence[int], alphabet_size: int) -> Grammar:
        if self.method == "exhaustive":
            return exhaustive_minimal(w, alphabet_size, self)
        if self.method == "greedy":
            return greedy_transform(w, alphabet_size, self.objective)
        return kblock_transform(w, self.k, alphabet_size)


# --- exhaustive -------------------------------------------------------------


def _candidates(w: tuple[int, ...]) -> list[tuple[int, ...]]:
    n = len(w)
    seen: dict[tuple[int, ...], int] = {}
    for L in range(2, n):
        for p in range(n - L + 1):
            s = w[p:p + L]
            seen[s] = seen.get(s, 0) + 1
    return sorted((s for s, c in seen.items() if c >= 2), key=lambda s: (-len(s), s))


def _parse(target, refs, tcost):
    """Cheapest parse of ``target``; ties broken by smallest serialisation.

    ``refs`` holds ``(expansion, cost, value, symbol)``; terminals cost
    ``tcost[t]`` and serialise as themselves.  Returns ``(cost, body, values)``.
    """
    n = len(target)
    best = [0] * (n + 1)
    for p in range(n - 1, -1, -1):
        b = tcost[target[p]] + best[p + 1]
        for exp, c, _, _ in refs:
            L = len(exp)
            if p + L <= n and target[p:p + L] == exp:
                v = c + best[p + L]
                if v < b:
                    b = v
        best[p] = b
    body, values = [], []
    p = 0
    while p < n:
        t = target[p]
        pick = (t, t, 1) if tcost[t] + best[p + 1] == best[p] else None
        for exp, c, val, sym in refs:
            L = len(exp)
            if p + L <= n and target[p:p + L] == exp and c + best[p + L] == best[p]:
                if pick is None or val < pick[0]:
                    pick = (val, sym, L)
        body.append(pick[1])
        values.append(pick[0])
        p += pick[2]
    return best[0], body, values


def _min_ref_parse(target, exps, ref_cost, tcost):
    n = len(target)
    best = [0] * (n + 1)
    for p in range(n - 1, -1, -1):
        b = tcost[target[p]] + best[p + 1]
        for exp in exps:
            L = len(exp)
            if p + L <= n and target[p:p + L] == exp:
                b = min(b, ref_cost + best[p + L])
        best[p] = b
    return best[0]


def _is_substring(a: tuple, b: tuple) -> bool:
    La = len(a)
    return any(b[p:p + La] == a for p in range(len(b) - La + 1))


@lru_cache(maxsize=None)
def _exhaustive(w: tuple[int, ...], dx: int, flat: bool, objective: Objective, max_rules: int):
    tcost = [objective.value_cost(t) for t in range(dx)]
    sep = objective.marker_cost(dx)
    term = objective.marker_cost(dx + 1)
    min_ref = objective.value_cost(dx + 2)
    cands = _candidates(w)

    best_key = None
    best_rules = None
    for r in range(0, min(max_rules, len(cands)) + 1):
        for subset in combinations(cands, r):
            # order-free lower bound: every reference at the cheapest index
            lb = term + r * sep + _min_ref_parse(w, subset, min_ref, tcost)
            for s in subset:
                if flat:
                    lb += sum(tcost[t] for t in s)
                else:
                    inner = [e for e in subset if len(e) < len(s) and _is_substring(e, s)]
                    lb += _min_ref_parse(s, inner, min_ref, tcost)
            if best_key is not None and (lb > best_key[0] or (lb == best_key[0] and r > best_key[1])):
                continue
            for order in permutations(subset):
                targets = (w,) + order
                total = term + r * sep
                bodies, values = [], []
                for i, target in enumerate(targets, start=1):
                    refs = []
                    if i == 1 or not flat:
                        for j in range(i + 1, r + 2):
                            exp = targets[j - 1]
                            if len(exp) < len(target):
                                val = dx + 1 + j - i
                                refs.append((exp, objective.value_cost(val), val, nt(j)))
                    c, body, vals = _parse(target, refs, tcost)
                    total += c
                    bodies.append(body)
                    if i > 1:
                        values.append(dx)
                    values.extend(vals)
                values.append(dx + 1)
                key = (total, r, values)
                if best_key is None or key < best_key:
                    best_key = key
                    best_rules = bodies
    return best_rules, best_key[0]


def exhaustive_minimal(w: Sequence[int], alphabet_size: int, spec: TransformSpec | None = None) -> Grammar:
    """Globally minimal grammar for ``w`` within the searched family.

    Parameters
    ----------
    w
        Terminal string over ``{0, ..., alphabet_size - 1}``.
    alphabet_size
        ``D_X``.
    spec
        Class (general or flat), objective and ``max_len``; defaults to
        Yang-Kieffer length over general grammars.

    Raises
    ------
    ValueError
        If ``len(w)`` exceeds ``spec.max_len``.
    """
    spec = spec or TransformSpec()
    if spec.method != "exhaustive":
        raise ValueError("spec does not select exhaustive search")
    w = tuple(int(x) for x in w)
    if len(w) > spec.max_len:
        raise ValueError(f"string length {len(w)} exceeds exhaustive cap {spec.max_len}")
    if any(not 0 <= x < alphabet_size for x in w):
        raise ValueError("terminal outside alphabet")
    rules, _ = _exhaustive(w, alphabet_size, spec.grammar_class == FLAT, spec.objective, spec.max_rules)
    return Grammar(rules, alphabet_size)


# --- greedy -----------------------------------------------------------------


@dataclass(frozen=True)
class GreedyStep:
    rule: int
    expansion: tuple[int, ...]
    count: int
    gain: int
    objective: int


@dataclass
class GreedyResult:
    grammar: Grammar
    log: list[GreedyStep] = field(default_factory=list)
    initial: int = 0

    @property
    def final(self) -> int:
        return self.log[-1].objective if self.log else self.initial


def greedy_run(w: Sequence[int], alphabet_size: int, objective: Objective = YK) -> GreedyResult:
    """Most-compressive-first flat grammar construction.

    Candidates are the left- and right-maximal repeats of the still uncovered
    text.  Each step takes the candidate whose non-overlapping uncovered
    occurrences give the largest exact decrease of the objective (stale
    upper bounds are re-evaluated lazily); a candidate equal to an existing
    rule only adds references.  The census is rebuilt until a full pass
    accepts nothing.
    """
    if isinstance(w, (bytes, bytearray)):
        w = np.frombuffer(bytes(w), dtype=np.uint8)
    arr = np.asarray(w, dtype=np.int64).reshape(-1)
    n = len(arr)
    if n < 1:
        raise ValueError("cannot transform the empty string")
    if arr.min() < 0 or arr.max() >= alphabet_size:
        raise ValueError("terminal outside alphabet")
    dx = alphabet_size
    tc = np.array([objective.value_cost(t) for t in range(dx)], dtype=np.int64)
    cum = np.concatenate(([0], np.cumsum(tc[arr])))
    initial = int(cum[-1]) + objective.marker_cost(dx + 1)
    sep = objective.marker_cost(dx)

    def gain(m: int, c: int, L: int, j: int, new: bool) -> int:
        if objective.kind == "yk":
            return m * L - m - (L if new else 0)
        g = m * c - m * objective.value_cost(dx + j)
        return g - c - sep if new else g

    covered = np.zeros(n, dtype=np.uint8)
    rule_at = np.zeros(n, dtype=np.int64)
    bodies: list[tuple[int, ...]] = []
    rule_of: dict[tuple[int, ...], int] = {}
    log: list[GreedyStep] = []
    current = initial
    accepted = True
    while accepted:
        # repeat census of the uncovered text; covered cells become unique
        # sentinels so no candidate can straddle an accepted occurrence
        accepted = False
        masked = arr.copy()
        cells = np.flatnonzero(covered)
        masked[cells] = dx + cells
        s = kernels.as_ranks(masked)
        sa, lens, lbs, rbs = kernels.repeat_intervals(s, 2, True)
        counts = rbs - lbs + 1
        starts = sa[lbs]
        costs = cum[starts + lens] - cum[starts]
        exps: dict[int, tuple[int, ...]] = {}

        def expansion(idx: int) -> tuple[int, ...]:
            e = exps.get(idx)
            if e is None:
                p, L = int(starts[idx]), int(lens[idx])
                e = exps[idx] = tuple(arr[p:p + L].tolist())
            return e

        def evaluate(idx: int, m: int) -> int:
            j = rule_of.get(expansion(idx))
            if j is None:
                return gain(m, int(costs[idx]), int(lens[idx]), len(bodies) + 2, True)
            return gain(m, int(costs[idx]), int(lens[idx]), j, False)

        # vectorised first bounds; exact evaluation only where a rule may exist
        j0 = len(bodies) + 2
        if objective.kind == "yk":
            ub = counts * lens - counts - lens
        else:
            ub = counts * costs - counts * objective.value_cost(dx + j0) - costs - sep
        known = {len(b) for b in bodies}
        maybe = np.isin(lens, list(known)) if known else np.zeros(len(lens), dtype=bool)
        for idx in np.flatnonzero(maybe).tolist():
            ub[idx] = evaluate(idx, int(counts[idx]))
        live = np.flatnonzero(ub > 0)
        heap = list(zip((-ub[live]).tolist(), live.tolist()))
        heapq.heapify(heap)
        positions: dict[int, np.ndarray] = {}
        while heap:
            neg, idx = heapq.heappop(heap)
            pos = positions.get(idx)
            if pos is None:
                pos = positions[idx] = np.sort(sa[lbs[idx]:rbs[idx] + 1])
            L = int(lens[idx])
            chosen = kernels.select_occurrences(pos, L, covered)
            g = evaluate(idx, len(chosen))
            if g <= 0:
                continue
            if heap and g < -heap[0][0]:
                heapq.heappush(heap, (-g, idx))
                continue
            exp = exps[idx]
            j = rule_of.get(exp)
            if j is None:
                j = rule_of[exp] = len(bodies) + 2
                bodies.append(exp)
            kernels.cover(covered, chosen, L)
            rule_at[chosen] = j
            current -= g
            log.append(GreedyStep(j, exp, len(chosen), g, current))
            accepted = True
            # later rounds reuse the rule, so the bound is the reuse gain
            bound = evaluate(idx, int(counts[idx]))
            if bound > 0:
                heapq.heappush(heap, (-bound, idx))

    start: list[int] = []
    p = 0
    lengths = [0, 0] + [len(b) for b in bodies]
    while p < n:
        j = int(rule_at[p])
        if j:
            start.append(nt(j))
            p += lengths[j]
        else:
            start.append(int(arr[p]))
            p += 1
    G = Grammar([start] + [list(b) for b in bodies], dx)
    return GreedyResult(G, log, initial)


def greedy_transform(w: Sequence[int], alphabet_size: int, objective: Objective = YK) -> Grammar:
    return greedy_run(w, alphabet_size, objective).grammar


# --- k-blocks ---------------------------------------------------------------


def kblock_transform(w: Sequence[int], k: int, alphabet_size: int) -> Grammar:
    """k-block grammar: distinct blocks in first-occurrence order, then the remainder.

    The remainder is the final ``len(w) % k`` symbols, kept as terminals.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = [int(x) for x in w]
    nblocks = len(w) // k
    index: dict[tuple[int, ...], int] = {}
    start: list[int] = []
    for b in range(nblocks):
        block = tuple(w[b * k:(b + 1) * k])
        j = index.get(block)
        if j is None:
            j = index[block] = len(index) + 2
        start.append(nt(j))
    start.extend(w[nblocks * k:])
    return Grammar([start] + [list(b) for b in index], alphabet_size)


def k_of_n(n: int, h: float, eps: float) -> int:
    """Largest ``k >= 0`` with ``k exp(k (h + eps)) <= n``."""
    if n < 1 or h < 0 or eps <= 0:
        raise ValueError("need n >= 1, h >= 0, eps > 0")
    rate = h + eps
    log_n = math.log(n)
    k = 0
    while math.log(k + 1) + (k + 1) * rate <= log_n:
        k += 1
    return k


# --- vocabulary -------------------------------------------------------------


def word_vocab(w: Sequence[int], alphabet_size: int, code: IntCode) -> list[tuple[tuple[int, ...], int, int]]:
    """Secondary rules of the greedy code-length transform as ``(expansion, count, gain)``.

    Sorted by gain, then count (both descending), then expansion.
    """
    res = greedy_run(w, alphabet_size, Objective.code_length(code))
    G = flatten(res.grammar)
    count: dict[int, int] = {}
    gain: dict[int, int] = {}
    for step in res.log:
        count[step.rule] = count.get(step.rule, 0) + step.count
        gain[step.rule] = gain.get(step.rule, 0) + step.gain
    entries = [(G.rules[j - 1], count[j], gain[j]) for j in count]
    if res.initial - sum(e[2] for e in entries) != res.final:
        raise AssertionError("greedy log does not account for the final objective")
    entries.sort(key=lambda e: (-e[2], -e[1], e[0]))
    return entries
