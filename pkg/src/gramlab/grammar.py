"""Admissible grammars: representation, validation, expansion and measures.

A grammar is an ordered list of rule bodies ``(alpha_1, ..., alpha_n)`` over
the terminal alphabet ``{0, ..., D_X - 1}`` and the nonterminals
``A_1, ..., A_n``. Rule ``i`` may only mention nonterminals ``A_j`` with
``j > i``, so every grammar generates exactly one string.

Symbols are plain integers: a terminal is its id (``>= 0``) and the
nonterminal ``A_j`` is stored as ``-j``.  Use :func:`nt` and
:func:`nt_index` rather than negating by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "GrammarError",
    "Grammar",
    "GrammarClass",
    "GENERAL",
    "FLAT",
    "nt",
    "nt_index",
    "is_nonterminal",
    "expand",
    "expand_naive",
    "expansion_of",
    "expansion_lengths",
    "yk_length",
    "voc",
    "is_member",
    "class_membership",
    "usage_counts",
]


class GrammarError(ValueError):
    """Raised for grammars that violate the admissibility invariants."""


def nt(j: int) -> int:
    """Symbol for the nonterminal ``A_j`` (``j >= 1``)."""
    if j < 1:
        raise ValueError(f"nonterminal index must be >= 1, got {j}")
    return -j


def nt_index(s: int) -> int:
    return -s


def is_nonterminal(s: int) -> bool:
    return s < 0


@dataclass(frozen=True, init=False)
class Grammar:
    """Immutable admissible grammar.

    Parameters
    ----------
    rules
        Rule bodies; ``rules[i - 1]`` is the body of ``A_i``.
    alphabet_size
        Terminal alphabet size ``D_X``.

    Construction validates terminal ranges and strict succession of
    nonterminals. Empty secondary bodies are accepted here; see
    :meth:`is_strict`.
    """

    rules: tuple[tuple[int, ...], ...]
    alphabet_size: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __init__(self, rules: Iterable[Iterable[int]], alphabet_size: int):
        object.__setattr__(self, "rules", tuple(tuple(int(s) for s in body) for body in rules))
        object.__setattr__(self, "alphabet_size", int(alphabet_size))
        object.__setattr__(self, "_cache", {})
        self._validate()

    def _validate(self) -> None:
        n = len(self.rules)
        dx = self.alphabet_size
        if dx < 1:
            raise GrammarError(f"alphabet size must be >= 1, got {dx}")
        if n < 1:
            raise GrammarError("a grammar needs at least the start rule")
        for i, body in enumerate(self.rules, start=1):
            for s in body:
                if s >= 0:
                    if s >= dx:
                        raise GrammarError(f"terminal {s} in rule {i} outside alphabet of size {dx}")
                else:
                    j = -s
                    if not i < j <= n:
                        raise GrammarError(f"rule {i} mentions A_{j}; only A_{i + 1}..A_{n} allowed")

    def __len__(self) -> int:
        return len(self.rules)

    def body(self, i: int) -> tuple[int, ...]:
        """Body of rule ``A_i`` (1-based)."""
        return self.rules[i - 1]

    def is_strict(self) -> bool:
        """True when every secondary rule body is nonempty."""
        return all(self.rules[1:])

    def validate(self, strict: bool = False) -> None:
        if strict and not self.is_strict():
            empty = [i for i, b in enumerate(self.rules, start=1) if i > 1 and not b]
            raise GrammarError(f"empty secondary rule bodies: {empty}")

    def __str__(self) -> str:
        lines = []
        for i, body in enumerate(self.rules, start=1):
            syms = " ".join(f"A{-s}" if s < 0 else str(s) for s in body)
            lines.append(f"A{i} -> {syms}")
        return "\n".join(lines)


def _rule_expansions(G: Grammar) -> list[tuple[int, ...]]:
    """Terminal expansion of every rule, computed bottom-up and cached."""
    exps = G._cache.get("expansions")
    if exps is None:
        n = len(G.rules)
        exps = [()] * (n + 1)
        for i in range(n, 0, -1):
            out: list[int] = []
            for s in G.rules[i - 1]:
                if s >= 0:
                    out.append(s)
                else:
                    out.extend(exps[-s])
            exps[i] = tuple(out)
        G._cache["expansions"] = exps
    return exps


def expansion_lengths(G: Grammar) -> list[int]:
    """``lengths[i]`` is the length of the expansion of ``A_i`` (index 0 unused)."""
    lens = G._cache.get("lengths")
    if lens is None:
        n = len(G.rules)
        lens = [0] * (n + 1)
        for i in range(n, 0, -1):
            lens[i] = sum(1 if s >= 0 else lens[-s] for s in G.rules[i - 1])
        G._cache["lengths"] = lens
    return lens


def expand(G: Grammar) -> tuple[int, ...]:
    """The unique terminal string generated by ``G``."""
    return _rule_expansions(G)[1]


def expand_naive(G: Grammar) -> tuple[int, ...]:
    """Unmemoized recursive expansion; an oracle for :func:`expand`."""

    def go(i: int) -> list[int]:
        out: list[int] = []
        for s in G.rules[i - 1]:
            out.extend([s] if s >= 0 else go(-s))
        return out

    return tuple(go(1))


def expansion_of(G: Grammar, alpha: Sequence[int], rules: Iterable[int] | None = None) -> tuple[int, ...]:
    """Expand ``alpha`` with respect to a subset of the rules of ``G``.

    Nonterminals whose index is in ``rules`` are rewritten recursively;
    all other nonterminals are left in place.  ``rules=None`` means every
    rule of ``G``.
    """
    if rules is None:
        exps = _rule_expansions(G)
        out: list[int] = []
        for s in alpha:
            out.extend([s] if s >= 0 else exps[-s])
        return tuple(out)
    subset = frozenset(rules)
    n = len(G.rules)
    bad = [j for j in subset if not 1 <= j <= n]
    if bad:
        raise GrammarError(f"rules {bad} not in grammar")
    memo: dict[int, tuple[int, ...]] = {}

    def sub(j: int) -> tuple[int, ...]:
        if j not in memo:
            memo[j] = expansion_of_seq(G.rules[j - 1])
        return memo[j]

    def expansion_of_seq(seq: Sequence[int]) -> tuple[int, ...]:
        res: list[int] = []
        for s in seq:
            if s < 0 and -s in subset:
                res.extend(sub(-s))
            else:
                res.append(s)
        return tuple(res)

    return expansion_of_seq(alpha)


def yk_length(G: Grammar) -> int:
    """Yang-Kieffer length: total number of symbols over all rule bodies."""
    return sum(len(b) for b in G.rules)


def voc(G: Grammar) -> int:
    """Vocabulary size, i.e. the number of rules."""
    return len(G.rules)


def usage_counts(G: Grammar) -> list[int]:
    """``counts[j]`` = occurrences of ``A_j`` on right-hand sides (index 0 unused)."""
    counts = [0] * (len(G.rules) + 1)
    for body in G.rules:
        for s in body:
            if s < 0:
                counts[-s] += 1
    return counts


@dataclass(frozen=True, order=True)
class GrammarClass:
    """One of the grammar classes: general, flat, k-block interleaved, k-block."""

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("general", "flat", "block_interleaved", "block"):
            raise ValueError(f"unknown grammar class {self.kind!r}")
        if self.kind in ("block_interleaved", "block") and self.k < 1:
            raise ValueError("block classes need k >= 1")

    @classmethod
    def block_interleaved(cls, k: int) -> "GrammarClass":
        return cls("block_interleaved", k)

    @classmethod
    def block(cls, k: int) -> "GrammarClass":
        return cls("block", k)

    def __str__(self) -> str:
        if self.kind in ("general", "flat"):
            return self.kind
        return f"{self.kind}({self.k})"


GENERAL = GrammarClass("general")
FLAT = GrammarClass("flat")


def _is_flat(G: Grammar) -> bool:
    return all(body and all(s >= 0 for s in body) for body in G.rules[1:])


def is_member(G: Grammar, cls: GrammarClass) -> bool:
    """Membership predicate for a single grammar class."""
    if cls.kind == "general":
        return True
    if not _is_flat(G):
        return False
    if cls.kind == "flat":
        return True
    k = cls.k
    if any(len(body) != k for body in G.rules[1:]):
        return False
    if cls.kind == "block_interleaved":
        return True
    start = G.rules[0]
    cut = 0
    while cut < len(start) and start[cut] < 0:
        cut += 1
    tail = start[cut:]
    if any(s < 0 for s in tail) or len(tail) >= k:
        return False
    return {-s for s in start[:cut]} == set(range(2, len(G.rules) + 1))


def class_membership(G: Grammar, max_k: int | None = None) -> set[GrammarClass]:
    """All classes ``G`` belongs to.

    With secondary rules present the block length ``k`` is pinned by the
    rule bodies.  A single-rule grammar is a member of the block families
    for every large enough ``k``; those are reported for ``k <= max_k``
    (default ``len(alpha_1) + 1``).
    """
    out = {GENERAL}
    if not _is_flat(G):
        return out
    out.add(FLAT)
    if len(G.rules) > 1:
        ks = {len(G.rules[1])}
    else:
        top = max_k if max_k is not None else len(G.rules[0]) + 1
        ks = set(range(1, top + 1))
    for k in sorted(ks):
        for cls in (GrammarClass.block_interleaved(k), GrammarClass.block(k)):
            if is_member(G, cls):
                out.add(cls)
    return out
