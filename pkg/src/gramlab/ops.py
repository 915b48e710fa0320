"""Grammar surgery: joining, croppings, nonterminal deletion, flattening.

Every operation returns a new :class:`~gramlab.grammar.Grammar` and
preserves the language contract documented on it.  Orphaned rules are
kept; :func:`prune` drops them explicitly.
"""

from __future__ import annotations

from .grammar import Grammar, GrammarError, expansion_lengths, expansion_of

__all__ = [
    "join",
    "crop_left",
    "crop_right",
    "delete_nonterminal",
    "flatten",
    "secondary_part",
    "prune",
]


def _shift(body, offset):
    return tuple(s if s >= 0 else s - offset for s in body)


def join(G1: Grammar, G2: Grammar) -> Grammar:
    """Grammar for the concatenation of the strings of ``G1`` and ``G2``.

    The start rule is ``A_2 A_{n1+2}``; the rules of ``G1`` follow shifted
    by one, then the rules of ``G2`` shifted by ``n1 + 1``.
    """
    if G1.alphabet_size != G2.alphabet_size:
        raise GrammarError(f"alphabet mismatch: {G1.alphabet_size} vs {G2.alphabet_size}")
    n1 = len(G1.rules)
    start = (-2, -(n1 + 2))
    rules = [start]
    rules += [_shift(b, 1) for b in G1.rules]
    rules += [_shift(b, n1 + 1) for b in G2.rules]
    return Grammar(rules, G1.alphabet_size)


def _split_start(G: Grammar, p: int):
    """Locate the cut of the start rule at terminal offset ``p``.

    Returns ``(j, inside)`` where ``alpha_1[:j]`` expands to a prefix of
    length ``p - inside`` and, if ``inside > 0``, the symbol ``alpha_1[j]``
    is a nonterminal whose expansion straddles the cut.
    """
    lens = expansion_lengths(G)
    total = lens[1]
    if not 0 <= p <= total:
        raise GrammarError(f"crop offset {p} outside 0..{total}")
    start = G.rules[0]
    acc = 0
    j = 0
    while j < len(start):
        s = start[j]
        ls = 1 if s >= 0 else lens[-s]
        if acc + ls > p:
            break
        acc += ls
        j += 1
    return j, p - acc


def crop_left(G: Grammar, p: int) -> Grammar:
    """Grammar for the first ``p`` terminals of ``expand(G)``.

    The start rule keeps its longest prefix of whole symbols fitting in
    ``p`` terminals and, when the cut falls inside a nonterminal, appends
    the required terminal prefix of that nonterminal's expansion.
    Secondary rules are kept unchanged.
    """
    j, inside = _split_start(G, p)
    start = G.rules[0]
    head = start[:j]
    if inside:
        head += expansion_of(G, (start[j],))[:inside]
    return Grammar((head,) + G.rules[1:], G.alphabet_size)


def crop_right(G: Grammar, q: int) -> Grammar:
    """Grammar for the last ``q`` terminals of ``expand(G)``."""
    lens = expansion_lengths(G)
    total = lens[1]
    if not 0 <= q <= total:
        raise GrammarError(f"crop offset {q} outside 0..{total}")
    start = G.rules[0]
    acc = 0
    j = len(start)
    while j > 0:
        s = start[j - 1]
        ls = 1 if s >= 0 else lens[-s]
        if acc + ls > q:
            break
        acc += ls
        j -= 1
    inside = q - acc
    tail = start[j:]
    if inside:
        exp = expansion_of(G, (start[j - 1],))
        tail = exp[len(exp) - inside:] + tail
    return Grammar((tail,) + G.rules[1:], G.alphabet_size)


def delete_nonterminal(G: Grammar, i: int) -> Grammar:
    """Remove rule ``A_i`` (``i >= 2``), substituting its body one level deep.

    Nonterminals above ``i`` are renumbered down by one.
    """
    n = len(G.rules)
    if not 2 <= i <= n:
        raise GrammarError(f"can only delete A_2..A_{n}, got A_{i}")
    alpha_i = G.rules[i - 1]

    def phi(body):
        out = []
        for s in body:
            if s == -i:
                out.extend(alpha_i)
            else:
                out.append(s)
        return tuple(s if s >= 0 or -s < i else s + 1 for s in out)

    rules = [phi(b) for k, b in enumerate(G.rules, start=1) if k != i]
    return Grammar(rules, G.alphabet_size)


def flatten(G: Grammar) -> Grammar:
    """Replace every secondary body by its terminal expansion."""
    rules = [G.rules[0]] + [expansion_of(G, b) for b in G.rules[1:]]
    return Grammar(rules, G.alphabet_size)


def secondary_part(G: Grammar) -> Grammar:
    """``G`` with an empty start body; used for code-length accounting."""
    return Grammar(((),) + G.rules[1:], G.alphabet_size)


def prune(G: Grammar) -> Grammar:
    """Drop rules unreachable from ``A_1`` and renumber the survivors."""
    n = len(G.rules)
    reach = [False] * (n + 1)
    reach[1] = True
    for i in range(1, n + 1):
        if reach[i]:
            for s in G.rules[i - 1]:
                if s < 0:
                    reach[-s] = True
    new_index = {}
    for i in range(1, n + 1):
        if reach[i]:
            new_index[i] = len(new_index) + 1
    rules = [
        tuple(s if s >= 0 else -new_index[-s] for s in G.rules[i - 1])
        for i in range(1, n + 1)
        if reach[i]
    ]
    return Grammar(rules, G.alphabet_size)
