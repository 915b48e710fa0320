"""Local grammar encoder and natural number codes.

A grammar is serialised in two steps.  :func:`grammar_to_ints` writes the
rules as one integer sequence (terminals verbatim, nonterminals by
relative index, ``D_X`` between rules, ``D_X + 1`` at the end), then every
integer is written with a prefix-free natural number code.

Natural number code ("padded delta"), radix ``D``:

* ``l`` = number of base-``D`` digits of ``n`` (``l(0) = 1``),
* ``lam`` = number of base-``D`` digits of ``l``,
* codeword = ``lam - 1`` zeros, the ``lam`` digits of ``l``, then ``n``
  written with exactly ``l`` digits.

The codeword has ``l + 2*lam - 1`` digits.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Iterable, Sequence

from .grammar import Grammar, GrammarError

__all__ = [
    "DecodeError",
    "IntCode",
    "grammar_to_ints",
    "ints_to_grammar",
    "encode_grammar",
    "decode_grammar",
    "code_length",
    "W",
    "MAGIC",
    "pack_container",
    "unpack_container",
]


class DecodeError(ValueError):
    """Malformed or truncated code stream."""


def _ndigits(n: int, radix: int) -> int:
    if n < radix:
        return 1
    # float estimate from the bit length, then exact correction
    count = max(1, int((n.bit_length() - 1) / math.log2(radix)))
    while radix**count <= n:
        count += 1
    while count > 1 and radix ** (count - 1) > n:
        count -= 1
    return count


def _digits(n: int, radix: int, width: int) -> list[int]:
    out = [0] * width
    for pos in range(width - 1, -1, -1):
        n, out[pos] = divmod(n, radix)
    return out


@dataclass(frozen=True)
class IntCode:
    """Prefix-free code for nonnegative integers over ``{0, ..., radix - 1}``."""

    radix: int = 2

    def __post_init__(self):
        if self.radix < 2:
            raise ValueError(f"radix must be >= 2, got {self.radix}")

    def length(self, n: int) -> int:
        """Codeword length of ``n`` without building it."""
        ell = _ndigits(n, self.radix)
        return ell + 2 * _ndigits(ell, self.radix) - 1

    def encode(self, n: int) -> list[int]:
        if n < 0:
            raise ValueError(f"cannot encode negative integer {n}")
        D = self.radix
        ell = _ndigits(n, D)
        lam = _ndigits(ell, D)
        return [0] * (lam - 1) + _digits(ell, D, lam) + _digits(n, D, ell)

    def decode(self, digits: Sequence[int], pos: int = 0) -> tuple[int, int]:
        """Read one codeword starting at ``pos``.

        Returns ``(n, consumed)``.
        """
        D = self.radix
        end = len(digits)
        i = pos
        while i < end and digits[i] == 0:
            i += 1
        lam = i - pos + 1
        if i + lam > end:
            raise DecodeError(f"truncated codeword at offset {pos}")
        ell = 0
        for d in digits[i:i + lam]:
            if not 0 <= d < D:
                raise DecodeError(f"digit {d} outside radix {D}")
            ell = ell * D + d
        i += lam
        if i + ell > end:
            raise DecodeError(f"truncated codeword at offset {pos}")
        n = 0
        for d in digits[i:i + ell]:
            if not 0 <= d < D:
                raise DecodeError(f"digit {d} outside radix {D}")
            n = n * D + d
        i += ell
        return n, i - pos

    def encode_many(self, values: Iterable[int]) -> list[int]:
        out: list[int] = []
        for v in values:
            out.extend(self.encode(v))
        return out

    def decode_many(self, digits: Sequence[int]) -> list[int]:
        out = []
        pos = 0
        while pos < len(digits):
            n, used = self.decode(digits, pos)
            out.append(n)
            pos += used
        return out


def grammar_to_ints(G: Grammar) -> list[int]:
    """Integer serialisation with relative nonterminal indices."""
    dx = G.alphabet_size
    out: list[int] = []
    for i, body in enumerate(G.rules, start=1):
        if i > 1:
            out.append(dx)
        base = dx + 1 - i
        for s in body:
            out.append(s if s >= 0 else base - s)
    out.append(dx + 1)
    return out


def ints_to_grammar(seq: Sequence[int], alphabet_size: int) -> Grammar:
    """Inverse of :func:`grammar_to_ints`; validates strictly."""
    dx = alphabet_size
    if not seq or seq[-1] != dx + 1:
        raise DecodeError("missing terminator")
    rules: list[list[int]] = [[]]
    for pos, v in enumerate(seq[:-1]):
        if v < 0:
            raise DecodeError(f"negative value at {pos}")
        if v < dx:
            rules[-1].append(v)
        elif v == dx:
            rules.append([])
        elif v == dx + 1:
            raise DecodeError(f"terminator before end of stream at {pos}")
        else:
            i = len(rules)
            rules[-1].append(-(v - dx - 1 + i))
    try:
        G = Grammar(rules, dx)
    except GrammarError as exc:
        raise DecodeError(f"bad relative index: {exc}") from None
    return G


def encode_grammar(G: Grammar, code: IntCode) -> list[int]:
    return code.encode_many(grammar_to_ints(G))


def decode_grammar(digits: Sequence[int], alphabet_size: int, code: IntCode) -> Grammar:
    values = code.decode_many(digits)
    return ints_to_grammar(values, alphabet_size)


def code_length(G: Grammar, code: IntCode) -> int:
    """``len(encode_grammar(G, code))`` computed from codeword lengths."""
    memo: dict[int, int] = {}
    total = 0
    for v in grammar_to_ints(G):
        c = memo.get(v)
        if c is None:
            c = memo[v] = code.length(v)
        total += c
    return total


def W(m: int, alphabet_size: int, code: IntCode) -> int:
    """Longest codeword among ``0 .. D_X + 2 + m``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    # codeword lengths are nondecreasing
    return code.length(alphabet_size + 2 + m)


# --- file container -------------------------------------------------------

MAGIC = b"GBC1"
_BYTE_CODE = IntCode(256)


def pack_container(G: Grammar, original_length: int) -> bytes:
    """Serialise ``G`` in the ``GBC1`` byte container (radix 256)."""
    if G.alphabet_size != 256:
        raise ValueError("container stores byte grammars only (D_X = 256)")
    body = _BYTE_CODE.encode(original_length) + encode_grammar(G, _BYTE_CODE)
    return MAGIC + bytes([1]) + bytes(body)


def unpack_container(data: bytes) -> tuple[Grammar, int]:
    """Parse a ``GBC1`` container; returns ``(grammar, original_length)``."""
    if data[:4] != MAGIC:
        raise DecodeError("bad magic")
    if len(data) < 5 or data[4] != 1:
        raise DecodeError("unsupported alphabet flag")
    digits = memoryview(data)[5:].tolist()
    length, used = _BYTE_CODE.decode(digits, 0)
    values = []
    pos = used
    while pos < len(digits):
        v, used = _BYTE_CODE.decode(digits, pos)
        values.append(v)
        pos += used
        if v == 257:
            break
    if pos != len(digits):
        raise DecodeError("trailing bytes after terminator")
    G = ints_to_grammar(values, 256)
    return G, length
