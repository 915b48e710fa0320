import random

import pytest
from hypothesis import strategies as st

from gramlab.grammar import Grammar, nt

SONG = b"Good morning to you, Good morning to you, Good morning, dear children, Good morning to all."


def song_grammar() -> Grammar:
    b = lambda s: list(s.encode())  # noqa: E731
    return Grammar(
        [
            [nt(2), nt(2), nt(4), nt(5)] + b("dear children") + [nt(5), nt(3)] + b("all."),
            [nt(3)] + b("you") + [nt(5)],
            [nt(4)] + b(" to "),
            b("Good morning"),
            b(", "),
        ],
        256,
    )


def random_grammar(rng: random.Random, dx: int = 2, max_rules: int = 5, max_body: int = 5,
                   flat: bool = False, strict: bool = True, max_len: int = 200) -> Grammar:
    """Random admissible grammar with expansion length at most ``max_len``."""
    while True:
        n = rng.randint(1, max_rules)
        rules = [None] * n
        lens = [0] * (n + 2)
        for i in range(n, 0, -1):
            lo = 0 if (i == 1 or not strict) else 1
            size = rng.randint(lo, max_body)
            body = []
            for _ in range(size):
                allow_nt = i < n and (i == 1 or not flat)
                if allow_nt and rng.random() < 0.4:
                    j = rng.randint(i + 1, n)
                    body.append(nt(j))
                else:
                    body.append(rng.randrange(dx))
            rules[i - 1] = body
            lens[i] = sum(1 if s >= 0 else lens[-s] for s in body)
        if lens[1] <= max_len:
            return Grammar(rules, dx)


@st.composite
def grammars(draw, dx=st.integers(1, 4), max_rules=5, flat=False, strict=True):
    seed = draw(st.integers(0, 2**32 - 1))
    d = draw(dx) if not isinstance(dx, int) else dx
    return random_grammar(random.Random(seed), d, max_rules, flat=flat, strict=strict)


@pytest.fixture
def song():
    return song_grammar()


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    """Record one checked part of an acceptance criterion and print its line."""
    ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p[0] for p in parts)
        detail = "; ".join(d if len(parts) == 1 else f"[{'ok' if o else 'FAIL'}] {d}" for o, d in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
