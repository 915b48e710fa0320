"""Measurements, fits, inequality audits and the CSV record formats."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .coder import IntCode, W, code_length
from .grammar import Grammar, voc, yk_length
from .ops import secondary_part
from .processes import binary_entropy

__all__ = [
    "longest_repeat",
    "excess_sequence",
    "FitResult",
    "powerlaw_fit",
    "plugin_block_entropy",
    "binary_entropy",
    "h_u_curve",
    "Check",
    "AuditReport",
    "audit_inequalities",
    "s_stat",
    "t_stat",
    "ExperimentRecord",
    "FitRecord",
    "CurvePoint",
    "RECORD_HEADER",
    "FIT_HEADER",
    "CURVE_HEADER",
    "write_csv",
    "read_csv",
]


def longest_repeat(w) -> int:
    """Length of the longest substring occurring at two distinct positions."""
    return kernels.longest_repeat(w)


def excess_sequence(G: Mapping[int, float] | Callable[[int], float], ns: Iterable[int]) -> dict[int, float]:
    """``F(n) = 2 G(n) - G(2n)`` on the grid ``ns``.

    ``G`` is a mapping or a callable.  A mapping must contain both ``n`` and
    ``2n``; otherwise :class:`KeyError` names the missing index.
    """
    out = {}
    for n in ns:
        if callable(G):
            a, b = G(n), G(2 * n)
        else:
            for m in (n, 2 * n):
                if m not in G:
                    raise KeyError(f"G undefined at n={m}")
            a, b = G[n], G[2 * n]
        out[n] = 2.0 * a - b
    return out


@dataclass(frozen=True)
class FitResult:
    exponent: float
    intercept: float
    r_squared: float
    n_min: float
    n_max: float

    def predict(self, n):
        return np.exp(self.intercept) * np.asarray(n, dtype=float) ** self.exponent


def powerlaw_fit(ns: Sequence[float], ys: Sequence[float] | None = None) -> FitResult:
    """Least squares line through ``(log n, log y)``.

    Accepts either two sequences or a single sequence of ``(n, y)`` pairs.
    ``r_squared`` is 1 when ``y`` is constant.
    """
    if ys is None:
        pts = list(ns)
        ns = [p[0] for p in pts]
        ys = [p[1] for p in pts]
    x = np.asarray(ns, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("need at least 3 points")
    if np.any(y <= 0) or np.any(x <= 1):
        raise ValueError("power-law fit needs y > 0 and n > 1")
    lx, ly = np.log(x), np.log(y)
    xm, ym = lx.mean(), ly.mean()
    sxx = np.sum((lx - xm) ** 2)
    if sxx == 0:
        raise ValueError("need at least two distinct n")
    slope = float(np.sum((lx - xm) * (ly - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_tot = float(np.sum((ly - ym) ** 2))
    ss_res = float(np.sum((ly - intercept - slope * lx) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(slope, intercept, r2, float(x.min()), float(x.max()))


def plugin_block_entropy(samples: Iterable, n: int, min_obs: int = 10_000) -> float:
    """Plug-in entropy (nats) of ``n``-blocks pooled over samples and positions.

    Biased downwards; meant for ``n <= 4`` only.
    """
    if not 1 <= n <= 4:
        raise ValueError("plug-in block entropy is restricted to 1 <= n <= 4")
    arrays = []
    for s in samples:
        if isinstance(s, str):
            a = np.fromiter(map(ord, s), dtype=np.int64, count=len(s))
        else:
            a = np.asarray(s, dtype=np.int64).reshape(-1)
        if len(a) >= n:
            arrays.append(a)
    total = sum(len(a) - n + 1 for a in arrays)
    if total < min_obs:
        raise ValueError(f"only {total} block observations, need {min_obs}")
    base = max(int(a.max()) for a in arrays) + 1
    counts: Counter = Counter()
    for a in arrays:
        m = len(a) - n + 1
        key = np.zeros(m, dtype=np.int64)
        for i in range(n):
            key = key * base + a[i:i + m]
        u, c = np.unique(key, return_counts=True)
        counts.update(dict(zip(u.tolist(), c.tolist())))
    p = np.array(list(counts.values()), dtype=float) / total
    return float(-np.sum(p * np.log(p)))


def h_u_curve(ns: Sequence[int], h: float, delta: float, u_cards: Sequence[int]) -> np.ndarray:
    """``h n + (log 2 - eta(delta)) card U`` pointwise."""
    ns = np.asarray(ns, dtype=float)
    u = np.asarray(u_cards, dtype=float)
    return h * ns + (math.log(2.0) - binary_entropy(delta)) * u


# --- inequality audit -------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass
class AuditReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def violations(self) -> list[Check]:
        return [c for c in self.checks if not c.holds]

    def select(self, prefix: str) -> "AuditReport":
        return AuditReport([c for c in self.checks if c.name.startswith(prefix)])

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def audit_inequalities(
    u: Sequence[int],
    v: Sequence[int],
    Gu: Grammar,
    Gv: Grammar,
    Guv: Grammar,
    code: IntCode | None = None,
    strict: bool = False,
) -> AuditReport:
    """Subadditivity bounds for the grammars of ``u``, ``v`` and ``uv``.

    Checks named ``yk.*`` compare Yang-Kieffer lengths::

        0 <= |G(u)| + |G(v)| - |G(uv)| <= voc(G(uv)) L(uv)

    With ``code`` given, checks named ``code.*`` compare encoded lengths
    ``C(.)`` with ``W_m`` from the same code::

        C(u), C(v) <= C(uv) + W_0 L
        C(u) + C(v) - C(uv) <= |B(S G(uv))| + W_0 L <= W_0 voc (1 + L)
        C(u) + C(v) - C(uv) >= -3 W_0 - W_{voc(G(u))}

    ``strict=True`` raises :class:`AssertionError` on any violation; use it
    only for grammars that are minimal under the matching objective.
    """
    uv = list(u) + list(v)
    L = longest_repeat(uv)
    n_uv = voc(Guv)
    checks = []
    excess = yk_length(Gu) + yk_length(Gv) - yk_length(Guv)
    checks.append(Check("yk.lower", 0, excess))
    checks.append(Check("yk.upper", excess, n_uv * L))
    if code is not None:
        dx = Guv.alphabet_size
        w0 = W(0, dx, code)
        cu, cv, cuv = code_length(Gu, code), code_length(Gv, code), code_length(Guv, code)
        sec = code_length(secondary_part(Guv), code)
        ex = cu + cv - cuv
        checks.append(Check("code.i.u", cu, cuv + w0 * L))
        checks.append(Check("code.i.v", cv, cuv + w0 * L))
        checks.append(Check("code.ii.excess", ex, sec + w0 * L))
        checks.append(Check("code.ii.secondary", sec + w0 * L, w0 * n_uv * (1 + L)))
        checks.append(Check("code.iii", -3 * w0 - W(voc(Gu), dx, code), ex))
    report = AuditReport(checks)
    if strict and not report.ok:
        raise AssertionError(f"inequality violations: {report.violations()}")
    return report


# --- records ----------------------------------------------------------------


def s_stat(voc_value: float, n: int, beta: float) -> float | None:
    """``S_n = V n**-beta log n`` (``None`` below ``n = 2``)."""
    if n < 2:
        return None
    return voc_value * n ** (-beta) * math.log(n)


def t_stat(L: float, n: int) -> float | None:
    """``T_n = (1 + L) / log n`` (``None`` below ``n = 2``)."""
    if n < 2:
        return None
    return (1.0 + L) / math.log(n)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _Row:
    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_row(self) -> list[str]:
        return [_fmt(v) for v in astuple(self)]

    @classmethod
    def from_row(cls, row: Mapping[str, str]):
        kwargs = {}
        for f in fields(cls):
            raw = row[f.name]
            if raw == "":
                kwargs[f.name] = None
            elif f.type in ("int", "int | None"):
                kwargs[f.name] = int(raw)
            elif f.type in ("float", "float | None"):
                kwargs[f.name] = float(raw)
            else:
                kwargs[f.name] = raw
        return cls(**kwargs)


@dataclass(frozen=True)
class ExperimentRecord(_Row):
    """One measured cell; optional quantities are ``None`` (empty in CSV)."""

    experiment: str
    beta: float | None
    delta: float | None
    n: int
    seed: int | None
    voc: int | None = None
    code_digits: int | None = None
    longest_repeat: int | None = None
    u_card: int | None = None
    s_n: float | None = None
    t_n: float | None = None

    def sort_key(self):
        return (self.experiment, self.beta or 0.0, self.delta or 0.0, self.n, -1 if self.seed is None else self.seed)


@dataclass(frozen=True)
class FitRecord(_Row):
    experiment: str
    quantity: str
    exponent: float
    intercept: float
    r2: float
    n_min: float
    n_max: float


@dataclass(frozen=True)
class CurvePoint(_Row):
    experiment: str
    quantity: str
    n: float
    value: float


RECORD_HEADER = ",".join(ExperimentRecord.header())
FIT_HEADER = ",".join(FitRecord.header())
CURVE_HEADER = ",".join(CurvePoint.header())


def write_csv(path, rows: Sequence[_Row]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    cls = type(rows[0])
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(cls.header())
        for r in rows:
            wr.writerow(r.to_row())


def read_csv(path, cls=ExperimentRecord) -> list:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != cls.header():
            raise ValueError(f"unexpected header {rd.fieldnames}")
        return [cls.from_row(row) for row in rd]
