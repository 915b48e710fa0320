"""The Santa Fe process and its ternary stationary coding.

The uncoded process emits statements ``X_i = (K_i, Z_{K_i})`` where the
addresses ``K_i`` are IID zeta-distributed, ``P(K = k) = k**(-1/beta) /
zeta(1/beta)``, and the facts ``Z_k`` are fair bits fixed once per
realisation.  The ternary process writes each statement as
``b(k) z 2`` where ``1 b(k)`` is the binary expansion of ``k``.

Addresses are carried as ``float64``.  Every sampled value is an integer;
above ``2**53`` only representable integers are produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .rng import GOLDEN, Stream, derive_key, mix64_array

__all__ = [
    "zeta",
    "zeta_tail",
    "binary_entropy",
    "SantaFeParams",
    "FactOracle",
    "SantaFeSample",
    "TernarySample",
    "sample_zeta",
    "sample_santafe",
    "code_symbol",
    "sample_ternary",
    "decode_statements",
    "predict_s",
    "predict_sbar",
    "u_card_exact",
    "u_card_lower_bound",
    "expected_distinct",
    "entropy_of_k",
    "analytic_entropy_curves",
    "expected_codeword_length",
    "h_upper_diag",
    "ZETA_CODING_THRESHOLD",
]

ZETA_CODING_THRESHOLD = 4.0
# float64 proposals stay finite for exponents 1/beta >= 1/0.95
MAX_SAMPLING_BETA = 0.95

_STREAM_K = 1
_STREAM_FACTS = 2
_STREAM_PHASE = 3

# B_2/2!, B_4/4!, B_6/6!, B_8/8!
_EM = (1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0)


def _rising(a: float, r: int) -> float:
    out = 1.0
    for i in range(r):
        out *= a + i
    return out


def _em_power_tail(a: float, m: float) -> float:
    """Euler-Maclaurin value of ``sum_{k >= m} k**-a`` for large ``m``."""
    total = m ** (1.0 - a) / (a - 1.0) + 0.5 * m ** (-a)
    for j, c in enumerate(_EM, start=1):
        r = 2 * j - 1
        # -c * f^{(r)}(m) with f^{(r)}(x) = (-1)^r (a)_r x^{-a-r}
        total += c * _rising(a, r) * m ** (-a - r)
    return total


def zeta_tail(a: float, m: float) -> float:
    """Hurwitz-type tail ``sum_{k >= m} k**-a`` for integer ``m >= 1``, ``a > 1``.

    Terms below ``64`` are summed directly; the rest uses Euler-Maclaurin
    with four correction terms (relative error far below ``1e-9``).
    """
    if a <= 1.0:
        raise ValueError(f"exponent must exceed 1, got {a}")
    cut = 64.0
    if m >= cut:
        return _em_power_tail(a, float(m))
    ks = np.arange(int(m), int(cut), dtype=np.float64)
    return float(np.sum(ks ** (-a))) + _em_power_tail(a, cut)


@lru_cache(maxsize=256)
def zeta(a: float) -> float:
    """Riemann zeta for real ``a > 1`` (truncation plus Euler-Maclaurin tail)."""
    return zeta_tail(float(a), 1)


def binary_entropy(p: float) -> float:
    """Entropy of ``(p, 1 - p)`` in nats, with ``0 log 0 = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability outside [0, 1]: {p}")
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            out -= q * math.log(q)
    return out


@dataclass(frozen=True)
class SantaFeParams:
    beta: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def exponent(self) -> float:
        return 1.0 / self.beta

    @property
    def zeta_value(self) -> float:
        return zeta(self.exponent)

    def pmf(self, k):
        return np.asarray(k, dtype=np.float64) ** (-self.exponent) / self.zeta_value

    def require_coding(self) -> None:
        """Finite energy of the ternary coding needs ``zeta(1/beta) > 4``."""
        if not self.zeta_value > ZETA_CODING_THRESHOLD:
            raise ValueError(
                f"ternary coding needs zeta(1/beta) > 4; beta={self.beta} gives {self.zeta_value:.6f}"
            )

    def with_seed(self, seed: int) -> "SantaFeParams":
        return SantaFeParams(self.beta, seed)


def _fact_keys(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    keys = np.empty(k.shape, dtype=np.uint64)
    small = k < 2.0**64
    keys[small] = k[small].astype(np.uint64)
    big = ~small
    keys[big] = k[big].view(np.uint64) ^ np.uint64(0xA5A5A5A5A5A5A5A5)
    return keys


class FactOracle:
    """The fact bits ``Z_k`` of one realisation, derived from its seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self.key = derive_key(seed, _STREAM_FACTS)

    def bits(self, k) -> np.ndarray:
        keys = _fact_keys(k)
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + keys * np.uint64(GOLDEN)
        return (mix64_array(z) >> np.uint64(63)).astype(np.uint8)

    def bit(self, k: int) -> int:
        return int(self.bits(np.array([float(k)]))[0])


@dataclass
class SantaFeSample:
    """Statements ``(k, z)``; ``k`` is a float64 array of integer values."""

    k: np.ndarray
    z: np.ndarray
    seed: int
    params: SantaFeParams

    def __len__(self) -> int:
        return len(self.k)

    def pairs(self):
        return list(zip((int(x) for x in self.k), self.z.tolist()))

    def is_consistent(self) -> bool:
        order = np.argsort(self.k, kind="stable")
        ks = self.k[order]
        zs = self.z[order]
        same = ks[1:] == ks[:-1]
        return bool(np.all(zs[1:][same] == zs[:-1][same]))


@dataclass
class TernarySample:
    symbols: np.ndarray
    seed: int
    params: SantaFeParams
    phase: int = field(default=0)

    def __len__(self) -> int:
        return len(self.symbols)

    def text(self) -> str:
        return (self.symbols + ord("0")).tobytes().decode("ascii")


def sample_zeta(stream: Stream, a: float, size: int) -> np.ndarray:
    """Exact zeta(a) variates by rejection from a continuous Pareto envelope.

    Devroye's algorithm: ``X = floor(U**(-1/(a-1)))``, accepted when
    ``V X (T - 1) / (b - 1) <= T / b`` with ``T = (1 + 1/X)**(a-1)`` and
    ``b = 2**(a-1)``.  Attempt ``t`` consumes draws ``2t`` and ``2t + 1``.
    """
    if a <= 1.0:
        raise ValueError("zeta exponent must exceed 1")
    if a < 1.0 / MAX_SAMPLING_BETA:
        raise ValueError(f"sampling supports beta <= {MAX_SAMPLING_BETA}")
    b = 2.0 ** (a - 1.0)
    out = np.empty(size, dtype=np.float64)
    filled = 0
    while filled < size:
        need = size - filled
        m = need + need // 2 + 16
        uv = stream.uniform(2 * m).reshape(m, 2)
        u, v = uv[:, 0], uv[:, 1]
        x = np.floor(np.exp(-np.log(u) / (a - 1.0)))
        t_minus_1 = np.expm1((a - 1.0) * np.log1p(1.0 / x))
        t = t_minus_1 + 1.0
        ok = v * x * t_minus_1 / (b - 1.0) <= t / b
        acc = x[ok]
        take = min(len(acc), need)
        out[filled:filled + take] = acc[:take]
        filled += take
    return out


def sample_santafe(params: SantaFeParams, n: int) -> SantaFeSample:
    """``n`` statements of the Santa Fe process for ``params.seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    stream = Stream(derive_key(params.seed, _STREAM_K))
    k = sample_zeta(stream, params.exponent, n)
    z = FactOracle(params.seed).bits(k)
    return SantaFeSample(k, z, params.seed, params)


def code_symbol(k: int, z: int) -> str:
    """Ternary codeword ``b(k) z 2`` of the statement ``(k, z)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return format(int(k), "b")[1:] + ("1" if z else "0") + "2"


def _dyadic_class_weights(a: float):
    """Length-biased law of ``j = floor(log2 K)``: weights ``(j + 2) P(j)``."""
    zt = zeta(a)
    weights = []
    j = 0
    tail_prev = zeta_tail(a, 1)
    while True:
        tail_next = zeta_tail(a, 2.0 ** (j + 1))
        pj = (tail_prev - tail_next) / zt
        weights.append((j + 2) * pj)
        tail_prev = tail_next
        j += 1
        # remaining mass of (j + 2) P(K >= 2^j) is below double precision
        if (j + 3) * tail_next / zt < 1e-17 or j > 1020:
            break
    w = np.asarray(weights)
    return w / w.sum()


def _length_biased_start(params: SantaFeParams, stream: Stream, facts: FactOracle) -> str:
    a = params.exponent
    cdf = np.cumsum(_dyadic_class_weights(a))
    j = int(np.searchsorted(cdf, stream.uniform1() * cdf[-1]))
    lo = 2.0**j
    while True:
        u, v = stream.uniform(2)
        k = math.floor(lo + (1.0 - u) * lo)
        if k >= 2 * lo:
            continue
        if v <= (k / lo) ** (-a):
            break
    z = facts.bit(k)
    word = code_symbol(k, z)
    phase = min(int(stream.uniform1() * len(word)), len(word) - 1)
    return word[phase:]


def sample_ternary(params: SantaFeParams, n: int) -> TernarySample:
    """``n`` symbols of an approximately stationary ternary coding.

    The first statement is drawn with probability proportional to its
    codeword length and entered at a uniform phase; the remaining
    statements are IID.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    params.require_coding()
    facts = FactOracle(params.seed)
    phase_stream = Stream(derive_key(params.seed, _STREAM_PHASE))
    k_stream = Stream(derive_key(params.seed, _STREAM_K))
    head = _length_biased_start(params, phase_stream, facts)
    parts = [head]
    have = len(head)
    mean_len = expected_codeword_length(params)
    while have < n:
        batch = int((n - have) / mean_len * 1.1) + 16
        ks = sample_zeta(k_stream, params.exponent, batch)
        zs = facts.bits(ks)
        for k, z in zip(ks.tolist(), zs.tolist()):
            w = format(int(k), "b")[1:] + ("12" if z else "02")
            parts.append(w)
            have += len(w)
            if have >= n:
                break
    text = "".join(parts)[:n]
    symbols = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
    return TernarySample(symbols.astype(np.uint8), params.seed, params, phase=len(head))


def decode_statements(symbols) -> list[tuple[int, int]]:
    """Statements of every complete codeword that follows a ``2``."""
    text = symbols if isinstance(symbols, str) else "".join(map(str, np.asarray(symbols).tolist()))
    pieces = text.split("2")
    out = []
    # pieces[0] precedes the first delimiter; the last piece is unterminated
    for piece in pieces[1:-1]:
        if not piece:
            continue
        out.append((int("1" + piece[:-1], 2), int(piece[-1])))
    return out


def predict_s(k: int, window) -> int:
    """Fact predictor on a window of statements: 0, 1, or 2 for undecided."""
    if isinstance(window, SantaFeSample):
        mask = window.k == float(k)
        seen = set(window.z[mask].tolist())
    else:
        seen = {z for kk, z in window if kk == k}
    if seen == {0}:
        return 0
    if seen == {1}:
        return 1
    return 2


def predict_sbar(k: int, window) -> int:
    """Fact predictor on a ternary window via the patterns ``2 b(k) z 2``."""
    text = window if isinstance(window, str) else "".join(map(str, np.asarray(window).tolist()))
    b = format(int(k), "b")[1:]
    has0 = ("2" + b + "02") in text
    has1 = ("2" + b + "12") in text
    if has0 and not has1:
        return 0
    if has1 and not has0:
        return 1
    return 2


def _check_delta(delta: float) -> None:
    if not 0.5 < delta < 1.0:
        raise ValueError(f"delta must lie in (1/2, 1), got {delta}")


def u_card_exact(n: int, delta: float, params: SantaFeParams) -> int:
    """``card U_delta(n)``: number of ``k`` with ``1 - (1 - p_k)**n >= delta``.

    Membership is ``p_k >= 1 - (1 - delta)**(1/n)``; ``p_k`` decreases in
    ``k`` so the count is the largest qualifying ``k``, found by bisection.
    """
    _check_delta(delta)
    if n < 1:
        raise ValueError("n must be >= 1")
    thresh = -math.expm1(math.log1p(-delta) / n)
    a = params.exponent
    zt = params.zeta_value

    def ok(k: int) -> bool:
        return k ** (-a) / zt >= thresh

    if not ok(1):
        return 0
    lo = 1
    hi = 2
    while ok(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def u_card_lower_bound(n: int, delta: float, params: SantaFeParams) -> float:
    """``[n / (-zeta(1/beta) log(1 - delta))]**beta``.

    Every ``k`` up to this value is in ``U_delta(n)``, so the count is at
    least its floor; the unrounded value itself is usually not reached.
    """
    _check_delta(delta)
    return (n / (-params.zeta_value * math.log1p(-delta))) ** params.beta


def _tail_start(n: float, params: SantaFeParams) -> int:
    a = params.exponent
    return max(1 << 16, int(math.ceil((10.0 * n / params.zeta_value) ** (1.0 / a))))


def expected_distinct(n: float, params: SantaFeParams) -> float:
    """``E[D_n] = sum_k 1 - (1 - p_k)**n``, the mean number of distinct addresses.

    Direct summation up to ``N`` (chosen so ``n p_N <= 0.1``), then
    Euler-Maclaurin.  The tail integral is ``n int p`` in closed form minus
    the fast-decaying remainder ``int (n p - f)`` by adaptive quadrature.
    """
    a = params.exponent
    zt = params.zeta_value
    N = _tail_start(n, params)
    ks = np.arange(1, N, dtype=np.float64)
    p = ks ** (-a) / zt
    head = float(np.sum(-np.expm1(n * np.log1p(-p))))

    def f(x):
        return -math.expm1(n * math.log1p(-(x ** (-a)) / zt))

    def fprime(x):
        px = x ** (-a) / zt
        return -n * (1.0 - px) ** (n - 1) * a * px / x

    def gap(t):
        # n p(x) - f(x) >= 0, decaying like x**(-2a); integrated in x = N e^t
        if t > 700.0:
            return 0.0
        x = N * math.exp(t)
        px = x ** (-a) / zt
        return (n * px + math.expm1(n * math.log1p(-px))) * x

    linear = n * N ** (1.0 - a) / ((a - 1.0) * zt)
    correction, _ = integrate.quad(gap, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=500)
    integral = linear - correction
    return head + integral + 0.5 * f(N) - fprime(N) / 12.0


def entropy_of_k(params: SantaFeParams) -> float:
    """``H(K)`` in nats."""
    a = params.exponent
    zt = params.zeta_value
    lz = math.log(zt)
    N = 1 << 16
    ks = np.arange(1, N, dtype=np.float64)
    p = ks ** (-a) / zt
    head = float(np.sum(p * (a * np.log(ks) + lz)))
    L = math.log(N)
    c = N ** (1.0 - a) / (a - 1.0)
    integral = (a * (c * L + c / (a - 1.0)) + lz * c) / zt
    g = N ** (-a) * (a * L + lz) / zt
    gprime = a * N ** (-a - 1.0) * (1.0 - a * L - lz) / zt
    return head + integral + 0.5 * g - gprime / 12.0


def analytic_entropy_curves(params: SantaFeParams, n: int):
    """Block entropy, mean distinct count and excess entropy of the uncoded process.

    Returns ``(H(n), E[D_n], E(n))`` with ``H(n) = n H(K) + log 2 E[D_n]``
    and ``E(n) = 2 H(n) - H(2n) = log 2 (2 E[D_n] - E[D_2n])``.
    """
    hk = entropy_of_k(params)
    d_n = expected_distinct(n, params)
    d_2n = expected_distinct(2 * n, params)
    H_n = n * hk + math.log(2.0) * d_n
    E_n = math.log(2.0) * (2.0 * d_n - d_2n)
    return H_n, d_n, E_n


def expected_codeword_length(params: SantaFeParams) -> float:
    """``E|f(K, Z)| = E floor(log2 K) + 2``, via ``sum_j P(K >= 2**j)``."""
    a = params.exponent
    zt = params.zeta_value
    total = 0.0
    j = 1
    while True:
        term = zeta_tail(a, 2.0**j) / zt
        total += term
        if term < 1e-16 * max(total, 1.0) or j > 1020:
            break
        j += 1
    return total + 2.0


def h_upper_diag(n: int, delta: float, params: SantaFeParams, h: float) -> float:
    """``h n + (log 2 - eta(delta)) card U_delta(n)``."""
    return h * n + (math.log(2.0) - binary_entropy(delta)) * u_card_exact(n, delta, params)
