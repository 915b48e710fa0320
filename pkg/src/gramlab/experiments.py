"""Experiment presets, a synthetic word corpus, and SVG/CSV reports.

Each preset returns ``(records, curves, fits)``: per-cell
:class:`~gramlab.analysis.ExperimentRecord` rows, derived
:class:`~gramlab.analysis.CurvePoint` series and
:class:`~gramlab.analysis.FitRecord` power-law summaries.  Everything is
sorted before it is written so output is byte-identical across runs.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .analysis import (
    CURVE_HEADER,
    RECORD_HEADER,
    CurvePoint,
    ExperimentRecord,
    FitRecord,
    longest_repeat,
    plugin_block_entropy,
    powerlaw_fit,
    read_csv,
    s_stat,
    t_stat,
    write_csv,
)
from .coder import IntCode, code_length
from .grammar import FLAT, voc
from .processes import (
    SantaFeParams,
    analytic_entropy_curves,
    binary_entropy,
    entropy_of_k,
    expected_distinct,
    h_upper_diag,
    sample_ternary,
    u_card_exact,
    u_card_lower_bound,
)
from .rng import Stream, derive_key
from .transforms import Objective, TransformSpec, k_of_n, kblock_transform

__all__ = [
    "RunConfig",
    "PRESETS",
    "run_experiment",
    "write_outputs",
    "parse_transform",
    "zipf_text",
    "bernoulli_bits",
    "render_svg",
    "report",
]


@dataclass
class RunConfig:
    beta: float = 0.8
    delta: float = 0.75
    n_grid: list[int] | None = None
    seeds: list[int] | None = None
    transform: str = "greedy"
    dy: int = 2
    out: Path | None = None

    def validate(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.5 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (1/2, 1), got {self.delta}")
        if self.n_grid is not None and any(n < 1 for n in self.n_grid):
            raise ValueError("every n must be >= 1")
        if self.dy < 2:
            raise ValueError("dy must be >= 2")
        parse_transform(self.transform, self.dy)


def parse_transform(text: str, dy: int) -> TransformSpec:
    """``exhaustive``, ``greedy`` or ``kblock:K`` with the code-length objective."""
    obj = Objective.code_length(IntCode(dy))
    if text == "greedy":
        return TransformSpec(FLAT, obj, "greedy")
    if text == "exhaustive":
        return TransformSpec(FLAT, obj, "exhaustive")
    if text.startswith("kblock:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad block length in {text!r}") from None
        return TransformSpec(FLAT, obj, "kblock", k=k)
    raise ValueError(f"unknown transform {text!r}")


# --- sources ----------------------------------------------------------------


def zipf_text(n_bytes: int, seed: int = 0, vocabulary: int = 5000, exponent: float = 1.1) -> bytes:
    """Deterministic text of Zipf-distributed random words, ``n_bytes`` long."""
    rng = np.random.default_rng(seed)
    letters = np.frombuffer(b"etaoinshrdlcumwfgypbvkjxqz", dtype=np.uint8)
    freq = 1.0 / np.arange(1, 27) ** 0.9
    freq /= freq.sum()
    lengths = rng.geometric(0.25, size=vocabulary).clip(1, 14)
    words = [bytes(rng.choice(letters, size=L, p=freq)) for L in lengths]
    w = 1.0 / np.arange(1, vocabulary + 1) ** exponent
    w /= w.sum()
    out = bytearray()
    while len(out) < n_bytes:
        idx = rng.choice(vocabulary, size=4096, p=w)
        punct = rng.random(4096)
        for i, q in zip(idx.tolist(), punct.tolist()):
            out += words[i]
            out += b".\n" if q < 0.03 else (b", " if q < 0.08 else b" ")
    return bytes(out[:n_bytes])


def bernoulli_bits(n: int, p: float, seed: int) -> np.ndarray:
    u = Stream(derive_key(seed, 11)).uniform(n)
    return (u <= p).astype(np.int64)


# --- presets ----------------------------------------------------------------


def _seeds(cfg: RunConfig, default: int) -> list[int]:
    return cfg.seeds if cfg.seeds is not None else list(range(default))


def _grid(cfg: RunConfig, default) -> list[int]:
    return cfg.n_grid if cfg.n_grid is not None else list(default)


def _log_grid(lo: float, hi: float, per_decade: int) -> list[int]:
    k = int(round(math.log10(hi / lo) * per_decade))
    return sorted({int(round(x)) for x in np.logspace(math.log10(lo), math.log10(hi), k + 1)})


def _fit(experiment: str, quantity: str, ns, ys) -> FitRecord | None:
    pts = [(n, y) for n, y in zip(ns, ys) if n > 1 and y > 0]
    if len({n for n, _ in pts}) < 3:
        return None
    f = powerlaw_fit(pts)
    return FitRecord(experiment, quantity, f.exponent, f.intercept, f.r_squared, f.n_min, f.n_max)


def exp_vocab_scaling(cfg: RunConfig):
    """Vocabulary of the transform on ternary samples versus ``n``."""
    grid = _grid(cfg, [1000, 3162, 10000, 31623, 100000])
    seeds = _seeds(cfg, 10)
    spec = parse_transform(cfg.transform, cfg.dy)
    code = IntCode(cfg.dy)
    records = []
    for n in grid:
        for seed in seeds:
            x = sample_ternary(SantaFeParams(cfg.beta, seed), n).symbols
            G = spec.apply(x, 3)
            V = voc(G)
            L = longest_repeat(x)
            records.append(ExperimentRecord(
                "vocab-scaling", cfg.beta, None, n, seed, V, code_length(G, code), L, None,
                s_stat(V, n, cfg.beta), t_stat(L, n)))
    curves, fits = [], []
    by_n = _group(records, lambda r: r.voc)
    ns = sorted(by_n)
    means = [float(np.mean(by_n[n])) for n in ns]
    s2 = _group(records, lambda r: r.s_n ** 2 if r.s_n is not None else None)
    for n, m in zip(ns, means):
        curves.append(CurvePoint("vocab-scaling", "mean_voc", float(n), m))
        if n in s2:
            curves.append(CurvePoint("vocab-scaling", "mean_s_n_sq", float(n), float(np.mean(s2[n]))))
    fits.append(_fit("vocab-scaling", "mean_voc", ns, means))
    return records, curves, fits


def exp_hilberg(cfg: RunConfig):
    """Analytic excess entropy of the uncoded process, plus plug-in checks."""
    grid = _grid(cfg, _log_grid(100, 100000, 4))
    seeds = _seeds(cfg, 4)
    params = SantaFeParams(cfg.beta)
    hk = entropy_of_k(params)
    records, curves = [], []
    for n in grid:
        H, d, E = analytic_entropy_curves(params, n)
        d2 = expected_distinct(2 * n, params)
        u = u_card_exact(n, cfg.delta, params)
        records.append(ExperimentRecord("hilberg", cfg.beta, cfg.delta, n, None, u_card=u))
        curves += [
            CurvePoint("hilberg", "excess_distinct", float(n), 2.0 * d - d2),
            CurvePoint("hilberg", "excess_entropy", float(n), E),
            CurvePoint("hilberg", "block_entropy", float(n), H),
            CurvePoint("hilberg", "h_u", float(n), h_upper_diag(n, cfg.delta, params, hk)),
            CurvePoint("hilberg", "expected_distinct", float(n), d),
        ]
    samples = [sample_ternary(SantaFeParams(cfg.beta, s), 20000).symbols for s in seeds]
    for m in (1, 2, 3):
        curves.append(CurvePoint("hilberg", "plugin_block_entropy", float(m), plugin_block_entropy(samples, m)))
    ex = [c for c in curves if c.quantity == "excess_distinct"]
    fits = [_fit("hilberg", "excess_distinct", [c.n for c in ex], [c.value for c in ex])]
    return records, curves, fits


def exp_ucard(cfg: RunConfig):
    """Exact ``card U_delta(n)`` against its closed-form lower bound."""
    grid = _grid(cfg, _log_grid(10, 1_000_000, 4))
    params = SantaFeParams(cfg.beta)
    records, curves = [], []
    for n in grid:
        u = u_card_exact(n, cfg.delta, params)
        records.append(ExperimentRecord("ucard", cfg.beta, cfg.delta, n, None, u_card=u))
        curves.append(CurvePoint("ucard", "lower_bound", float(n), u_card_lower_bound(n, cfg.delta, params)))
    fit_ns = [r.n for r in records if r.n >= 100]
    fits = [_fit("ucard", "u_card", fit_ns, [r.u_card for r in records if r.n >= 100])]
    return records, curves, fits


def exp_repeat(cfg: RunConfig):
    """Longest repeat of ternary samples relative to ``log n``."""
    grid = _grid(cfg, [1000, 10000, 100000])
    seeds = _seeds(cfg, 50)
    records = []
    for n in grid:
        for seed in seeds:
            x = sample_ternary(SantaFeParams(cfg.beta, seed), n).symbols
            L = longest_repeat(x)
            records.append(ExperimentRecord("repeat", cfg.beta, None, n, seed, longest_repeat=L, t_n=t_stat(L, n)))
    stat = _group(records, lambda r: (r.longest_repeat / math.log(r.n)) ** 2)
    ns = sorted(stat)
    vals = [float(np.mean(stat[n])) for n in ns]
    curves = [CurvePoint("repeat", "mean_l_over_log_n_sq", float(n), v) for n, v in zip(ns, vals)]
    fits = [_fit("repeat", "mean_l_over_log_n_sq", ns, vals)]
    return records, curves, fits


def exp_universality(cfg: RunConfig):
    """k-block code rate on IID uniform and p = 0.2 bits, k from ``k_of_n``."""
    grid = _grid(cfg, [1000, 10000, 100000])
    seeds = _seeds(cfg, 1)
    code = IntCode(cfg.dy)
    records, curves = [], []
    for name, p in (("universality-uniform", 0.5), ("universality-biased", 0.2)):
        h = binary_entropy(p)
        for n in grid:
            k = max(1, k_of_n(n, h, 0.1))
            rates = []
            for seed in seeds:
                x = bernoulli_bits(n, p, seed)
                G = kblock_transform(x, k, 2)
                digits = code_length(G, code)
                rates.append(digits * math.log(cfg.dy) / n)
                records.append(ExperimentRecord(name, None, None, n, seed, voc(G), digits, None, None, None, None))
            curves.append(CurvePoint(name, "rate", float(n), float(np.mean(rates))))
            curves.append(CurvePoint(name, "entropy", float(n), h))
            curves.append(CurvePoint(name, "k", float(n), float(k)))
    return records, curves, []


def exp_bernoulli(cfg: RunConfig):
    """Contrast: Bernoulli bits with a random parameter ``Y = sum_k Z_k 2**-k``.

    Fact ``k`` is predicted by the ``k``-th binary digit of the empirical
    frequency; the count of facts predicted with probability ``>= delta``
    grows only like ``log n``.
    """
    grid = _grid(cfg, [10, 100, 1000, 10000, 100000])
    seeds = _seeds(cfg, 200)
    K = 40
    records, curves = [], []
    for n in grid:
        hits = np.zeros(K)
        for seed in seeds:
            z = (Stream(derive_key(seed, 12)).raw(K) >> np.uint64(63)).astype(np.int64)
            y = float(np.sum(z * 0.5 ** np.arange(1, K + 1)))
            freq = bernoulli_bits(n, y, seed).mean()
            digits = np.floor(freq * 2.0 ** np.arange(1, K + 1)).astype(np.int64) % 2
            hits += digits == z
        u = int(np.sum(hits / len(seeds) >= cfg.delta))
        records.append(ExperimentRecord("bernoulli", None, cfg.delta, n, None, u_card=u))
        curves.append(CurvePoint("bernoulli", "u_card_over_log_n", float(n), u / math.log(n)))
    return records, curves, []


def _group(records, value: Callable) -> dict[int, list[float]]:
    out: dict[int, list[float]] = defaultdict(list)
    for r in records:
        v = value(r)
        if v is not None:
            out[r.n].append(v)
    return out


PRESETS = {
    "vocab-scaling": exp_vocab_scaling,
    "hilberg": exp_hilberg,
    "ucard": exp_ucard,
    "repeat": exp_repeat,
    "universality": exp_universality,
    "bernoulli": exp_bernoulli,
}


def run_experiment(name: str, cfg: RunConfig):
    if name not in PRESETS:
        raise KeyError(f"unknown experiment {name!r}; choose from {', '.join(sorted(PRESETS))}")
    cfg.validate()
    records, curves, fits = PRESETS[name](cfg)
    records = sorted(records, key=ExperimentRecord.sort_key)
    curves = sorted(curves, key=lambda c: (c.experiment, c.quantity, c.n))
    fits = sorted((f for f in fits if f is not None), key=lambda f: (f.experiment, f.quantity))
    return records, curves, fits


def write_outputs(name: str, out: Path, records, curves, fits) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for suffix, rows in (("", records), ("_curves", curves), ("_fits", fits)):
        if rows:
            p = out / f"{name}{suffix}.csv"
            write_csv(p, rows)
            paths.append(p)
    return paths


# --- report -----------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(title: str, ns, ys, fit: FitRecord | None, width: int = 480, height: int = 360) -> str:
    """Standalone log-log scatter with the fitted line and its exponent."""
    x = np.log10(np.asarray(ns, dtype=float))
    y = np.log10(np.asarray(ys, dtype=float))
    pad_l, pad_r, pad_t, pad_b = 60, 20, 40, 60
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return pad_l + (v - x0) / (x1 - x0) * (width - pad_l - pad_r)

    def py(v):
        return height - pad_b - (v - y0) / (y1 - y0) * (height - pad_t - pad_b)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{_escape(title)}</text>',
        f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" y2="{height - pad_b}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" stroke="black"/>',
        f'<text x="{(pad_l + width - pad_r) / 2:.1f}" y="{height - pad_b + 30}" text-anchor="middle">log10 n</text>',
        f'<text x="15" y="{(pad_t + height - pad_b) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {(pad_t + height - pad_b) / 2:.1f})">log10 value</text>',
    ]
    for v, lab in ((x0, _fmt(x0)), (x1, _fmt(x1))):
        parts.append(f'<text x="{px(v):.2f}" y="{height - pad_b + 15}" text-anchor="middle">{lab}</text>')
    for v, lab in ((y0, _fmt(y0)), (y1, _fmt(y1))):
        parts.append(f'<text x="{pad_l - 5}" y="{py(v) + 4:.2f}" text-anchor="end">{lab}</text>')
    for a, b in zip(x, y):
        parts.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="steelblue"/>')
    if fit is not None:
        ln10 = math.log(10.0)
        # fit is in natural logs: ln y = c + e ln n
        ya = (fit.intercept + fit.exponent * x0 * ln10) / ln10
        yb = (fit.intercept + fit.exponent * x1 * ln10) / ln10
        parts.append(
            f'<line x1="{px(x0):.2f}" y1="{py(ya):.2f}" x2="{px(x1):.2f}" y2="{py(yb):.2f}" '
            'stroke="firebrick" stroke-dasharray="4 3"/>'
        )
        caption = f"exponent={fit.exponent:.12g} r2={fit.r2:.6g}"
    else:
        caption = "no fit (fewer than 3 usable points)"
    parts.append(f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">{caption}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


_RECORD_QUANTITIES = ("voc", "code_digits", "longest_repeat", "u_card")


def _series_from_csv(path: Path):
    with open(path) as fh:
        header = fh.readline().strip()
    series: dict[tuple[str, str], dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    if header == RECORD_HEADER:
        for r in read_csv(path, ExperimentRecord):
            for q in _RECORD_QUANTITIES:
                v = getattr(r, q)
                if v is not None:
                    series[(r.experiment, q)][float(r.n)].append(float(v))
    elif header == CURVE_HEADER:
        for c in read_csv(path, CurvePoint):
            series[(c.experiment, c.quantity)][c.n].append(c.value)
    else:
        raise ValueError(f"{path}: not a record or curve CSV")
    return series


def report(paths: list[Path], out: Path) -> list[Path]:
    """Fit every (experiment, quantity) series of the CSVs; write SVGs and a fit table."""
    out.mkdir(parents=True, exist_ok=True)
    fits: list[FitRecord] = []
    written = []
    for path in paths:
        series = _series_from_csv(Path(path))
        for (exp, q), by_n in sorted(series.items()):
            ns = sorted(by_n)
            ys = [float(np.mean(by_n[n])) for n in ns]
            keep = [(n, y) for n, y in zip(ns, ys) if n > 0 and y > 0]
            if not keep:
                continue
            fit = _fit(exp, q, [k[0] for k in keep], [k[1] for k in keep])
            if fit is not None:
                fits.append(fit)
            svg = render_svg(f"{exp}: {q}", [k[0] for k in keep], [k[1] for k in keep], fit)
            p = out / f"{exp}_{q}.svg"
            p.write_text(svg)
            written.append(p)
    if fits:
        p = out / "report_fits.csv"
        write_csv(p, sorted(fits, key=lambda f: (f.experiment, f.quantity)))
        written.append(p)
    return written
