"""``gramlab`` command line.

Exit status: 0 on success, 1 for usage errors (bad flags, bad config,
unknown preset), 2 for data errors (I/O, empty input, malformed container).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import longest_repeat
from .coder import DecodeError, IntCode, code_length, pack_container, unpack_container
from .experiments import PRESETS, RunConfig, parse_transform, report, run_experiment, write_outputs
from .grammar import expand, voc
from .processes import SantaFeParams, sample_santafe, sample_ternary
from .transforms import word_vocab


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- flag parsing -----------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated list of integers: {text!r}") from None


def _seeds(text: str) -> list[int]:
    vals = _int_list(text)
    if "," not in text and len(vals) == 1:
        if vals[0] < 1:
            raise UsageError("seed count must be >= 1")
        return list(range(vals[0]))
    return vals


_CONFIG_KEYS = {"beta", "delta", "n-grid", "seeds", "transform", "dy", "out"}


def read_config(path: Path) -> dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_config(args) -> RunConfig:
    conf = read_config(args.config) if getattr(args, "config", None) else {}

    def pick(flag, key):
        v = getattr(args, flag, None)
        return v if v is not None else conf.get(key)

    cfg = RunConfig()
    try:
        if (v := pick("beta", "beta")) is not None:
            cfg.beta = float(v)
        if (v := pick("delta", "delta")) is not None:
            cfg.delta = float(v)
        if (v := pick("n_grid", "n-grid")) is not None:
            cfg.n_grid = _int_list(v)
        if (v := pick("seeds", "seeds")) is not None:
            cfg.seeds = _seeds(v)
        if (v := pick("transform", "transform")) is not None:
            cfg.transform = v
        if (v := pick("dy", "dy")) is not None:
            cfg.dy = int(v)
        if (v := pick("out", "out")) is not None:
            cfg.out = Path(v)
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# --- subcommands ------------------------------------------------------------


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def cmd_compress(args) -> int:
    data = _read_bytes(args.input)
    if not data:
        raise DataError("input empty")
    try:
        spec = parse_transform(args.transform or "greedy", 256)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    w = np.frombuffer(data, dtype=np.uint8)
    if spec.method == "exhaustive" and len(w) > spec.max_len:
        raise DataError(f"exhaustive transform handles at most {spec.max_len} bytes")
    G = spec.apply(w, 256)
    blob = pack_container(G, len(data))
    out = Path(args.output) if args.output else Path(str(args.input) + ".gbc")
    try:
        out.write_bytes(blob)
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc}") from None
    print(
        f"voc={voc(G)} code_bytes={code_length(G, IntCode(256))} file_bytes={len(blob)} "
        f"longest_repeat={longest_repeat(data)} ratio={len(blob) / len(data):.6f}"
    )
    return 0


def cmd_decompress(args) -> int:
    blob = _read_bytes(args.input)
    try:
        G, length = unpack_container(blob)
    except DecodeError as exc:
        raise DataError(f"malformed container: {exc}") from None
    data = bytes(expand(G))
    if len(data) != length:
        raise DataError(f"length mismatch: header says {length}, grammar expands to {len(data)}")
    if args.output:
        out = Path(args.output)
    else:
        name = str(args.input)
        out = Path(name[:-4] if name.endswith(".gbc") else name + ".out")
    try:
        out.write_bytes(data)
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc}") from None
    return 0


def _show(expansion) -> str:
    s = bytes(expansion).decode("latin-1")
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def cmd_vocab(args) -> int:
    data = _read_bytes(args.corpus)
    if not data:
        raise DataError("input empty")
    entries = word_vocab(np.frombuffer(data, dtype=np.uint8), 256, IntCode(args.dy or 2))
    lines = [f"{_show(e)}\t{c}\t{g}" for e, c, g in entries]
    text = "".join(line + "\n" for line in lines)
    if args.out:
        Path(args.out).write_text(text, encoding="latin-1")
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    cfg = build_config(args)
    grid = cfg.n_grid or [1000]
    seeds = cfg.seeds if cfg.seeds is not None else [0]
    chunks = []
    for n in grid:
        for seed in seeds:
            params = SantaFeParams(cfg.beta, seed)
            if args.kind == "ternary":
                try:
                    body = sample_ternary(params, n).text() + "\n"
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
            else:
                s = sample_santafe(params, n)
                body = "".join(f"{k} {z}\n" for k, z in s.pairs())
            chunks.append((f"{args.kind}_beta{cfg.beta:g}_n{n}_seed{seed}.txt", body))
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        for name, body in chunks:
            (cfg.out / name).write_text(body)
    else:
        for _, body in chunks:
            sys.stdout.write(body)
    return 0


def cmd_experiment(args) -> int:
    if args.name not in PRESETS:
        raise UsageError(f"unknown experiment {args.name!r}; choose from {', '.join(sorted(PRESETS))}")
    cfg = build_config(args)
    records, curves, fits = run_experiment(args.name, cfg)
    for p in write_outputs(args.name, cfg.out or Path("."), records, curves, fits):
        print(p)
    for f in fits:
        print(f"{f.experiment} {f.quantity}: exponent={f.exponent:.6g} r2={f.r2:.4g}")
    return 0


def cmd_report(args) -> int:
    out = Path(args.out) if args.out else Path(".")
    try:
        paths = report([Path(p) for p in args.csv], out)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(str(exc)) from None
    for p in paths:
        print(p)
    return 0


# --- parser -----------------------------------------------------------------


def _add_run_flags(p, experiment: bool = True):
    p.add_argument("--beta", help="zeta exponent parameter beta in (0, 1)")
    p.add_argument("--delta", help="prediction probability threshold in (1/2, 1)")
    p.add_argument("--n-grid", dest="n_grid", help="comma-separated sample lengths")
    p.add_argument("--seeds", help="seed count, or comma-separated seed list")
    if experiment:
        p.add_argument("--transform", help="exhaustive | greedy | kblock:K")
        p.add_argument("--dy", help="output radix of the integer code")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="key=value config file; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gramlab", description="Grammar-based coding laboratory.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compress", help="compress a file into a GBC1 container")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--transform", help="greedy (default) | exhaustive | kblock:K")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="restore the original bytes of a GBC1 container")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("vocab", help="rank the rules found by the greedy transform (TSV)")
    p.add_argument("corpus")
    p.add_argument("--dy", type=int, help="output radix of the integer code (default 2)")
    p.add_argument("--out", help="write TSV here instead of stdout")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("simulate", help="write Santa Fe or ternary samples")
    p.add_argument("--kind", choices=("santafe", "ternary"), default="santafe")
    _add_run_flags(p, experiment=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a preset and write CSVs")
    p.add_argument("name", help=", ".join(sorted(PRESETS)))
    _add_run_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="fit CSV series and render SVG plots")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors; report the status instead
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gramlab: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"gramlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
