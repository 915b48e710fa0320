"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--sizes 10000,100000] [--repeat 3]

Prints one line per (kernel, size, backend) with the best wall time and the
speed-up of the compiled backend.  Inputs are ternary Santa Fe samples,
the text the transforms spend most of their time on.
"""

import argparse
import time

import numpy as np

from gramlab import kernels
from gramlab.processes import SantaFeParams, sample_ternary


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(s, impl):
    sa = impl.suffix_array(s)
    lcp = impl.lcp_array(s, sa)
    _, lens, lbs, _ = kernels.repeat_intervals(s, 2, True, impl=impl)
    positions = np.sort(sa[lbs[0]:lbs[0] + 50]) if len(lbs) else np.zeros(0, dtype=np.int64)
    length = int(lens[0]) if len(lens) else 1
    covered = np.zeros(len(s), dtype=np.uint8)
    return {
        "suffix_array": lambda: impl.suffix_array(s),
        "lcp_array": lambda: impl.lcp_array(s, sa),
        "lcp_intervals": lambda: impl.lcp_intervals(s, sa, lcp, 2, True),
        "select_occurrences": lambda: impl.select_occurrences(positions, length, covered),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,100000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'kernel':<20}{'n':>9}  " + "".join(f"{name:>12}" for name in mods) + "     speed-up")
    for n in (int(x) for x in args.sizes.split(",")):
        s = kernels.as_ranks(sample_ternary(SantaFeParams(0.8, 0), n).symbols)
        timings = {name: {k: best_of(fn, args.repeat) for k, fn in cases(s, m).items()} for name, m in mods.items()}
        for kernel in timings["python"]:
            row = [timings[name][kernel] for name in mods]
            speed = f"{timings['python'][kernel] / timings['cython'][kernel]:8.1f}x" if "cython" in mods else ""
            print(f"{kernel:<20}{n:>9}  " + "".join(f"{t * 1e3:10.2f}ms" for t in row) + f"  {speed}")


if __name__ == "__main__":
    main()
