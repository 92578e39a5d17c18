"""Compare the compiled and pure-Python kernel backends.

Times the four kernel entry points on a representative third-order
channel response and checks that both backends return identical bits.
Run as ``python3 benchmarks/bench_kernels.py`` from the repository root
(requires the package to be installed).
"""

import argparse
import time

import numpy as np

from twintbank import _pykernels
from twintbank import twint

try:
    from twintbank import _ckernels
except ImportError:
    _ckernels = None

# Representative mid-band channel: 15k/90k/14k arms with 47n/10n/47n.
_H = twint.coefficients(
    twint.TwinTParams(15e3, 90e3, 14e3, 47e-9, 10e-9, 47e-9))
NUM = _H.num.coeffs
DEN = _H.den.coeffs


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _workloads(points, calls):
    grid = np.geomspace(2.0 * np.pi * 10.0, 2.0 * np.pi * 10e3, points)
    single = grid[points // 2]
    return [
        (f"eval_rational ({points} pts)",
         lambda k: k.eval_rational(NUM, DEN, grid)),
        (f"abs2_at ({calls} calls)",
         lambda k: [k.abs2_at(NUM, DEN, single) for _ in range(calls)][-1]),
        (f"scan_max_abs2 ({points} pts)",
         lambda k: k.scan_max_abs2(NUM, DEN, grid)),
        ("golden_max (20..2000 Hz)",
         lambda k: k.golden_max(NUM, DEN, 20.0, 2000.0, 1e-9)),
    ]


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=7,
                    help="timing repetitions per workload (best is kept)")
    ap.add_argument("--points", type=int, default=4096,
                    help="grid size for the vector workloads")
    ap.add_argument("--calls", type=int, default=5000,
                    help="call count for the scalar workload")
    args = ap.parse_args()

    if _ckernels is None:
        print("compiled extension not available; timing the fallback only")
    for label, work in _workloads(args.points, args.calls):
        py_t, py_r = _best_of(lambda: work(_pykernels), args.repeats)
        if _ckernels is None:
            print(f"{label:28s}  python {1e6 * py_t:9.1f} us")
            continue
        c_t, c_r = _best_of(lambda: work(_ckernels), args.repeats)
        note = "bit-identical" if _same(c_r, py_r) else "RESULTS DIFFER"
        print(f"{label:28s}  compiled {1e6 * c_t:9.1f} us"
              f"  python {1e6 * py_t:9.1f} us"
              f"  x{py_t / c_t:5.1f}  {note}")


if __name__ == "__main__":
    main()
