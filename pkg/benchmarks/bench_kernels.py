"""Compare the compiled and numpy row-reduction kernels over F_p.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]

Both kernels reduce the same random matrices; the pivot lists and reduced
matrices must agree before any timing is reported.
"""

import argparse
import time

import numpy as np

from dgheart import _rref_py

try:
    from dgheart import _rref
except ImportError:
    _rref = None


def _random_matrix(rng, m, n, p, density):
    M = rng.integers(0, p, size=(m, n), dtype=np.int64)
    M[rng.random((m, n)) > density] = 0
    return M


def _time(fn, M, p, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        A = M.copy()
        t = time.perf_counter()
        piv = fn(A, p)
        best = min(best, time.perf_counter() - t)
        out = (A, list(piv))
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--primes", type=int, nargs="+", default=[7, 2147483647])
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _rref is None:
        print("compiled kernel not built; only the numpy kernel is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'p':>12} {'size':>6} {'numpy (s)':>12} {'compiled (s)':>13} {'speedup':>8}")
    for p in args.primes:
        for n in args.sizes:
            M = _random_matrix(rng, n, n + n // 2, p, args.density)
            t_py, (A_py, piv_py) = _time(_rref_py.rref_modp, M, p, args.repeat)
            if _rref is None:
                print(f"{p:>12} {n:>6} {t_py:>12.4f} {'-':>13} {'-':>8}")
                continue
            t_c, (A_c, piv_c) = _time(_rref.rref_modp, M, p, args.repeat)
            if piv_py != piv_c or not np.array_equal(A_py, A_c):
                raise SystemExit(f"kernels disagree for p={p}, size={n}")
            print(f"{p:>12} {n:>6} {t_py:>12.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
