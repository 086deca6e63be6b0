"""Time the compiled Bell kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from bellscope import _kernels_py
from bellscope.functional import coefficient_tables
from bellscope.quantum import nopa_coefficients

try:
    from bellscope import _kernels as _compiled
except ImportError:
    _compiled = None


def random_unitaries(d, rng):
    Z = rng.standard_normal((4, d, d)) + 1j * rng.standard_normal((4, d, d))
    return np.ascontiguousarray(np.stack([np.linalg.qr(z)[0] for z in Z]))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--d", type=int, nargs="*", default=[3, 5, 10, 25])
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    impls = [("python", _kernels_py)] + ([("compiled", _compiled)] if _compiled else [])
    print(f"{'d':>4} {'kernel':>10} " + " ".join(f"{n + ' us':>12}" for n, _ in impls) + f" {'speedup':>8}")
    for d in args.d:
        U, lam, K = random_unitaries(d, rng), nopa_coefficients(d, 1.5), coefficient_tables(d)
        n = max(5, args.repeat // max(1, d // 5))
        for fn in ("bell_value", "bell_value_grad"):
            times = [min(timeit.repeat(lambda: getattr(m, fn)(U, lam, K), number=n, repeat=3)) / n * 1e6
                     for _, m in impls]
            speed = f"{times[0] / times[-1]:8.1f}" if len(times) > 1 else "     n/a"
            print(f"{d:>4} {fn:>15} " + " ".join(f"{t:12.1f}" for t in times) + f" {speed}")
        th = rng.uniform(0, 2 * np.pi, d * (d - 1) // 2)
        ph = rng.uniform(0, 2 * np.pi, d * (d - 1) // 2)
        times = [min(timeit.repeat(lambda: m.givens_unitary(th, ph, d), number=n, repeat=3)) / n * 1e6
                 for _, m in impls]
        speed = f"{times[0] / times[-1]:8.1f}" if len(times) > 1 else "     n/a"
        print(f"{d:>4} {'givens_unitary':>15} " + " ".join(f"{t:12.1f}" for t in times) + f" {speed}")


if __name__ == "__main__":
    main()
