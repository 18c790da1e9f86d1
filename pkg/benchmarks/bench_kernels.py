"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--qubits 16 18 20] [--repeat 5]
"""
import argparse
import time

import numpy as np

from qdarwin import kernels
from qdarwin.dynamics import haar_unitary


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "cython" not in kernels.BACKENDS:
        print("compiled backend not built; only the python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'qubits':>6} {'kernel':<22} " + " ".join(f"{b:>10}" for b in kernels.BACKENDS)
          + "   speedup")
    for n in args.qubits:
        dims = (2,) * n
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        u2, u4 = haar_unitary(2, rng), haar_unitary(4, rng)
        rows = tuple(range(1, n, 3))
        cols = tuple(i for i in range(n) if i not in rows)
        cases = {
            "apply_local 1q (mid)": lambda b: kernels.apply_local(amps, dims, (n // 2,), u2, backend=b),
            "apply_local 2q (0,n-1)": lambda b: kernels.apply_local(amps, dims, (0, n - 1), u4, backend=b),
            f"gather {len(rows)}|{len(cols)} strided": lambda b: kernels.gather(amps, dims, rows, cols, backend=b),
        }
        for name, fn in cases.items():
            t = {b: best_of(lambda: fn(b), args.repeat) for b in kernels.BACKENDS}
            line = f"{n:>6} {name:<22} " + " ".join(f"{t[b] * 1e3:>8.2f}ms" for b in kernels.BACKENDS)
            if len(t) == 2:
                line += f"   {t['python'] / t['cython']:6.2f}x"
            print(line)


if __name__ == "__main__":
    main()
