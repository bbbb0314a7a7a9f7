#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the pure-Python twin.

Times the raw eigensolver across dimensions and a norm-heavy workload
(the two-point inequality gap, 4 Schatten norms per evaluation), which is
what dominates the verification suites.

Usage: python benchmarks/bench_backends.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from spconvex import _jacobi_py

try:
    from spconvex import _jacobi
except ImportError:
    _jacobi = None


def _hermitian(rng, n):
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return 0.5 * (G + G.conj().T)


def time_kernel(impl, matrices, repeats):
    start = time.perf_counter()
    for _ in range(repeats):
        for H in matrices:
            impl.jacobi_eigh(H)
    return (time.perf_counter() - start) / (repeats * len(matrices))


def time_gap_workload(repeats, force_python):
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from spconvex.matcore import schatten_norm\n"
        "rng = np.random.default_rng(0)\n"
        "pairs = [((rng.standard_normal((4,4)) + 1j*rng.standard_normal((4,4))),\n"
        "          (rng.standard_normal((4,4)) + 1j*rng.standard_normal((4,4)))) for _ in range(32)]\n"
        f"start = time.perf_counter()\n"
        f"for _ in range({repeats}):\n"
        "    for A, B in pairs:\n"
        "        g = (schatten_norm(A+B,1.5)**2 + schatten_norm(A-B,1.5)**2\n"
        "             - 2*schatten_norm(A,1.5)**2 - schatten_norm(B,1.5)**2)\n"
        f"print((time.perf_counter() - start) / ({repeats} * 32))\n"
    )
    env = dict(os.environ)
    if force_python:
        env["SPCONVEX_FORCE_PYTHON"] = "1"
    else:
        env.pop("SPCONVEX_FORCE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    print(f"{'dim':>4} {'python (us)':>14} {'compiled (us)':>14} {'speedup':>9}")
    for n in (2, 4, 8, 16):
        matrices = [_hermitian(rng, n) for _ in range(16)]
        t_py = time_kernel(_jacobi_py, matrices, max(1, args.repeats // 4))
        row = f"{n:>4} {t_py*1e6:>14.1f}"
        if _jacobi is not None:
            t_c = time_kernel(_jacobi, matrices, args.repeats)
            row += f" {t_c*1e6:>14.1f} {t_py/t_c:>8.1f}x"
        else:
            row += f" {'(not built)':>14} {'-':>9}"
        print(row)

    print("\ntwo-point gap workload (dim 4, four p=1.5 norms per evaluation):")
    t_py = time_gap_workload(max(1, args.repeats // 8), force_python=True)
    print(f"  python   backend: {t_py*1e6:10.1f} us/eval")
    if _jacobi is not None:
        t_c = time_gap_workload(args.repeats, force_python=False)
        print(f"  compiled backend: {t_c*1e6:10.1f} us/eval  ({t_py/t_c:.1f}x)")


if __name__ == "__main__":
    main()
