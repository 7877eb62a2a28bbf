"""Time the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Both backends are
imported directly, so the SUPERPACK_PURE_PYTHON switch is not needed.
"""

import argparse
import timeit

import numpy as np

from superpack import _pykernels
from superpack.lattice import CASE_III
from superpack.reference import table_basis

try:
    from superpack import _ckernels
except ImportError:
    _ckernels = None


def cases():
    B = table_basis(1.4).matrix
    lam = np.linspace(0.1, 0.7, 7)
    U = CASE_III.vectors
    return {
        "lattice_norms box 4": lambda k: k.lattice_norms(B, 1.4, (4, 4, 4)),
        "lattice_norms box 12": lambda k: k.lattice_norms(B, 1.4, (12, 12, 12)),
        "cofactor": lambda k: k.cofactor(B),
        "stationarity_residual": lambda k: k.stationarity_residual(B, lam, U, 1.4),
        "stationarity_jacobian": lambda k: k.stationarity_jacobian(B, lam, U, 1.4),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<24}" + "".join(f"{n:>14}" for n, _ in backends) + "   speedup")
    for name, fn in cases().items():
        times = []
        for _, mod in backends:
            t = timeit.Timer(lambda: fn(mod))
            n, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, n)) / n)
        cols = "".join(f"{t * 1e6:>12.1f}us" for t in times)
        sp = f"{times[0] / times[1]:8.1f}x" if len(times) == 2 else ""
        print(f"{name:<24}{cols}{sp}")


if __name__ == "__main__":
    main()
