"""Time the compiled kernels against the NumPy fallback.

Run from the repository root::

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per workload with the best-of-N time for each backend and the speedup.
"""

import argparse
import timeit

import numpy as np

from hlrs import _backend, hfbm
from hlrs.specfun import leroy, tricomi_psi

WORKLOADS = {
    "tricomi_psi, 10^4 points": lambda: tricomi_psi(0.25, 0.5, np.geomspace(1e-4, 40.0, 10_000)),
    "leroy series, 2000 points": lambda: leroy(0.5, np.linspace(-1.0, 20.0, 2000)),
    "covariance matrix 512x512": lambda: hfbm.covariance_matrix(0.5, np.linspace(0.01, 10.0, 512)),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = _backend.available()
    previous = _backend.name
    print(f"{'workload':32s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    try:
        for label, fn in WORKLOADS.items():
            times = {}
            for b in backends:
                _backend.set_backend(b)
                fn()  # warm caches outside the timing
                times[b] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            row = f"{label:32s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
            if len(backends) > 1:
                row += f"{times['python'] / times['cython']:11.1f}x"
            print(row)
    finally:
        _backend.set_backend(previous)


if __name__ == "__main__":
    main()
