"""Time the compiled propagation kernel against the numpy fallback.

Usage: ``python benchmarks/bench_propagate.py [--steps T] [--repeat R]``
"""
import argparse
import math
import timeit

import numpy as np

from ptqwalk import _walkcore_py
from ptqwalk.evolution import _kernel_args, auto_size, init_state
from ptqwalk.operators import HomogeneousParams, WalkConfig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    n = auto_size(args.steps)
    c = WalkConfig.homogeneous(HomogeneousParams(math.pi / 4, -math.pi / 7, math.log(1.1), 0.0), n)
    amp = init_state(0, (0, 1), n).amplitudes
    kargs = _kernel_args(c)

    kernels = {"python": _walkcore_py}
    try:
        from ptqwalk import _walkcore
        kernels["cython"] = _walkcore
    except ImportError:
        print("compiled kernel not built; timing the fallback only")

    results = {}
    for name, mod in kernels.items():
        best = min(timeit.repeat(lambda: mod.propagate(amp, *kargs, args.steps), number=1, repeat=args.repeat))
        results[name] = best
        print(f"{name:>7}: N={n} T={args.steps} best of {args.repeat}: {best:.4f} s")

    if len(results) == 2:
        ref, _, _ = _walkcore_py.propagate(amp, *kargs, args.steps)
        out, _, _ = kernels["cython"].propagate(amp, *kargs, args.steps)
        print(f"speedup: {results['python'] / results['cython']:.1f}x, "
              f"max |diff| = {np.max(np.abs(ref - out)):.2e}")


if __name__ == "__main__":
    main()
