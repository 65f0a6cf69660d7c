"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]
"""

import argparse
import math
import os
import time

import numpy as np

from coherent_zxz import kernels
from coherent_zxz.universality import sample_targets


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    theta, phi, lam = sample_targets(args.n, seed=7, size=args.n)
    err = (math.pi / 2 + 0.1 * math.pi, 0.3, 0.2)
    cases = {
        "decomposition_fidelity_batch": lambda: kernels.decomposition_fidelity_batch(
            theta, phi, lam, theta, phi, lam, *err
        ),
        "implemented_params_batch": lambda: kernels.implemented_params_batch(theta, phi, lam, *err),
        "count_unit_fidelity": lambda: kernels.count_unit_fidelity(theta, phi, lam, *err, 1 - 1e-9),
    }
    if not kernels.NUMBA_AVAILABLE:
        print("numba is not installed; only the numpy path can run")
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':32s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        os.environ[kernels.ENV_FLAG] = "0"
        t_np, ref = _best_of(fn, args.repeat)
        if kernels.NUMBA_AVAILABLE:
            os.environ[kernels.ENV_FLAG] = "1"
            fn()  # compile
            t_nb, out = _best_of(fn, args.repeat)
            np.testing.assert_allclose(np.asarray(out, float), np.asarray(ref, float), atol=1e-12)
            print(f"{name:32s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:32s} {t_np:10.4f} {'-':>10s}")
    os.environ.pop(kernels.ENV_FLAG, None)


if __name__ == "__main__":
    main()
