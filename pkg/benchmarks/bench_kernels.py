"""Timing comparison of the compiled and pure-numpy assembly kernels.

Both backends fill the same weight matrices entry for entry; this script
reports best-of-``--repeats`` wall times for each and checks bit-identity
of the outputs along the way.

    python3 benchmarks/bench_kernels.py [--sizes 200,400,800,1600]
"""

import argparse
import math
import time

import numpy as np

from fracnoether import _kernels


def best_time(fn, args, repeats):
    best = math.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        default="200,400,800,1600",
        help="comma-separated node counts to benchmark",
    )
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    try:
        from fracnoether import _kernels_cy as compiled
    except ImportError:
        raise SystemExit(
            "compiled backend not built; run pip install -e . first"
        )

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    alpha = args.alpha
    ga1 = math.gamma(alpha + 1.0)
    g2 = math.gamma(2.0 - alpha)

    kernels = [
        ("integral_weights", compiled.integral_weights, _kernels.integral_weights_numpy, ga1),
        ("l1_weights", compiled.l1_weights, _kernels.l1_weights_numpy, g2),
    ]

    print(f"alpha = {alpha}, best of {args.repeats} runs, times in ms")
    header = f"{'kernel':<18}{'n':>6}{'cython':>12}{'numpy':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, fast, slow, gconst in kernels:
        for n in sizes:
            h = 1.0 / (n - 1)
            t_fast, out_fast = best_time(fast, (n, h, alpha, gconst), args.repeats)
            t_slow, out_slow = best_time(slow, (n, h, alpha, gconst), args.repeats)
            if not np.array_equal(out_fast, out_slow):
                raise SystemExit(f"backend mismatch for {name} at n = {n}")
            print(
                f"{name:<18}{n:>6}{t_fast * 1e3:>12.3f}{t_slow * 1e3:>12.3f}"
                f"{t_slow / t_fast:>10.2f}x"
            )


if __name__ == "__main__":
    main()
