"""Time the compiled and pure-numpy kernel paths against each other.

Runs both implementations of the elastic-net coordinate descent sweep and
the boosting split search on synthetic problems of a few sizes, checks they
agree numerically, and prints a small table with the speed ratio.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 5]

Setting GLASSBENCH_DISABLE_NUMBA=1 turns the "numba" column into plain
python loops, which is the honest picture of what the fallback saves you.
"""

import argparse
import sys
import time

import numpy as np

from glassbench._kernels import (NUMBA_ENABLED, enet_cd_numba, enet_cd_numpy,
                                 node_split_numba, node_split_numpy)


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_enet(n, d, repeats, rng):
    Xt = np.ascontiguousarray(rng.normal(size=(d, n)))
    beta = np.zeros(d)
    beta[: max(1, d // 10)] = rng.normal(size=max(1, d // 10))
    y = Xt.T @ beta + 0.1 * rng.normal(size=n)
    sw = np.ones(n)
    l1, l2 = 0.01, 0.01
    max_sweeps, tol = 200, 1e-10

    def run(kernel):
        w = np.zeros(d)
        obj = np.zeros(max_sweeps)
        kernel(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj)
        return w

    w_a = run(enet_cd_numba)     # also warms the JIT before timing
    w_b = run(enet_cd_numpy)
    drift = float(np.abs(w_a - w_b).max())
    t_numba = median_time(lambda: run(enet_cd_numba), repeats)
    t_numpy = median_time(lambda: run(enet_cd_numpy), repeats)
    return t_numba, t_numpy, drift


def bench_split(n, d, nb, repeats, rng):
    codes = rng.integers(0, nb, size=(n, d)).astype(np.int32)
    idx = np.arange(n, dtype=np.int64)
    g = rng.normal(size=n)
    h = np.ones(n)
    nbins = np.full(d, nb, dtype=np.int64)

    def run(kernel):
        return kernel(codes, idx, g, h, nbins, 5, nb)

    out_a = run(node_split_numba)
    out_b = run(node_split_numpy)
    same = (out_a[0] == out_b[0] and out_a[1] == out_b[1]
            and abs(out_a[2] - out_b[2]) < 1e-9 * max(1.0, abs(out_a[2])))
    t_numba = median_time(lambda: run(node_split_numba), repeats)
    t_numpy = median_time(lambda: run(node_split_numpy), repeats)
    return t_numba, t_numpy, same


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats per case (median reported)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    mode = "numba jit" if NUMBA_ENABLED else "python loops (numba disabled)"
    print(f"compiled path: {mode}")
    print()
    print(f"{'kernel':<28} {'compiled':>10} {'numpy':>10} {'ratio':>7}  agreement")

    ok = True
    for n, d in ((2_000, 50), (20_000, 100), (100_000, 200)):
        t_a, t_b, drift = bench_enet(n, d, args.repeats, rng)
        agree = drift < 1e-8
        ok = ok and agree
        print(f"{'enet_cd n=%d d=%d' % (n, d):<28} {t_a * 1e3:>8.2f}ms "
              f"{t_b * 1e3:>8.2f}ms {t_b / t_a:>6.1f}x  max|dw|={drift:.1e}")

    for n, d, nb in ((5_000, 10, 32), (50_000, 20, 64), (200_000, 30, 64)):
        t_a, t_b, same = bench_split(n, d, nb, args.repeats, rng)
        ok = ok and same
        print(f"{'node_split n=%d d=%d' % (n, d):<28} {t_a * 1e3:>8.2f}ms "
              f"{t_b * 1e3:>8.2f}ms {t_b / t_a:>6.1f}x  same split: {same}")

    if not ok:
        print("\nkernel paths disagree beyond tolerance", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
