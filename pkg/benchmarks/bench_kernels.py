"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from riopt.kernels import backends


def cases(n: int, rng: np.random.Generator) -> dict:
    t = np.geomspace(1e-30, 1.0, n)
    u = t**0.5
    w = rng.uniform(0.0, 1.0, n)
    vals = rng.uniform(0.0, 1.0, n)
    x = np.sort(rng.uniform(0.0, 1.0, n))
    y = np.sqrt(x) + 0.01 * rng.standard_normal(n)
    return {
        "suffix_max": (rng.standard_normal(n),),
        "upper_hull": (x, y),
        "minform_sup": (vals, t, t, 0.5),
        "window_sup_integral": (u, w),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = backends()
    data = cases(args.n, np.random.default_rng(0))
    print(f"n = {args.n}; backends: {', '.join(impls)}")
    print(f"{'kernel':<22}" + "".join(f"{name:>14}" for name in impls) + f"{'speedup':>10}")
    for kernel, a in data.items():
        times = {}
        ref = None
        for name, mod in impls.items():
            fn = getattr(mod, kernel)
            out = np.asarray(fn(*a))
            if ref is None:
                ref = out
            elif not np.allclose(out, ref, rtol=1e-12, atol=0.0):
                raise SystemExit(f"{kernel}: backends disagree")
            times[name] = min(timeit.repeat(lambda: fn(*a), number=1, repeat=args.repeat))
        row = "".join(f"{times[name] * 1e3:>12.3f}ms" for name in impls)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{kernel:<22}{row}{speed:>9.1f}x")


if __name__ == "__main__":
    main()
