"""Time the likelihood kernels and a full fit under each available backend.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from wged import backend, core, estimation
from wged.data import GLASS_FIBRE
from wged.numerics import ln_beta


def kernel_calls(x):
    a, b, lam = 0.8, 1.7, 1.2
    lb = ln_beta(1.5, 2.5)
    return {
        "wged_loglik": lambda k: k.wged_loglik(a, b, lam, x),
        "wged_profile": lambda k: k.wged_profile(b, lam, x),
        "wged_score": lambda k: k.wged_score(a, b, lam, x),
        "wged_info": lambda k: k.wged_info(a, b, lam, x),
        "ged_loglik": lambda k: k.ged_loglik(2.0, lam, x),
        "bed_loglik": lambda k: k.bed_loglik(1.5, 2.5, lam, lb, x),
        "bged_loglik": lambda k: k.bged_loglik(1.5, 2.5, 2.0, lam, lb, x),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    # fallback first so the speedup column reads fallback time / compiled time
    names = sorted(backend.available(), key=lambda n: n != "python")
    samples = {"n=63": np.ascontiguousarray(GLASS_FIBRE, dtype=float),
               "n=5000": core.sample((0.8, 1.7, 1.2), 5000, seed=42)}

    print(f"{'kernel':<14}{'size':>8}" + "".join(f"{n + ' (us)':>16}" for n in names)
          + f"{'speedup':>10}")
    for label, x in samples.items():
        for kname, call in kernel_calls(x).items():
            times = [best_of(lambda: call(backend.get(n)), args.repeat, 200) for n in names]
            speed = times[0] / times[-1] if len(times) > 1 else 1.0
            print(f"{kname:<14}{label:>8}" + "".join(f"{t * 1e6:16.2f}" for t in times)
                  + f"{speed:10.1f}")

    print()
    previous = backend.name()
    s = estimation.Sample(GLASS_FIBRE)
    try:
        for n in names:
            backend.set_backend(n)
            t = best_of(lambda: estimation.fit_mle(s), max(1, args.repeat // 2), 1)
            print(f"fit_mle glass fibre, {n:<8}{t * 1e3:10.1f} ms")
    finally:
        backend.set_backend(previous)


if __name__ == "__main__":
    main()
