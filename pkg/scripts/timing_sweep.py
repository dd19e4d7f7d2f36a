"""Serial training time of classic vs fast planes as the training set grows."""
import argparse
import time

import numpy as np

from fastids import bench, engine


def fit_time(data, cfg, reps):
    engine.fit(data.arrays, cfg)
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        engine.fit(data.arrays, cfg)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", type=int, default=[250, 500, 1000, 2500, 5000, 10000])
    ap.add_argument("--grid", default="2x2")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    bench.warmup()
    grid = tuple(int(v) for v in args.grid.split("x"))
    print(f"{'n':>6} {'classic ms':>11} {'fast ms':>9} {'ratio':>6}")
    for n in args.sizes:
        data = bench.gen_f2(n, seed=args.seed)
        t = {b: fit_time(data, engine.AlmConfig(backend=b, partitions=grid, sigma=15.0,
                                                alpha1=0.01, alpha2=0.95), args.reps)
             for b in ("classic", "fast")}
        print(f"{n:6d} {t['classic'] * 1e3:11.2f} {t['fast'] * 1e3:9.2f} {t['classic'] / t['fast']:6.2f}")


if __name__ == "__main__":
    main()
