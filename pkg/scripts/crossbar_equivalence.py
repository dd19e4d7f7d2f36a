"""Compare crossbar-read narrow paths with the software vectors on a 1-D sine."""
import argparse

import numpy as np

from fastids import bench, crossbar as xb, fast
from fastids.core import Domain, Resolution, quantize_array


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--alpha1", type=float, default=0.6)
    ap.add_argument("--alpha2", type=float, default=0.5)
    ap.add_argument("--sigma", type=float, default=15.0)
    ap.add_argument("--duty-map", choices=["compensated", "linear"], default="compensated")
    args = ap.parse_args(argv)

    res, dom = Resolution(256, 256), Domain(1.0, 10.0)
    params = fast.FastParams(args.alpha1, args.alpha2, args.sigma)
    data = bench.gen_sine(args.n, seed=args.seed)
    xq = quantize_array(data.X[:, 0], dom, res.rsn_x)
    pairs = np.column_stack([xq, quantize_array(data.y, dom, res.rsn_y)]).astype(float)

    soft = fast.train_vectors(fast.init_vectors(res, params), pairs)
    circuit = xb.Circuit.matching(params, duty_map=args.duty_map)
    hard = xb.read_vectors(xb.train_crossbar(xb.init_crossbar(res, circuit=circuit), pairs), params)

    cols = np.unique(xq) - 1
    gap = np.abs(hard.c_np[cols] - soft.c_np[cols])
    print(f"{cols.size} sample columns, NP gap (levels): median {np.median(gap):.2f}, "
          f"p90 {np.percentile(gap, 90):.2f}, max {gap.max():.2f}")
    for tol in (0.02, 0.05, 0.10):
        print(f"  within {tol:.0%} of range: {np.mean(gap <= tol * res.rsn_y):.3f}")


if __name__ == "__main__":
    main()
