"""Mean test FVU for F1/F2 over partition grids, training sizes and backends.

    python scripts/approximation_grid.py --runs 20 --out results/grid
"""
import argparse
import json
from pathlib import Path

from fastids import bench, engine


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--datasets", nargs="+", default=["f1", "f2"])
    ap.add_argument("--backends", nargs="+", default=["classic", "fast"])
    ap.add_argument("--grids", nargs="+", default=["2x2", "4x4", "8x8"])
    ap.add_argument("--sizes", nargs="+", type=int, default=[1000, 2500])
    ap.add_argument("--test-size", type=int, default=1000)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cuts", choices=["uniform", "random"], default="random")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args(argv)

    cfg = engine.AlmConfig(sigma=15.0, alpha1=0.01, alpha2=0.95, partition_mode=args.cuts)
    grids = tuple(tuple(int(v) for v in g.split("x")) for g in args.grids)
    records = []
    for ds in args.datasets:
        req = bench.BenchRequest(ds, tuple(args.backends), grids, tuple(args.sizes),
                                 args.test_size, args.runs, args.seed, False, cfg)
        records += bench.run_benchmark(req)

    print(f"{'dataset':8} {'backend':8} {'grid':6} {'n':>6} {'fvu':>8} {'std':>8} {'train s':>9}")
    for s in bench.summarize(records):
        print(f"{s['dataset']:8} {s['backend']:8} {s['partitions']:6} {s['n_train']:6d} "
              f"{s['mean']:8.4f} {s['std']:8.4f} {s['train_seconds_mean']:9.4f}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "records.csv").write_text(bench.records_csv(records))
        (args.out / "summary.json").write_text(json.dumps(bench.summarize(records), indent=2))


if __name__ == "__main__":
    main()
