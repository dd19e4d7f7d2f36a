"""Two-spiral and three-ring accuracy, optionally over several epochs."""
import argparse

from fastids import bench, engine

SETUPS = {
    "two_spiral": dict(grid=(6, 6), train=200, test=300,
                       cfg=dict(sigma=4.0, alpha1=0.027, alpha2=0.23)),
    "three_ring": dict(grid=(5, 5), train=300, test=1000,
                       cfg=dict(sigma=2.0, alpha1=0.09, alpha2=0.27)),
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--datasets", nargs="+", default=list(SETUPS))
    ap.add_argument("--backends", nargs="+", default=["classic", "fast"])
    ap.add_argument("--epochs", nargs="+", type=int, default=[1])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    for ds in args.datasets:
        setup = SETUPS[ds]
        for epochs in args.epochs:
            cfg = engine.AlmConfig(epochs=epochs, **setup["cfg"])
            req = bench.BenchRequest(ds, tuple(args.backends), (setup["grid"],), (setup["train"],),
                                     setup["test"], args.runs, args.seed, False, cfg)
            for s in bench.summarize(bench.run_benchmark(req)):
                print(f"{ds:10} {s['backend']:8} epochs={epochs:<3d} accuracy {s['mean']:.4f} "
                      f"+- {s['std']:.4f} (train {s['train_metric_mean']:.4f})")


if __name__ == "__main__":
    main()
