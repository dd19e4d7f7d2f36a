"""Command-line entry point: ``fastids train|eval|bench|dump-plane``.

Configs are flat text, one ``key = value`` per line, ``#`` starts a comment.
Keys that name an :class:`AlmConfig` field configure the model; the rest
select data and runs (see :class:`RunConfig`). Lists are comma separated,
ranges are ``lo:hi`` and partition grids are written ``4x4``.

Exit codes: 0 success, 2 bad input or config, 3 failure while running.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import bench, engine
from .core import FastIdsError, InputError

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3
SUMMARY_FILE = "train_summary.json"
ALM_KEYS = {f.name for f in dataclasses.fields(engine.AlmConfig)}


@dataclass
class RunConfig:
    dataset: str = "f2"               # built-in generator name or CSV path
    n_train: int = 1000               # per class for classification generators
    test_size: int = 1000
    labels: tuple | None = None       # class labels for a labelled CSV
    runs: int = 1
    backends: tuple = ("fast",)
    sizes: tuple | None = None        # bench only; defaults to (n_train,)
    grids: tuple | None = None        # bench only; defaults to (alm.partitions,)
    serial: bool = False
    alm: engine.AlmConfig = field(default_factory=engine.AlmConfig)

    @property
    def seed(self):
        return self.alm.seed


def _scalar(text: str):
    low = text.lower()
    if low in ("none", "null", ""):
        return None
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _grid(text: str) -> tuple:
    return tuple(int(p) for p in text.lower().split("x"))


def _ranges(text: str) -> tuple:
    out = []
    for part in text.split(","):
        lo, hi = part.split(":")
        out.append((float(lo), float(hi)))
    return tuple(out)


def _list(text: str, cast=str) -> tuple:
    return tuple(cast(p.strip()) for p in text.split(",") if p.strip())


def parse_config_text(text: str) -> dict:
    """Raw ``{key: string}`` pairs from flat config text."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_run_config(raw: dict) -> RunConfig:
    try:
        return _build_run_config(dict(raw))
    except FastIdsError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad config value: {exc}") from exc


def _build_run_config(raw: dict) -> RunConfig:
    alm = {}
    for key in list(raw):
        if key not in ALM_KEYS:
            continue
        value = raw.pop(key)
        if key == "partitions":
            alm[key] = _grid(value) if "x" in value.lower() else _list(value, int)
        elif key == "input_domains":
            alm[key] = _ranges(value)
        elif key == "output_domain":
            alm[key] = _ranges(value)[0]
        else:
            alm[key] = _scalar(value)
    run = {}
    for key, value in raw.items():
        if key in ("dataset",):
            run[key] = value
        elif key in ("n_train", "test_size", "runs"):
            run[key] = int(value)
        elif key == "labels":
            run[key] = _list(value, float)
        elif key == "backends":
            run[key] = _list(value)
        elif key == "sizes":
            run[key] = _list(value, int)
        elif key == "grids":
            run[key] = tuple(_grid(g) for g in _list(value))
        elif key == "serial":
            run[key] = bool(_scalar(value))
        else:
            raise InputError(f"unknown config key {key!r}")
    return RunConfig(alm=engine.AlmConfig(**alm), **run)


def load_run_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {p}: {exc.strerror}") from exc
    return build_run_config(parse_config_text(text))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def _apply_flags(rc: RunConfig, args) -> RunConfig:
    seed = args.seed if args.seed is not None else rc.alm.seed
    if seed is None:
        seed = fresh_seed()
    alm = replace(rc.alm, seed=int(seed))
    if getattr(args, "backend", None):
        alm = replace(alm, backend=args.backend)
        rc = replace(rc, backends=(args.backend,))
    if getattr(args, "serial", False):
        rc = replace(rc, serial=True)
    return replace(rc, alm=alm)


def load_data(rc: RunConfig, n: int, seed: int) -> bench.Dataset:
    """Built-in generator by name, otherwise a CSV file path."""
    if rc.dataset in bench.DATASETS:
        return bench.make_dataset(rc.dataset, n, seed)
    p = Path(rc.dataset)
    try:
        text = p.read_text()
    except OSError:
        raise InputError(f"dataset file not found: {p}") from None
    data = bench.read_dataset_csv(text, p.stem)
    if rc.labels is not None:
        data = bench.Dataset(data.X, data.y, data.name, rc.labels)
    return data


def _model_config(alm: engine.AlmConfig, data: bench.Dataset) -> engine.AlmConfig:
    if data.labels is not None and alm.output_domain is None:
        return replace(alm, output_domain=(min(data.labels), max(data.labels)))
    return alm


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands ----------------------------------------------------------------------

def cmd_train(args) -> int:
    rc = _apply_flags(load_run_config(args.config), args)
    data = load_data(rc, rc.n_train, rc.seed)
    cfg = _model_config(rc.alm, data)
    bench.warmup()
    t0 = time.perf_counter()
    model = engine.fit(data.arrays, cfg)
    seconds = time.perf_counter() - t0
    out = Path(args.out)
    engine.save_model(model, out)
    if data.labels is not None:
        metric = {"train_accuracy": bench.accuracy(engine.classify_many(model, data.X, data.labels), data.y)}
    else:
        metric = {"train_fvu": bench.fvu(engine.predict_many(model, data.X), data.y)}
    summary = {
        "dataset": rc.dataset, "backend": cfg.backend, "seed": cfg.seed,
        "n_train": len(data), "inputs": model.dim,
        "partitions": list(model.scheme.counts), "planes": model.plane_count(),
        "plane_cells": engine.plane_cells(cfg.backend, cfg.resolution),
        "stored_cells": model.stored_cells(), "train_seconds": seconds, **metric,
    }
    (out / SUMMARY_FILE).write_text(_dump_json(summary))
    print(_dump_json(summary), end="")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = engine.load_model(args.model)
    rc = load_run_config(args.config)
    if args.data is not None:
        rc = replace(rc, dataset=args.data)
    seed = args.seed if args.seed is not None else rc.seed
    if seed is None:
        seed = fresh_seed()
    # generated sets use the training seed + 1, matching the benchmark's test split
    data = load_data(rc, rc.test_size, int(seed) + 1)
    if data.X.shape[1] != model.dim:
        raise InputError(f"dataset has {data.X.shape[1]} inputs, model expects {model.dim}")
    t0 = time.perf_counter()
    if data.labels is not None:
        name, value = "accuracy", bench.accuracy(engine.classify_many(model, data.X, data.labels), data.y)
    else:
        name, value = "fvu", bench.fvu(engine.predict_many(model, data.X), data.y)
    seconds = time.perf_counter() - t0
    print("{\n"
          f'  "dataset": {json.dumps(rc.dataset)},\n'
          f'  "n": {len(data)},\n'
          f'  "{name}": {value:.4f},\n'
          f'  "seconds": {seconds:.4f}\n'
          "}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rc = _apply_flags(load_run_config(args.config), args)
    req = bench.BenchRequest(
        dataset=rc.dataset, backends=rc.backends,
        partitions=rc.grids or (rc.alm.partitions,),
        sizes=rc.sizes or (rc.n_train,), test_size=rc.test_size,
        runs=rc.runs, seed=rc.seed, serial=rc.serial, config=rc.alm,
    )
    if rc.dataset not in bench.DATASETS:
        raise InputError(f"bench needs a built-in dataset, one of {bench.DATASETS}")
    records = bench.run_benchmark(req)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench_records.csv").write_text(bench.records_csv(records))
    summary = {"seed": rc.seed, "serial": rc.serial, "groups": bench.summarize(records)}
    (out / "bench_summary.json").write_text(_dump_json(summary))
    print(_dump_json(summary), end="")
    return EXIT_OK


def cmd_dump_plane(args) -> int:
    model = engine.load_model(args.model)
    sys.stdout.write(engine.dump_plane(model, args.input, args.cell, fmt=".6g", fuzzy=args.fuzzy))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fastids", description="ALM with classic or fast ink-drop planes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default=None):
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--seed", type=int, help="base seed (overrides the config)")
        if out_default is not None:
            sp.add_argument("--out", default=out_default, help="output directory")

    t = sub.add_parser("train", help="fit a model and save it")
    common(t, "model")
    t.add_argument("--backend", choices=engine.BACKENDS)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score a saved model on a dataset")
    e.add_argument("model", help="model directory")
    e.add_argument("--data", help="dataset name or CSV path (overrides the config)")
    common(e)
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="repeated seeded runs with CSV and JSON reports")
    common(b, "bench_out")
    b.add_argument("--backend", choices=engine.BACKENDS)
    b.add_argument("--serial", action="store_true", help="run sequentially for timing fidelity")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("dump-plane", help="print one plane as CSV")
    d.add_argument("model", help="model directory")
    d.add_argument("--input", type=int, default=1, help="1-based input index")
    d.add_argument("--cell", type=int, default=1, help="1-based partition cell")
    d.add_argument("--fuzzy", action="store_true", help="append a centre:width row")
    d.set_defaults(func=cmd_dump_plane)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FastIdsError as exc:
        print(f"fastids: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"fastids: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
