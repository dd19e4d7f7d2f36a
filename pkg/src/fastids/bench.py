"""Datasets, error metrics and the repeated-run benchmark harness."""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import engine
from .core import FastIdsError, Resolution


class MetricError(FastIdsError, ValueError):
    pass


class GenerationError(FastIdsError, ValueError):
    pass


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    name: str = ""
    labels: tuple | None = None   # set for classification data

    def __len__(self):
        return len(self.y)

    @property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.X, self.y


# -- regression targets ------------------------------------------------------

F_DOMAIN = (1.0, 10.0)


def f1(x1, x2):
    return (1.0 + np.power(x1, -2.0) + np.power(x2, -1.5)) ** 2


def f2(x1, x2):
    return np.sqrt(2.0 * (np.sin(x1) / x1) ** 2 + 3.0 * (np.sin(x2) / x2) ** 2)


def _gen_function(fn, name, n, seed):
    if n < 1:
        raise GenerationError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.uniform(*F_DOMAIN, size=(n, 2))
    return Dataset(X, fn(X[:, 0], X[:, 1]), name)


def gen_f1(n: int, seed=None) -> Dataset:
    return _gen_function(f1, "f1", n, seed)


def gen_f2(n: int, seed=None) -> Dataset:
    return _gen_function(f2, "f2", n, seed)


def sine_target(x, domain=F_DOMAIN):
    """One period of a sine spanning ``domain``, centred on its midpoint."""
    lo, hi = domain
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * np.sin(2 * np.pi * (np.asarray(x) - lo) / (hi - lo))


def gen_sine(n: int, seed=None, domain=F_DOMAIN) -> Dataset:
    rng = np.random.default_rng(seed)
    x = rng.uniform(*domain, size=n)
    return Dataset(x[:, None], sine_target(x, domain), "sine")


# -- classification sets ------------------------------------------------------

@dataclass(frozen=True)
class SpiralParams:
    p: float = 1 / math.pi
    n_turns: float = 3.0
    r0: float = 0.5


def spiral_point(theta, params: SpiralParams = SpiralParams()):
    """Class-0 spiral point for angle ``theta`` in [-2 pi n, 0]."""
    r = params.p * (np.asarray(theta) + 2 * np.pi * params.n_turns) + params.r0
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def gen_two_spiral(n_per_class: int, params: SpiralParams = SpiralParams(), seed=None) -> Dataset:
    """Two interleaved spirals; class 1 is class 0 reflected through the origin.

    Angles are stratified over the spiral's full range with uniform jitter
    inside each stratum.
    """
    if n_per_class < 1:
        raise GenerationError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    span = 2 * np.pi * params.n_turns
    theta = -span + span * (np.arange(n_per_class) + rng.uniform(size=n_per_class)) / n_per_class
    pts = spiral_point(theta, params)
    X = np.concatenate([pts, -pts])
    y = np.concatenate([np.zeros(n_per_class), np.ones(n_per_class)])
    order = rng.permutation(len(y))
    return Dataset(X[order], y[order], "two_spiral", (0.0, 1.0))


def ring_label(x1, x2, r1: float = 1.0, r2: float = 4.0):
    s = np.asarray(x1) ** 2 + np.asarray(x2) ** 2
    return np.where(s < r1, 0.0, np.where(s < r2, 1.0, 2.0))


def gen_three_ring(n_per_class: int, r1: float = 1.0, r2: float = 4.0, box=(-3.0, 3.0),
                   seed=None) -> Dataset:
    """Uniform points in ``box`` squared, kept until every ring class has ``n_per_class``."""
    if not 0 < r1 < r2:
        raise GenerationError(f"need 0 < r1 < r2, got {r1}, {r2}")
    lo, hi = box
    far = max(lo * lo, hi * hi) * 2
    near = 0.0 if lo <= 0 <= hi else min(lo * lo, hi * hi) * 2
    if far <= r2 or near >= r1:
        raise GenerationError(f"box {box} cannot reach all three classes")
    rng = np.random.default_rng(seed)
    kept = [[], [], []]
    while min(len(k) for k in kept) < n_per_class:
        pts = rng.uniform(lo, hi, size=(4096, 2))
        labels = ring_label(pts[:, 0], pts[:, 1], r1, r2).astype(int)
        for c in range(3):
            need = n_per_class - len(kept[c])
            if need > 0:
                kept[c].extend(pts[labels == c][:need])
    X = np.concatenate([np.asarray(k) for k in kept])
    y = np.repeat([0.0, 1.0, 2.0], n_per_class)
    order = rng.permutation(len(y))
    return Dataset(X[order], y[order], "three_ring", (0.0, 1.0, 2.0))


# -- metrics -------------------------------------------------------------------

def fvu(predictions, truths) -> float:
    """Fraction of variance unexplained."""
    pred = np.asarray(predictions, dtype=float)
    true = np.asarray(truths, dtype=float)
    if pred.shape != true.shape or true.size < 2:
        raise MetricError("fvu needs two equal-length sequences of at least 2 values")
    denom = np.sum((true - true.mean()) ** 2)
    if denom == 0:
        raise MetricError("fvu undefined for constant truths")
    return float(np.sum((pred - true) ** 2) / denom)


def accuracy(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or truth.size < 1:
        raise MetricError("accuracy needs two equal-length non-empty sequences")
    return float(np.mean(predicted == truth))


# -- harness ---------------------------------------------------------------------

DATASETS = ("f1", "f2", "two_spiral", "three_ring", "sine")


def make_dataset(name: str, n: int, seed, **kw) -> Dataset:
    """Training-size ``n`` means total samples for regression, per class for classification."""
    if name == "f1":
        return gen_f1(n, seed)
    if name == "f2":
        return gen_f2(n, seed)
    if name == "sine":
        return gen_sine(n, seed)
    if name == "two_spiral":
        return gen_two_spiral(n, seed=seed)
    if name == "three_ring":
        return gen_three_ring(n, seed=seed, **kw)
    raise GenerationError(f"unknown dataset {name!r}; expected one of {DATASETS}")


@dataclass
class BenchRequest:
    dataset: str = "f2"
    backends: tuple = ("fast",)
    partitions: tuple = ((4, 4),)
    sizes: tuple = (1000,)            # per class for classification sets
    test_size: int = 1000             # per class for classification sets
    runs: int = 1
    seed: int = 0
    serial: bool = True
    config: engine.AlmConfig = field(default_factory=engine.AlmConfig)


@dataclass
class RunRecord:
    dataset: str
    backend: str
    partitions: str
    n_train: int
    epochs: int
    seed: int
    run: int
    metric: str
    value: float
    train_metric: float
    train_seconds: float
    predict_seconds: float
    n_planes: int
    plane_cells: int
    stored_cells: int


def run_seed(seed: int, run: int) -> int:
    """Independent per-run seed derived from the base seed and run index."""
    return int(np.random.SeedSequence([seed, run]).generate_state(1, dtype=np.uint64)[0])


def _evaluate(model, data: Dataset) -> float:
    if data.labels is not None:
        return accuracy(engine.classify_many(model, data.X, data.labels), data.y)
    return fvu(engine.predict_many(model, data.X), data.y)


def single_run(dataset: str, backend: str, counts: tuple, n_train: int, test_size: int,
               seed: int, run: int, config: engine.AlmConfig) -> RunRecord:
    s = run_seed(seed, run)
    train = make_dataset(dataset, n_train, s)
    test = make_dataset(dataset, test_size, s + 1)
    cfg = replace(config, backend=backend, partitions=tuple(counts), seed=s)
    if train.labels is not None and cfg.output_domain is None:
        cfg = replace(cfg, output_domain=(min(train.labels), max(train.labels)))
    t0 = time.perf_counter()
    model = engine.fit(train.arrays, cfg)
    t1 = time.perf_counter()
    value = _evaluate(model, test)
    t2 = time.perf_counter()
    train_value = _evaluate(model, train)
    return RunRecord(
        dataset=dataset, backend=backend, partitions="x".join(map(str, counts)),
        n_train=len(train), epochs=cfg.epochs, seed=s, run=run,
        metric="accuracy" if train.labels is not None else "fvu",
        value=value, train_metric=train_value, train_seconds=t1 - t0, predict_seconds=t2 - t1,
        n_planes=model.plane_count(), plane_cells=engine.plane_cells(backend, cfg.resolution),
        stored_cells=model.stored_cells(),
    )


def warmup() -> None:
    """Compile the training kernels so timing excludes JIT cost."""
    for backend in ("classic", "fast"):
        cfg = engine.AlmConfig(backend=backend, rsn_x=8, rsn_y=8, sigma=1.0, alpha1=0.5, alpha2=0.5)
        engine.fit((np.array([[0.0], [1.0]]), np.array([0.0, 1.0])), cfg)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("FASTIDS_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def run_benchmark(req: BenchRequest) -> list[RunRecord]:
    """All (backend, partitions, size, run) combinations of ``req``, one record each."""
    jobs = [(req.dataset, b, tuple(p), n, req.test_size, req.seed, r, req.config)
            for p in req.partitions for n in req.sizes for b in req.backends for r in range(req.runs)]
    warmup()
    workers = _workers()
    if req.serial or workers == 1 or len(jobs) == 1:
        return [single_run(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(single_run, *zip(*jobs)))


def summarize(records: list[RunRecord]) -> list[dict]:
    """Mean/std per (dataset, backend, partitions, size), plus classic/fast speedup."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.dataset, rec.backend, rec.partitions, rec.n_train), []).append(rec)
    out = []
    for (ds, backend, parts, n), recs in groups.items():
        vals = np.array([r.value for r in recs])
        out.append({
            "dataset": ds, "backend": backend, "partitions": parts, "n_train": n,
            "runs": len(recs), "metric": recs[0].metric,
            "mean": float(vals.mean()), "std": float(vals.std()),
            "train_metric_mean": float(np.mean([r.train_metric for r in recs])),
            "train_seconds_mean": float(np.mean([r.train_seconds for r in recs])),
            "predict_seconds_mean": float(np.mean([r.predict_seconds for r in recs])),
            "n_planes": recs[0].n_planes, "plane_cells": recs[0].plane_cells,
            "stored_cells": recs[0].stored_cells,
        })
    by_key = {(s["dataset"], s["partitions"], s["n_train"], s["backend"]): s for s in out}
    for s in out:
        if s["backend"] == "fast":
            ref = by_key.get((s["dataset"], s["partitions"], s["n_train"], "classic"))
            if ref is not None and s["train_seconds_mean"] > 0:
                s["speedup_vs_classic"] = ref["train_seconds_mean"] / s["train_seconds_mean"]
    return out


RECORD_FIELDS = list(RunRecord.__dataclass_fields__)


def records_csv(records: list[RunRecord]) -> str:
    lines = [",".join(RECORD_FIELDS)]
    for rec in records:
        row = []
        for v in asdict(rec).values():
            row.append(format(v, ".6g") if isinstance(v, float) else str(v))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def summary_json(records: list[RunRecord]) -> str:
    return json.dumps(summarize(records), indent=2) + "\n"


def dataset_csv(data: Dataset) -> str:
    d = data.X.shape[1]
    lines = [",".join([f"x{j + 1}" for j in range(d)] + ["y"])]
    for x, y in zip(data.X, data.y):
        lines.append(",".join(format(v, ".17g") for v in (*x, y)))
    return "\n".join(lines) + "\n"


def read_dataset_csv(text: str, name: str = "csv") -> Dataset:
    rows = [line for line in text.splitlines() if line.strip()]
    header = rows[0].split(",")
    if header[-1].strip() != "y" or len(header) < 2:
        raise GenerationError("dataset CSV header must be x1,...,xD,y")
    data = np.array([[float(v) for v in line.split(",")] for line in rows[1:]], dtype=float)
    return Dataset(data[:, :-1], data[:, -1], name)


def memory_table(rsn_values=(64, 256)) -> list[dict]:
    """Stored cells per plane for each backend and resolution."""
    return [{"rsn": n, "backend": b, "cells": engine.plane_cells(b, Resolution(n, n))}
            for n in rsn_values for b in engine.BACKENDS]
