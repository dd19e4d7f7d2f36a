"""Active Learning Method engine.

A D-input model is split into one single-input subsystem per input. Each
input's subsystem keeps a separate plane for every cell of the joint
partition of the *other* inputs. Prediction reads a narrow path and a
spread from the selected plane of every input and blends the narrow paths
with weights proportional to inverse spread.

The plane backend is pluggable: ``classic`` (dense darkness matrix),
``fast`` (describing vectors) or ``crossbar`` (simulated memristor rows).
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classic, crossbar, fast
from .core import (ConfigError, Domain, FastIdsError, InputError, KernelShape, Resolution,
                   as_xy, quantize_array)

BACKENDS = ("classic", "fast", "crossbar")
MODEL_FILE = "model.json"


@dataclass
class AlmConfig:
    backend: str = "fast"
    rsn_x: int = 256
    rsn_y: int = 256
    sigma: float = 15.0
    alpha1: float = 0.01
    alpha2: float = 0.95
    radius: int | None = None           # neighbourhood / drop radius, default ceil(3 sigma)
    kernel: str = "gaussian"            # classic drop shape
    threshold: float = 0.0              # classic spread threshold T
    partitions: tuple = (1,)            # per input; a single value is broadcast
    partition_mode: str = "uniform"     # or "random"
    epochs: int = 1
    seed: int | None = None
    spread_floor: float = 1.0
    target_error: float | None = None   # T1, training FVU goal for auto partitioning
    min_density: int = 5                # T2, min samples per plane when auto partitioning
    auto_partition: bool = False
    max_partitions: int = 16
    input_domains: tuple | None = None  # ((min, max), ...); default from data
    output_domain: tuple | None = None  # (min, max); default from data
    duty_map: str = "compensated"       # crossbar only

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.partition_mode not in ("uniform", "random"):
            raise ConfigError(f"partition_mode must be uniform or random, got {self.partition_mode!r}")
        if isinstance(self.partitions, (int, np.integer)):
            self.partitions = (int(self.partitions),)
        self.partitions = tuple(int(p) for p in self.partitions)
        if any(p < 1 for p in self.partitions):
            raise ConfigError(f"partition counts must be >= 1, got {self.partitions}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ConfigError(f"epochs must be a positive integer, got {self.epochs}")
        if not self.spread_floor > 0:
            raise ConfigError("spread_floor must be positive")
        if self.max_partitions < 1 or self.min_density < 0:
            raise ConfigError("max_partitions must be >= 1 and min_density >= 0")
        self.resolution  # validates rsn values
        self.fast_params  # validates alphas / sigma

    @property
    def resolution(self) -> Resolution:
        return Resolution(self.rsn_x, self.rsn_y)

    @property
    def fast_params(self) -> fast.FastParams:
        return fast.FastParams(self.alpha1, self.alpha2, self.sigma, self.radius)

    @property
    def kernel_shape(self) -> KernelShape:
        radius = self.radius if self.radius is not None else math.ceil(3 * self.sigma)
        return KernelShape(self.kernel, radius, self.sigma)

    def counts_for(self, dim: int) -> tuple:
        if len(self.partitions) == 1:
            return self.partitions * dim
        if len(self.partitions) != dim:
            raise ConfigError(f"{len(self.partitions)} partition counts for {dim} inputs")
        return self.partitions

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AlmConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("input_domains",):
            if d.get(key) is not None:
                d[key] = tuple(tuple(v) for v in d[key])
        if d.get("output_domain") is not None:
            d["output_domain"] = tuple(d["output_domain"])
        if "partitions" in d and isinstance(d["partitions"], list):
            d["partitions"] = tuple(d["partitions"])
        return cls(**d)


@dataclass(frozen=True)
class PartitionScheme:
    domains: tuple           # Domain per input
    cuts: tuple              # per input, strictly increasing interior cut points
    mode: str = "uniform"
    seed: int | None = None

    def __post_init__(self):
        if len(self.domains) != len(self.cuts):
            raise ConfigError("one cut list per input domain required")
        for dom, cut in zip(self.domains, self.cuts):
            c = np.asarray(cut, dtype=float)
            if c.size and (np.any(np.diff(c) <= 0) or c[0] <= dom.min or c[-1] >= dom.max):
                raise ConfigError(f"cuts {cut} must be strictly increasing inside [{dom.min}, {dom.max}]")

    @property
    def dim(self) -> int:
        return len(self.domains)

    @property
    def counts(self) -> tuple:
        return tuple(len(c) + 1 for c in self.cuts)

    def n_cells(self, i: int) -> int:
        """Number of planes for (0-based) input ``i``."""
        return int(np.prod([p for j, p in enumerate(self.counts) if j != i], dtype=np.int64))

    def to_dict(self) -> dict:
        return {"domains": [[d.min, d.max] for d in self.domains],
                "cuts": [list(c) for c in self.cuts], "mode": self.mode, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionScheme":
        return cls(tuple(Domain(*b) for b in d["domains"]),
                   tuple(tuple(c) for c in d["cuts"]), d["mode"], d["seed"])


def make_scheme(domains: Sequence[Domain], counts: Sequence[int], mode: str = "uniform",
                seed: int | None = None) -> PartitionScheme:
    """Cut each input domain into ``counts[i]`` cells, evenly or at random points."""
    rng = np.random.default_rng(seed)
    cuts = []
    for dom, p in zip(domains, counts):
        if p == 1:
            cuts.append(())
        elif mode == "uniform":
            cuts.append(tuple(dom.min + k * dom.width / p for k in range(1, p)))
        else:
            while True:
                pts = np.sort(rng.uniform(dom.min, dom.max, p - 1))
                if np.all(np.diff(pts) > 0) and pts[0] > dom.min and pts[-1] < dom.max:
                    break
            cuts.append(tuple(float(v) for v in pts))
    return PartitionScheme(tuple(domains), tuple(cuts), mode, seed)


def _cell_digits(scheme: PartitionScheme, X: np.ndarray) -> np.ndarray:
    return np.stack([np.searchsorted(np.asarray(c, dtype=float), X[:, j], side="right")
                     for j, c in enumerate(scheme.cuts)], axis=1)


def route_array(scheme: PartitionScheme, i: int, X) -> np.ndarray:
    """1-based plane cell for input ``i`` (0-based) of every row of ``X``.

    The cell enumerates the joint partition of all other inputs, first
    other input varying slowest.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != scheme.dim:
        raise InputError(f"expected {scheme.dim} inputs, got {X.shape[1]}")
    digits = _cell_digits(scheme, X)
    cell = np.zeros(X.shape[0], dtype=np.int64)
    for j, p in enumerate(scheme.counts):
        if j == i:
            continue
        cell = cell * p + digits[:, j]
    return cell + 1


def route(scheme: PartitionScheme, i: int, x) -> int:
    """Plane cell of input ``i`` (1-based) for one input vector ``x``."""
    return int(route_array(scheme, i - 1, [x])[0])


@dataclass
class AlmModel:
    config: AlmConfig
    scheme: PartitionScheme
    output_domain: Domain
    planes: dict = field(default_factory=dict)   # (i, cell), both 1-based -> plane
    n_train: int = 0

    @property
    def backend(self) -> str:
        return self.config.backend

    @property
    def dim(self) -> int:
        return self.scheme.dim

    @property
    def input_domains(self) -> tuple:
        return self.scheme.domains

    def plane_count(self) -> int:
        return len(self.planes)

    def stored_cells(self) -> int:
        return sum(p.n_cells for p in self.planes.values())


def plane_cells(backend: str, resolution: Resolution) -> int:
    """Memory cells one plane needs: Rsn_x * Rsn_y dense, 3 * Rsn_x otherwise."""
    if backend == "classic":
        return resolution.rsn_x * resolution.rsn_y
    return 3 * resolution.rsn_x


def _new_plane(config: AlmConfig, in_dom: Domain, out_dom: Domain):
    res = config.resolution
    if config.backend == "classic":
        return classic.IdsPlane(in_dom, out_dom, res, config.kernel_shape, config.threshold)
    if config.backend == "fast":
        return fast.init_vectors(res, config.fast_params, in_dom, out_dom)
    circuit = crossbar.Circuit.matching(config.fast_params, duty_map=config.duty_map)
    return crossbar.init_crossbar(res, circuit=circuit, input_domain=in_dom, output_domain=out_dom)


def _train(config: AlmConfig, plane, xs: np.ndarray, ys: np.ndarray):
    pairs = np.column_stack([xs, ys])
    if config.backend == "classic":
        # stamping is additive; further epochs only rescale the darkness
        for _ in range(config.epochs):
            classic.train_plane(plane, pairs)
    elif config.backend == "fast":
        fast.train_vectors(plane, pairs, config.epochs)
    else:
        crossbar.train_crossbar(plane, pairs, config.epochs)


def _domains(config: AlmConfig, X: np.ndarray, y: np.ndarray) -> tuple[tuple, Domain]:
    if config.input_domains is not None:
        if len(config.input_domains) != X.shape[1]:
            raise InputError(f"{len(config.input_domains)} input domains for {X.shape[1]} inputs")
        ins = tuple(Domain(*d) for d in config.input_domains)
    else:
        ins = tuple(Domain.from_values(X[:, j]) for j in range(X.shape[1]))
    out = Domain(*config.output_domain) if config.output_domain is not None else Domain.from_values(y)
    return ins, out


def _fit_fixed(X: np.ndarray, y: np.ndarray, config: AlmConfig, counts: tuple) -> AlmModel:
    ins, out = _domains(config, X, y)
    scheme = make_scheme(ins, counts, config.partition_mode, config.seed)
    res = config.resolution
    yq = quantize_array(y, out, res.rsn_y)
    model = AlmModel(config, scheme, out, n_train=len(y))
    for i in range(X.shape[1]):
        xq = quantize_array(X[:, i], ins[i], res.rsn_x)
        cells = route_array(scheme, i, X)
        for cell in range(1, scheme.n_cells(i) + 1):
            plane = _new_plane(config, ins[i], out)
            mask = cells == cell
            if mask.any():
                _train(config, plane, xq[mask], yq[mask])
            model.planes[(i + 1, cell)] = plane
    return model


def _min_density(X: np.ndarray, scheme: PartitionScheme) -> int:
    lowest = None
    for i in range(scheme.dim):
        counts = np.bincount(route_array(scheme, i, X), minlength=scheme.n_cells(i) + 1)[1:]
        low = int(counts.min())
        lowest = low if lowest is None else min(lowest, low)
    return lowest


def fit(dataset, config: AlmConfig) -> AlmModel:
    """Train an ALM model on ``dataset`` (samples or ``(X, y)`` arrays)."""
    X, y = _as_arrays(dataset)
    if len(y) == 0:
        raise InputError("cannot fit an empty dataset")
    dim = X.shape[1]
    if not config.auto_partition:
        return _fit_fixed(X, y, config, config.counts_for(dim))

    counts = (1,) * dim
    model = _fit_fixed(X, y, config, counts)
    goal = config.target_error
    while True:
        if goal is None or math.isinf(goal):
            return model
        if len(y) >= 2 and np.ptp(y) > 0 and _train_fvu(model, X, y) <= goal:
            return model
        nxt = tuple(min(2 * p, config.max_partitions) for p in counts)
        if nxt == counts:
            return model
        ins, _ = _domains(config, X, y)
        trial = make_scheme(ins, nxt, config.partition_mode, config.seed)
        if _min_density(X, trial) < config.min_density:
            return model
        counts = nxt
        model = _fit_fixed(X, y, config, counts)


def _train_fvu(model: AlmModel, X, y) -> float:
    pred = predict_many(model, X)
    return float(np.sum((pred - y) ** 2) / np.sum((y - y.mean()) ** 2))


def _as_arrays(dataset) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(dataset, tuple) and len(dataset) == 2 and isinstance(dataset[0], np.ndarray):
        X = np.asarray(dataset[0], dtype=float)
        y = np.asarray(dataset[1], dtype=float)
        if X.ndim == 1:
            X = X[:, None]
    else:
        X, y = as_xy(list(dataset))
    if X.shape[0] != y.shape[0]:
        raise InputError("inputs and outputs differ in length")
    if X.size and not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise InputError("dataset contains non-finite values")
    return X, y


def _plane_features(model: AlmModel, plane, xq: np.ndarray):
    floor = model.config.spread_floor
    if model.backend == "classic":
        psi, s = classic.features(plane, xq)
        return psi, np.maximum(s, floor)
    if model.backend == "crossbar":
        plane = crossbar.read_vectors(plane, model.config.fast_params)
    return fast.features(plane, xq, floor)


def input_features(model: AlmModel, X) -> tuple[np.ndarray, np.ndarray]:
    """Narrow paths and spreads (levels) per row and input, each (n, D)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.dim:
        raise InputError(f"model has {model.dim} inputs, got {X.shape[1]}")
    res = model.config.resolution
    psi = np.empty(X.shape)
    spr = np.empty(X.shape)
    for i in range(model.dim):
        xq = quantize_array(X[:, i], model.input_domains[i], res.rsn_x)
        cells = route_array(model.scheme, i, X)
        for cell in np.unique(cells):
            rows = cells == cell
            p, s = _plane_features(model, model.planes[(i + 1, int(cell))], xq[rows])
            psi[rows, i] = p
            spr[rows, i] = s
    return psi, spr


def blend(psi: np.ndarray, spreads: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse-spread weights (rows sum to 1) and the weighted narrow path."""
    inv = 1.0 / np.asarray(spreads, dtype=float)
    beta = inv / inv.sum(axis=-1, keepdims=True)
    return beta, np.sum(beta * psi, axis=-1)


def level_to_output(level, domain: Domain, rsn_y: int):
    return domain.min + np.asarray(level) * domain.width / rsn_y


def predict_many(model: AlmModel, X) -> np.ndarray:
    psi, spr = input_features(model, X)
    _, level = blend(psi, spr)
    return level_to_output(level, model.output_domain, model.config.rsn_y)


def predict(model: AlmModel, x) -> float:
    """Model output (output units) for one input vector."""
    return float(predict_many(model, [np.atleast_1d(np.asarray(x, dtype=float))])[0])


def nearest_label(values, labels) -> np.ndarray:
    """Label nearest each value; ties go to the smaller label."""
    labels = np.sort(np.asarray(list(labels), dtype=float))
    if labels.size == 0:
        raise InputError("need at least one label")
    values = np.atleast_1d(np.asarray(values, dtype=float))
    dist = np.abs(values[:, None] - labels[None, :])
    return labels[np.argmin(dist, axis=1)]  # argmin keeps the first (smallest) on ties


def classify(model: AlmModel, x, labels) -> float:
    return float(nearest_label([predict(model, x)], labels)[0])


def classify_many(model: AlmModel, X, labels) -> np.ndarray:
    return nearest_label(predict_many(model, X), labels)


def mean_spreads(model: AlmModel) -> list[float]:
    """Mean spread over all columns and planes of each input; wider means less informative."""
    out = []
    res = model.config.resolution
    cols = np.arange(1, res.rsn_x + 1)
    for i in range(1, model.dim + 1):
        vals = [_plane_features(model, p, cols)[1].mean()
                for (j, _), p in model.planes.items() if j == i]
        out.append(float(np.mean(vals)))
    return out


def plane_filename(i: int, cell: int) -> str:
    return f"plane_i{i}_c{cell}.csv"


def dump_plane(model: AlmModel, i: int, cell: int, fmt: str = ".17g", fuzzy: bool = False) -> str:
    try:
        plane = model.planes[(i, cell)]
    except KeyError:
        raise InputError(f"model has no plane for input {i}, cell {cell}") from None
    if model.backend == "classic":
        return classic.dump_csv(plane, fmt)
    if model.backend == "fast":
        return fast.dump_csv(plane, fmt, fuzzy)
    return fast.dump_csv(crossbar.read_vectors(plane, model.config.fast_params), fmt, fuzzy)


def save_model(model: AlmModel, directory) -> Path:
    """Write ``model.json`` plus one CSV per plane into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    header = {
        "backend": model.backend,
        "config": model.config.to_dict(),
        "scheme": model.scheme.to_dict(),
        "output_domain": [model.output_domain.min, model.output_domain.max],
        "n_train": model.n_train,
        "planes": [[i, c] for (i, c) in sorted(model.planes)],
    }
    (d / MODEL_FILE).write_text(json.dumps(header, indent=2) + "\n")
    for (i, c), plane in sorted(model.planes.items()):
        if model.backend == "classic":
            text = classic.dump_csv(plane)
        elif model.backend == "fast":
            text = fast.dump_csv(plane)
        else:
            text = crossbar.dump_csv(plane)
        (d / plane_filename(i, c)).write_text(text)
    return d


def load_model(directory) -> AlmModel:
    d = Path(directory)
    try:
        header = json.loads((d / MODEL_FILE).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read model from {d}: {exc}") from exc
    config = AlmConfig.from_dict(header["config"])
    scheme = PartitionScheme.from_dict(header["scheme"])
    out = Domain(*header["output_domain"])
    model = AlmModel(config, scheme, out, n_train=header.get("n_train", 0))
    loaders = {"classic": classic.load_csv, "fast": fast.load_csv, "crossbar": crossbar.load_csv}
    for i, c in header["planes"]:
        template = _new_plane(config, scheme.domains[i - 1], out)
        path = d / plane_filename(i, c)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"missing plane file {path}") from exc
        model.planes[(i, c)] = loaders[config.backend](text, template)
    return model


__all__ = [
    "AlmConfig", "AlmModel", "PartitionScheme", "BACKENDS", "FastIdsError", "blend", "classify",
    "classify_many", "dump_plane", "fit", "input_features", "load_model", "make_scheme",
    "mean_spreads", "nearest_label", "plane_cells", "predict", "predict_many", "route",
    "route_array", "save_model",
]
