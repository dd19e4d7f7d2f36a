"""Fast IDS: three describing vectors per plane instead of a dense darkness matrix.

Each plane keeps, per input level, a lower bound, an upper bound and a
narrow-path estimate of the output level. A training sample pulls all three
towards its output level, with a Gaussian falloff over neighbouring input
levels. The distance used for every neighbour is the one measured at the
sample's own column, and all three are read before anything is written.

Training is sequential: unlike the dense plane, the result depends on the
order samples are presented in.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import ConfigError, Domain, InputError, Resolution, as_pairs, gaussian_weight

LB, UB, NP = 0, 1, 2

SPREAD_FLOOR = 1.0


@dataclass(frozen=True)
class FastParams:
    alpha1: float = 0.6
    alpha2: float = 0.5
    sigma: float = 15.0
    radius: int | None = None  # defaults to ceil(3 * sigma)

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not 0 < a <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {a}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.radius is None:
            object.__setattr__(self, "radius", math.ceil(3 * self.sigma))
        elif int(self.radius) != self.radius or self.radius < 0:
            raise ConfigError(f"radius must be a non-negative integer, got {self.radius}")

    def weights(self) -> np.ndarray:
        """Neighbour weights g(u) for u = -radius..radius."""
        return _weights(self.radius, self.sigma)


@functools.lru_cache(maxsize=64)
def _weights(radius: int, sigma: float) -> np.ndarray:
    w = np.asarray(gaussian_weight(np.arange(-radius, radius + 1), sigma), dtype=float).reshape(-1)
    w.flags.writeable = False
    return w


@dataclass
class DescribingVectors:
    params: FastParams = field(default_factory=FastParams)
    resolution: Resolution = Resolution()
    input_domain: Domain | None = None
    output_domain: Domain | None = None
    values: np.ndarray = None  # (3, rsn_x), rows LB, UB, NP

    def __post_init__(self):
        if self.values is None:
            rsn_y = float(self.resolution.rsn_y)
            self.values = np.empty((3, self.resolution.rsn_x))
            self.values[LB] = 0.0
            self.values[UB] = rsn_y
            self.values[NP] = rsn_y / 2
        else:
            self.values = np.array(self.values, dtype=float)
            if self.values.shape != (3, self.resolution.rsn_x):
                raise InputError(f"vector block shape {self.values.shape} != (3, {self.resolution.rsn_x})")

    @property
    def c_lb(self) -> np.ndarray:
        return self.values[LB]

    @property
    def c_ub(self) -> np.ndarray:
        return self.values[UB]

    @property
    def c_np(self) -> np.ndarray:
        return self.values[NP]

    @property
    def n_cells(self) -> int:
        return self.values.size

    def copy(self) -> "DescribingVectors":
        return DescribingVectors(self.params, self.resolution, self.input_domain,
                                 self.output_domain, self.values.copy())


def init_vectors(resolution: Resolution, params: FastParams | None = None,
                 input_domain: Domain | None = None,
                 output_domain: Domain | None = None) -> DescribingVectors:
    """Untrained vectors: bounds at 0 and Rsn_y, narrow path at Rsn_y / 2."""
    return DescribingVectors(params or FastParams(), resolution, input_domain, output_domain)


def _alphas(params: FastParams) -> np.ndarray:
    return np.array([params.alpha1, params.alpha1, params.alpha2])


def update(v: DescribingVectors, xq: int, yq: float) -> DescribingVectors:
    """Pull the three vectors around column ``xq`` towards output level ``yq``.

    Updates ``v`` in place and returns it. ``yq`` may be fractional.
    """
    res = v.resolution
    if int(xq) != xq or not 1 <= xq <= res.rsn_x:
        raise InputError(f"input level {xq} outside 1..{res.rsn_x}")
    if not 0 <= yq <= res.rsn_y:
        raise InputError(f"output level {yq} outside 0..{res.rsn_y}")
    _kernels.fold_updates(v.values, _alphas(v.params), v.params.weights(),
                          np.array([int(xq) - 1], dtype=np.int64), np.array([float(yq)]),
                          float(res.rsn_y), 1)
    return v


def train_vectors(v: DescribingVectors, samples, epochs: int = 1) -> DescribingVectors:
    """Apply :func:`update` for each ``(xq, yq)`` pair in order, ``epochs`` times over."""
    if int(epochs) != epochs or epochs < 1:
        raise ConfigError(f"epochs must be a positive integer, got {epochs}")
    pairs = as_pairs(samples)
    if pairs.size == 0:
        return v
    res = v.resolution
    xs, ys = pairs[:, 0], pairs[:, 1]
    bad = (xs < 1) | (xs > res.rsn_x) | (xs != np.round(xs)) | (ys < 0) | (ys > res.rsn_y)
    if bad.any():
        i = int(np.argmax(bad))
        raise InputError(f"sample {i} ({xs[i]}, {ys[i]}) out of range")
    _kernels.fold_updates(v.values, _alphas(v.params), v.params.weights(),
                          xs.astype(np.int64) - 1, np.ascontiguousarray(ys),
                          float(res.rsn_y), int(epochs))
    return v


def narrow_path_fast(v: DescribingVectors, xq: int) -> float:
    return float(v.values[NP, xq - 1])


def spread_fast(v: DescribingVectors, xq: int, floor: float = SPREAD_FLOOR) -> float:
    """Upper minus lower bound at ``xq``, never below ``floor`` levels."""
    return max(float(v.values[UB, xq - 1] - v.values[LB, xq - 1]), floor)


def features(v: DescribingVectors, xq, floor: float = SPREAD_FLOOR) -> tuple[np.ndarray, np.ndarray]:
    idx = np.asarray(xq, dtype=np.int64) - 1
    vals = v.values[:, idx]
    return vals[NP].copy(), np.maximum(vals[UB] - vals[LB], floor)


def fuzzy_output(v: DescribingVectors, xq: int, scale: float = 1.0) -> tuple[float, float]:
    """(centre, width) of the fuzzy output at ``xq``; width is ``scale`` times the spread."""
    return narrow_path_fast(v, xq), scale * spread_fast(v, xq)


def dump_csv(v: DescribingVectors, fmt: str = ".17g", fuzzy: bool = False) -> str:
    """Three rows (c_lb, c_ub, c_np) by Rsn_x columns.

    With ``fuzzy`` set, a fourth row holds ``centre:width`` per column.
    """
    lines = [",".join(format(x, fmt) for x in row) for row in v.values]
    if fuzzy:
        cells = []
        for xq in range(1, v.resolution.rsn_x + 1):
            c, w = fuzzy_output(v, xq)
            cells.append(f"{format(c, fmt)}:{format(w, fmt)}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_csv(text: str, template: DescribingVectors) -> DescribingVectors:
    rows = [line for line in text.splitlines() if line.strip()][:3]
    out = template.copy()
    out.values = np.array([[float(x) for x in line.split(",")] for line in rows])
    return out
