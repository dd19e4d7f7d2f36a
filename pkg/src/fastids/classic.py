"""The original Ink Drop Spread plane: a dense darkness matrix per (input, output) pair.

This is the reference baseline. It is deliberately the straightforward
dense implementation: every sample stamps a full 2-D drop, and features are
read off a column at query time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import Domain, InputError, KernelShape, Resolution, as_pairs, make_kernel


@dataclass
class IdsPlane:
    input_domain: Domain
    output_domain: Domain
    resolution: Resolution = Resolution()
    kernel: KernelShape = field(default_factory=lambda: KernelShape.gaussian(15.0))
    threshold: float = 0.0
    darkness: np.ndarray = None

    def __post_init__(self):
        shape = (self.resolution.rsn_x, self.resolution.rsn_y)
        if self.darkness is None:
            self.darkness = np.zeros(shape)
        else:
            self.darkness = np.asarray(self.darkness, dtype=float)
            if self.darkness.shape != shape:
                raise InputError(f"darkness shape {self.darkness.shape} != {shape}")
        if self.threshold < 0:
            raise InputError(f"spread threshold must be >= 0, got {self.threshold}")
        self._table = make_kernel(self.kernel)

    @property
    def n_cells(self) -> int:
        return self.darkness.size

    def copy(self) -> "IdsPlane":
        return IdsPlane(self.input_domain, self.output_domain, self.resolution,
                        self.kernel, self.threshold, self.darkness.copy())


def _check_point(plane: IdsPlane, xq, yq) -> None:
    res = plane.resolution
    if not 1 <= xq <= res.rsn_x:
        raise InputError(f"input level {xq} outside 1..{res.rsn_x}")
    if not 1 <= yq <= res.rsn_y:
        raise InputError(f"output level {yq} outside 1..{res.rsn_y}")


def ink_drop(plane: IdsPlane, xq: int, yq: int) -> IdsPlane:
    """Stamp one drop centred on (xq, yq); cells past the border are dropped."""
    _check_point(plane, xq, yq)
    _kernels.stamp_drops(plane.darkness, plane._table,
                         np.array([xq - 1], dtype=np.int64), np.array([yq - 1], dtype=np.int64))
    return plane


def train_plane(plane: IdsPlane, samples) -> IdsPlane:
    """Stamp every quantized ``(xq, yq)`` pair onto ``plane``."""
    pairs = as_pairs(samples, np.int64)
    if pairs.size == 0:
        return plane
    res = plane.resolution
    xs, ys = pairs[:, 0], pairs[:, 1]
    bad = (xs < 1) | (xs > res.rsn_x) | (ys < 1) | (ys > res.rsn_y)
    if bad.any():
        i = int(np.argmax(bad))
        raise InputError(f"sample {i} ({xs[i]}, {ys[i]}) outside the {res.rsn_x}x{res.rsn_y} grid")
    _kernels.stamp_drops(plane.darkness, plane._table, xs - 1, ys - 1)
    return plane


def white_level(rsn_y: int) -> int:
    """Feature value used for a column no drop has reached."""
    return math.ceil(rsn_y / 2)


def narrow_path(plane: IdsPlane, xq: int) -> int:
    """Weighted median of column ``xq``: smallest b with cumsum(b) >= half the column mass."""
    col = plane.darkness[xq - 1]
    total = col.sum()
    if total <= 0:
        return white_level(plane.resolution.rsn_y)
    cs = np.cumsum(col)
    return int(np.searchsorted(cs, 0.5 * total, side="left")) + 1


def spread(plane: IdsPlane, xq: int) -> int:
    """Width between the highest and lowest cells of column ``xq`` darker than the threshold."""
    hits = np.flatnonzero(plane.darkness[xq - 1] > plane.threshold)
    if hits.size == 0:
        return white_level(plane.resolution.rsn_y)
    return int(hits[-1] - hits[0])


def features(plane: IdsPlane, xq) -> tuple[np.ndarray, np.ndarray]:
    """Narrow path and spread for an array of input levels at once."""
    xq = np.asarray(xq, dtype=np.int64)
    cols = plane.darkness[xq - 1]
    rsn_y = plane.resolution.rsn_y
    totals = cols.sum(axis=1)
    cs = np.cumsum(cols, axis=1)
    npath = np.argmax(cs >= 0.5 * totals[:, None], axis=1) + 1
    above = cols > plane.threshold
    first = np.argmax(above, axis=1)
    last = rsn_y - 1 - np.argmax(above[:, ::-1], axis=1)
    sp = last - first
    white = white_level(rsn_y)
    npath = np.where(totals > 0, npath, white)
    sp = np.where(above.any(axis=1), sp, white)
    return npath.astype(float), sp.astype(float)


def dump_csv(plane: IdsPlane, fmt: str = ".17g") -> str:
    """Rsn_y rows by Rsn_x columns; row 1 is output level 1.

    The default format round-trips exactly; pass ``".6g"`` for reports.
    """
    lines = [",".join(format(v, fmt) for v in row) for row in plane.darkness.T]
    return "\n".join(lines) + "\n"


def load_csv(text: str, template: IdsPlane) -> IdsPlane:
    rows = [line for line in text.splitlines() if line.strip()]
    mat = np.array([[float(v) for v in line.split(",")] for line in rows])
    plane = template.copy()
    plane.darkness = np.ascontiguousarray(mat.T)
    return plane
