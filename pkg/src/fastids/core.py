"""Domains, quantization and kernel shapes shared by every backend.

All public quantization indices are 1-based: level 1 is the lowest cell,
level ``levels`` the highest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class FastIdsError(Exception):
    """Base class for errors raised by this package."""


class InputError(FastIdsError, ValueError):
    """Bad data handed to an operation (out-of-range index, NaN, ...)."""


class ConfigError(FastIdsError, ValueError):
    """Invalid parameters or configuration."""


@dataclass(frozen=True)
class Domain:
    min: float
    max: float

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError(f"domain bounds must be finite, got [{self.min}, {self.max}]")
        if not self.max > self.min:
            raise ConfigError(f"domain needs min < max, got [{self.min}, {self.max}]")

    @property
    def width(self) -> float:
        return self.max - self.min

    @classmethod
    def from_values(cls, values) -> "Domain":
        """Tightest domain covering ``values``; widened if they are all equal."""
        values = np.asarray(values, dtype=float)
        lo, hi = float(values.min()), float(values.max())
        if hi <= lo:
            pad = max(abs(lo), 1.0) * 0.5
            lo, hi = lo - pad, hi + pad
        return cls(lo, hi)


@dataclass(frozen=True)
class Resolution:
    rsn_x: int = 256
    rsn_y: int = 256

    def __post_init__(self):
        for name in ("rsn_x", "rsn_y"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ConfigError(f"{name} must be an integer >= 2, got {v}")


@dataclass(frozen=True)
class Sample:
    x: tuple
    y: float

    def __post_init__(self):
        x = tuple(float(v) for v in np.atleast_1d(self.x))
        if not x:
            raise InputError("sample needs at least one input")
        if not all(math.isfinite(v) for v in x) or not math.isfinite(self.y):
            raise InputError(f"non-finite sample {x} -> {self.y}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", float(self.y))


KERNEL_TAGS = ("gaussian", "pyramid", "cone")


@dataclass(frozen=True)
class KernelShape:
    tag: str = "gaussian"
    radius: int = 45
    sigma: float = 15.0

    def __post_init__(self):
        if self.tag not in KERNEL_TAGS:
            raise ConfigError(f"unknown kernel {self.tag!r}; expected one of {KERNEL_TAGS}")
        if int(self.radius) != self.radius or self.radius < 0:
            raise ConfigError(f"kernel radius must be a non-negative integer, got {self.radius}")
        if self.tag == "gaussian" and not self.sigma > 0:
            raise ConfigError(f"gaussian kernel needs sigma > 0, got {self.sigma}")

    @classmethod
    def gaussian(cls, sigma: float, radius: int | None = None) -> "KernelShape":
        """Gaussian drop truncated at ``ceil(3 * sigma)`` unless told otherwise."""
        if radius is None:
            radius = math.ceil(3 * sigma)
        return cls("gaussian", int(radius), float(sigma))


def _check_levels(levels: int) -> None:
    if int(levels) != levels or levels < 2:
        raise ConfigError(f"levels must be an integer >= 2, got {levels}")


def quantize(value: float, domain: Domain, levels: int) -> int:
    """Map ``value`` onto the 1-based grid ``1..levels`` over ``domain``.

    Values at or beyond the bounds clamp to the first/last level.
    """
    _check_levels(levels)
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"cannot quantize non-finite value {value}")
    if value <= domain.min:
        return 1
    if value >= domain.max:
        return int(levels)
    idx = math.floor((value - domain.min) * levels / domain.width) + 1
    return int(min(max(idx, 1), levels))


def quantize_array(values, domain: Domain, levels: int) -> np.ndarray:
    """Vectorised :func:`quantize`; returns an int64 array of 1-based levels."""
    _check_levels(levels)
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputError("cannot quantize non-finite values")
    idx = np.floor((values - domain.min) * levels / domain.width).astype(np.int64) + 1
    idx = np.where(values <= domain.min, 1, idx)
    idx = np.where(values >= domain.max, levels, idx)
    return np.clip(idx, 1, levels)


def dequantize(index: int, domain: Domain, levels: int) -> float:
    """Centre of cell ``index`` in domain units."""
    _check_levels(levels)
    if int(index) != index or not 1 <= index <= levels:
        raise InputError(f"level {index} outside 1..{levels}")
    return domain.min + (index - 0.5) * domain.width / levels


def gaussian_weight(u, sigma: float):
    """exp(-u^2 / (2 sigma^2)); works on scalars and arrays."""
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    u = np.asarray(u, dtype=float)
    out = np.exp(-(u * u) / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def make_kernel(shape: KernelShape) -> np.ndarray:
    """Ink-drop weight table of size (2R+1) x (2R+1).

    ``table[R + u, R + v]`` is the weight at input offset ``u`` and output
    offset ``v``. The centre is always 1.
    """
    R = shape.radius
    u = np.arange(-R, R + 1, dtype=float)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    if shape.tag == "gaussian":
        table = np.exp(-(uu**2 + vv**2) / (2.0 * shape.sigma**2))
    elif shape.tag == "pyramid":
        table = 1.0 - np.maximum(np.abs(uu), np.abs(vv)) / (R + 1)
    else:
        table = np.maximum(0.0, 1.0 - np.sqrt(uu**2 + vv**2) / (R + 1))
    return np.clip(table, 0.0, 1.0)


def as_xy(samples: Sequence) -> tuple[np.ndarray, np.ndarray]:
    """Split a sample sequence (``Sample`` objects or ``(x, y)`` pairs) into X, y arrays."""
    xs, ys = [], []
    for s in samples:
        if isinstance(s, Sample):
            xs.append(s.x)
            ys.append(s.y)
        else:
            x, y = s
            xs.append(np.atleast_1d(np.asarray(x, dtype=float)))
            ys.append(float(y))
    X = np.asarray(xs, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X, np.asarray(ys, dtype=float)


def as_pairs(samples, dtype=float) -> np.ndarray:
    """``(n, 2)`` array from an array or any iterable of ``(xq, yq)`` pairs."""
    if not isinstance(samples, np.ndarray):
        samples = list(samples)
    return np.asarray(samples, dtype=dtype).reshape(-1, 2)
