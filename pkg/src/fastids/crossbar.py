"""Behavioural model of the 3 x Rsn_x memristor crossbar that stores one Fast IDS plane.

Devices follow the linear ion-drift (HP) model with a hard boundary and an
explicit write threshold. A row's read chain produces

    z = v_bias - v_read * R_F1 / R_M

and read voltages map linearly onto output levels with ``v_read`` as full
scale. Writes read the centre column of each row, hold
``alpha * (v_train - z)`` on a capacitor, and turn it into a pulse train:
the centre column gets the full high time, neighbours get dyadic fractions
of it (1/2, 1/4, ...).

Device polarity: a positive device voltage widens the doped region
(lowers R_M). Rows are wired inverted, so a positive capacitor voltage
raises R_M and with it the read level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .core import ConfigError, Domain, InputError, Resolution
from .fast import LB, NP, UB, DescribingVectors, FastParams

ROW_NAMES = ("lb", "ub", "np")
ROW_POLARITY = -1.0


@dataclass(frozen=True)
class DeviceParams:
    depth: float = 10e-9        # m
    mobility: float = 1e-14     # m^2 s^-1 V^-1
    r_on: float = 2e3           # ohm
    r_off: float = 200e3        # ohm
    v_write_th: float = 1.0     # V
    dt: float = 1e-6            # s

    def __post_init__(self):
        if not 0 < self.r_on < self.r_off:
            raise ConfigError(f"need 0 < r_on < r_off, got {self.r_on}, {self.r_off}")
        for name in ("depth", "mobility", "dt", "v_write_th"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")

    @property
    def k(self) -> float:
        """Drift coefficient mu_v * R_on / D."""
        return self.mobility * self.r_on / self.depth

    @property
    def slope(self) -> float:
        """-dR_M/dw."""
        return (self.r_off - self.r_on) / self.depth


@dataclass(frozen=True)
class Circuit:
    v_read: float = 0.5
    v_bias: float | None = None       # defaults to v_read
    r_f1: float | None = None         # defaults to device r_on
    alpha1_gain: float = 0.6          # R_F2 / R_1, bounds rows
    alpha2_gain: float = 0.5          # R_F4 / R_2, narrow-path row
    m: int = 5                        # columns touched per write, centre included
    sigma: float | None = None        # if set, dyadic steps follow g(u) instead of one per column
    period: float = 10e-3             # s
    amplitude: float = 3.0            # V
    duty: float = 0.8
    duty_map: str = "compensated"     # or "linear"
    duty_gain: float | None = None    # linear map only; None -> calibrated at mid scale
    max_periods: int = 1              # PWM periods available per write

    def __post_init__(self):
        if self.duty_map not in ("compensated", "linear"):
            raise ConfigError(f"unknown duty map {self.duty_map!r}")
        if int(self.m) != self.m or self.m < 1 or self.m % 2 == 0:
            raise ConfigError(f"m must be a positive odd integer, got {self.m}")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if not 0 < self.duty <= 1 or not self.period > 0 or not self.amplitude > 0 or not self.v_read > 0:
            raise ConfigError("pwm period/amplitude/duty and v_read must be positive, duty <= 1")

    @classmethod
    def matching(cls, params: FastParams, **kw) -> "Circuit":
        """Circuit whose gains and blur mirror a software parameter set."""
        return cls(alpha1_gain=params.alpha1, alpha2_gain=params.alpha2, sigma=params.sigma,
                   m=2 * params.radius + 1, **kw)


def memristance(w, params: DeviceParams):
    """R_M for doped width ``w`` (scalar or array)."""
    frac = np.asarray(w, dtype=float) / params.depth
    out = params.r_on * frac + params.r_off * (1.0 - frac)
    return float(out) if out.ndim == 0 else out


def width_for(r_m: float, params: DeviceParams) -> float:
    """Doped width that gives memristance ``r_m``."""
    return (params.r_off - r_m) / params.slope


def apply_pulse(w, volts, duration, params: DeviceParams):
    """Drive device(s) at width ``w`` with ``volts`` for ``duration`` seconds.

    Sub-threshold pulses return the state untouched. Accepts scalars or
    equal-length arrays.
    """
    scalar = np.ndim(w) == 0
    w = np.atleast_1d(np.asarray(w, dtype=float))
    volts = np.broadcast_to(np.asarray(volts, dtype=float), w.shape)
    duration = np.broadcast_to(np.asarray(duration, dtype=float), w.shape)
    if not np.all(np.isfinite(volts)):
        raise InputError("pulse voltage must be finite")
    if np.any(duration < 0):
        raise InputError("pulse duration must be >= 0")
    active = np.abs(volts) >= params.v_write_th
    out = w.copy()
    if active.any():
        out[active] = _kernels.drift(w[active], np.ascontiguousarray(volts[active]),
                                     np.ascontiguousarray(duration[active]), params.dt,
                                     params.k, params.r_on, params.r_off, params.depth)
    return float(out[0]) if scalar else out


def flux_between(w0: float, w1: float, params: DeviceParams) -> float:
    """Flux (V*s) that moves a device from ``w0`` to ``w1`` under the HP model.

    The drift is linear in charge and R_M is linear in w, so the flux is
    the integral of R_M dq in closed form.
    """
    a = params.slope
    return (params.r_off * (w1 - w0) - 0.5 * a * (w1 * w1 - w0 * w0)) / params.k


@dataclass
class PulseEvent:
    row: str
    col: int
    volts: float
    duration: float


@dataclass
class CrossbarPlane:
    resolution: Resolution = Resolution()
    device: DeviceParams = DeviceParams()
    circuit: Circuit = Circuit()
    input_domain: Domain | None = None
    output_domain: Domain | None = None
    w: np.ndarray = None  # (3, rsn_x) doped widths, rows LB, UB, NP
    trace: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.circuit.v_bias is not None and self.circuit.v_bias != self.circuit.v_read:
            raise ConfigError("v_bias must equal v_read")
        if self.circuit.r_f1 is not None and self.circuit.r_f1 != self.device.r_on:
            raise ConfigError("R_F1 must equal R_on")
        if 2 * self.device.r_on > self.device.r_off:
            raise ConfigError("2 * R_on must not exceed R_off")
        if self.w is None:
            self.w = np.empty((3, self.resolution.rsn_x))
            self.w[UB] = 0.0
            self.w[LB] = self.device.depth
            self.w[NP] = width_for(2 * self.device.r_on, self.device)
        else:
            self.w = np.array(self.w, dtype=float)

    @property
    def n_cells(self) -> int:
        return self.w.size

    @property
    def v_bias(self) -> float:
        return self.circuit.v_read if self.circuit.v_bias is None else self.circuit.v_bias

    @property
    def r_f1(self) -> float:
        return self.device.r_on if self.circuit.r_f1 is None else self.circuit.r_f1

    def copy(self) -> "CrossbarPlane":
        return replace(self, w=self.w.copy(), trace=None if self.trace is None else list(self.trace))


def init_crossbar(resolution: Resolution = Resolution(), device: DeviceParams = DeviceParams(),
                  circuit: Circuit = Circuit(), **kw) -> CrossbarPlane:
    """UB row at R_off, LB row at R_on, NP row at 2 R_on."""
    return CrossbarPlane(resolution, device, circuit, **kw)


def _row_index(row) -> int:
    if isinstance(row, str):
        return ROW_NAMES.index(row.lower())
    return int(row)


def read_cell(cb: CrossbarPlane, row, col: int) -> float:
    """Read-chain output voltage z for one device (1-based ``col``)."""
    r = _row_index(row)
    if not 1 <= col <= cb.resolution.rsn_x:
        raise InputError(f"column {col} outside 1..{cb.resolution.rsn_x}")
    rm = memristance(cb.w[r, col - 1], cb.device)
    return cb.v_bias - cb.circuit.v_read * cb.r_f1 / rm


def read_rows(cb: CrossbarPlane) -> np.ndarray:
    """z for every device, shape (3, rsn_x)."""
    return cb.v_bias - cb.circuit.v_read * cb.r_f1 / memristance(cb.w, cb.device)


def read_spread(cb: CrossbarPlane, col: int) -> float:
    return read_cell(cb, "ub", col) - read_cell(cb, "lb", col)


def dyadic_schedule(circuit: Circuit) -> dict[int, float]:
    """Duration factor for every column offset a write touches.

    Without ``sigma`` each step away from the centre halves the duration.
    With ``sigma`` the factor at offset u is the power of two nearest to
    g(u) = exp(-u^2 / 2 sigma^2).
    """
    half = (circuit.m - 1) // 2
    sched = {0: 1.0}
    for u in range(1, half + 1):
        if circuit.sigma is None:
            k = u
        else:
            k = int(round(u * u / (2.0 * circuit.sigma**2) / math.log(2.0)))
        sched[u] = sched[-u] = 2.0 ** -k
    return dict(sorted(sched.items()))


def _level_to_r(level: float, cb: CrossbarPlane) -> float:
    frac = level / cb.resolution.rsn_y
    if frac >= 1.0:
        return cb.device.r_off
    return float(np.clip(cb.r_f1 / (1.0 - frac), cb.device.r_on, cb.device.r_off))


def linear_duty_gain(cb: CrossbarPlane) -> float:
    """Gain that makes the linear duty map exact for small steps at mid scale (R_M = 2 R_on)."""
    d, c = cb.device, cb.circuit
    r_ref = 2 * d.r_on
    rate = cb.resolution.rsn_y * cb.r_f1 / r_ref**2 * d.slope * d.k * c.amplitude / r_ref
    return cb.resolution.rsn_y / rate / (c.duty * c.period)


def _high_time(cb: CrossbarPlane, row: int, col: int, v_c: float, z: float) -> float:
    c = cb.circuit
    if c.duty_map == "linear":
        gain = c.duty_gain if c.duty_gain is not None else linear_duty_gain(cb)
        return gain * abs(v_c) / c.v_read * c.duty * c.period
    rsn_y = cb.resolution.rsn_y
    target = z / c.v_read * rsn_y + v_c / c.v_read * rsn_y
    target = min(max(target, 0.0), rsn_y)
    w0 = cb.w[row, col]
    w1 = width_for(_level_to_r(target, cb), cb.device)
    return abs(flux_between(w0, w1, cb.device)) / c.amplitude


def max_high_time(circuit: Circuit) -> float:
    return circuit.max_periods * circuit.duty * circuit.period


def write_sample(cb: CrossbarPlane, xq: int, y_level: float) -> CrossbarPlane:
    """Train the crossbar on one sample at column ``xq`` and output level ``y_level``.

    All three centre reads happen before any device is driven. Updates
    ``cb`` in place and returns it.
    """
    res = cb.resolution
    if int(xq) != xq or not 1 <= xq <= res.rsn_x:
        raise InputError(f"input level {xq} outside 1..{res.rsn_x}")
    if not 0 <= y_level <= res.rsn_y:
        raise InputError(f"output level {y_level} outside 0..{res.rsn_y}")
    c = cb.circuit
    col = int(xq) - 1
    v_train = c.v_read * y_level / res.rsn_y
    z = read_rows(cb)[:, col]
    gains = {LB: c.alpha1_gain, UB: c.alpha1_gain, NP: c.alpha2_gain}
    sched = dyadic_schedule(c)
    for row in (LB, UB, NP):
        v_c = gains[row] * (v_train - z[row])
        if v_c == 0.0:
            continue
        t_center = min(_high_time(cb, row, col, v_c, z[row]), max_high_time(c))
        if t_center <= 0.0:
            continue
        volts = ROW_POLARITY * math.copysign(c.amplitude, v_c)
        cols, durs = [], []
        for u, factor in sched.items():
            x = col + u
            if 0 <= x < res.rsn_x:
                cols.append(x)
                durs.append(t_center * factor)
        cols = np.array(cols)
        durs = np.array(durs)
        cb.w[row, cols] = apply_pulse(cb.w[row, cols], volts, durs, cb.device)
        if cb.trace is not None:
            cb.trace.extend(PulseEvent(ROW_NAMES[row], int(x) + 1, volts, float(t))
                            for x, t in zip(cols, durs))
    return cb


def train_crossbar(cb: CrossbarPlane, samples, epochs: int = 1) -> CrossbarPlane:
    pairs = list(samples)
    for _ in range(epochs):
        for xq, yq in pairs:
            write_sample(cb, int(xq), float(yq))
    return cb


def read_vectors(cb: CrossbarPlane, params: FastParams | None = None) -> DescribingVectors:
    """Snapshot of the stored levels as software describing vectors."""
    if params is None:
        params = FastParams(cb.circuit.alpha1_gain, cb.circuit.alpha2_gain,
                            cb.circuit.sigma or 1.0)
    levels = read_rows(cb) / cb.circuit.v_read * cb.resolution.rsn_y
    return DescribingVectors(params, cb.resolution, cb.input_domain, cb.output_domain, levels)


def dump_csv(cb: CrossbarPlane, fmt: str = ".17g") -> str:
    """Memristance (ohm) per device: rows lb, ub, np by Rsn_x columns."""
    rm = memristance(cb.w, cb.device)
    return "\n".join(",".join(format(v, fmt) for v in row) for row in rm) + "\n"


def load_csv(text: str, template: CrossbarPlane) -> CrossbarPlane:
    rows = [line for line in text.splitlines() if line.strip()][:3]
    rm = np.array([[float(v) for v in line.split(",")] for line in rows])
    out = template.copy()
    out.w = width_for(rm, template.device)
    return out


def trace_csv(cb: CrossbarPlane) -> str:
    lines = ["row,col,volts,duration_s"]
    lines += [f"{e.row},{e.col},{e.volts:.6g},{e.duration:.6g}" for e in (cb.trace or [])]
    return "\n".join(lines) + "\n"
