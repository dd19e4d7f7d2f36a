"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's compiled kernels; each function is a
direct loop over the defining formula.
"""
import math

import numpy as np


def quantize_ref(value, lo, hi, levels):
    if value <= lo:
        return 1
    if value >= hi:
        return levels
    return min(max(math.floor((value - lo) * levels / (hi - lo)) + 1, 1), levels)


def stamp_ref(darkness, kernel_fn, R, xq, yq):
    """One drop at 1-based (xq, yq); kernel_fn(u, v) gives the weight."""
    nx, ny = darkness.shape
    out = darkness.copy()
    for u in range(-R, R + 1):
        for v in range(-R, R + 1):
            x, y = xq + u, yq + v
            if 1 <= x <= nx and 1 <= y <= ny:
                out[x - 1, y - 1] += kernel_fn(u, v)
    return out


def median_ref(column):
    """Smallest 1-based b with cumulative darkness >= half the total; None if white."""
    total = sum(column)
    if total <= 0:
        return None
    acc = 0.0
    for b, d in enumerate(column, 1):
        acc += d
        if acc >= 0.5 * total:
            return b
    return len(column)


def spread_ref(column, threshold):
    hits = [y for y, d in enumerate(column, 1) if d > threshold]
    if not hits:
        return None
    return max(hits) - min(hits)


def update_ref(values, xq, yq, a1, a2, sigma, radius, rsn_y):
    """One describing-vector update, written out per the defining equations."""
    lb, ub, npv = (list(map(float, row)) for row in values)
    n = len(lb)
    c = xq - 1
    d_lb, d_ub, d_np = yq - lb[c], yq - ub[c], yq - npv[c]
    for u in range(-radius, radius + 1):
        x = c + u
        if not 0 <= x < n:
            continue
        g = math.exp(-u * u / (2.0 * sigma * sigma))
        lb[x] = min(max(lb[x] + a1 * d_lb * g, 0.0), rsn_y)
        ub[x] = min(max(ub[x] + a1 * d_ub * g, 0.0), rsn_y)
        npv[x] = min(max(npv[x] + a2 * d_np * g, 0.0), rsn_y)
    return np.array([lb, ub, npv])


def blend_ref(psi, spreads):
    inv = [1.0 / s for s in spreads]
    total = sum(inv)
    betas = [v / total for v in inv]
    return sum(b * p for b, p in zip(betas, psi)), betas


def fvu_ref(pred, truth):
    mean = sum(truth) / len(truth)
    num = sum((p - t) ** 2 for p, t in zip(pred, truth))
    den = sum((t - mean) ** 2 for t in truth)
    return num / den


def drift_ref(w, volts, duration, dt, k, r_on, r_off, depth):
    """Explicit Euler on dw/dt = k * V / R_M(w) with a hard clamp."""
    t = 0.0
    while t < duration - 1e-18:
        h = min(dt, duration - t)
        rm = r_on * w / depth + r_off * (1 - w / depth)
        w = min(max(w + k * volts / rm * h, 0.0), depth)
        t += h
    return w
