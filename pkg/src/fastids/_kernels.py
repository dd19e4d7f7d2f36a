"""Compiled inner loops for the per-sample training paths.

Both backends fold their update over samples one at a time in compiled
code, so the classic/fast timing comparison measures the work per sample
rather than interpreter overhead. Indices here are 0-based.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def stamp_drops(darkness, kernel, xs, ys):
    nx, ny = darkness.shape
    R = kernel.shape[0] // 2
    for s in range(xs.shape[0]):
        xc = xs[s]
        yc = ys[s]
        for u in range(-R, R + 1):
            x = xc + u
            if x < 0 or x >= nx:
                continue
            for v in range(-R, R + 1):
                y = yc + v
                if y < 0 or y >= ny:
                    continue
                darkness[x, y] += kernel[u + R, v + R]


@numba.njit(cache=True)
def fold_updates(vectors, alphas, weights, xs, ys, upper, epochs):
    """Apply the describing-vector update for every sample, ``epochs`` times.

    ``vectors`` is (3, rsn_x) in the row order (lb, ub, np); ``alphas`` the
    matching per-row learning rates; ``weights[r + u]`` the neighbour weight.
    """
    nx = vectors.shape[1]
    r = weights.shape[0] // 2
    dist = np.empty(3)
    for _ in range(epochs):
        for s in range(xs.shape[0]):
            xc = xs[s]
            y = ys[s]
            for k in range(3):
                dist[k] = alphas[k] * (y - vectors[k, xc])
            lo = max(xc - r, 0)
            hi = min(xc + r, nx - 1)
            for x in range(lo, hi + 1):
                g = weights[x - xc + r]
                for k in range(3):
                    v = vectors[k, x] + dist[k] * g
                    if v < 0.0:
                        v = 0.0
                    elif v > upper:
                        v = upper
                    vectors[k, x] = v


@numba.njit(cache=True)
def drift(w, volts, durations, dt, k_mob, r_on, r_off, depth):
    """Explicit fixed-step integration of the linear ion-drift model.

    Each device ``i`` sees ``volts[i]`` for ``durations[i]`` seconds; the
    final partial step is shortened so total time is exact. ``w`` is
    clamped to ``[0, depth]`` after every step.
    """
    out = w.copy()
    for i in range(out.shape[0]):
        t_left = durations[i]
        v = volts[i]
        wi = out[i]
        while t_left > 0.0:
            h = dt if t_left > dt else t_left
            rm = r_on * (wi / depth) + r_off * (1.0 - wi / depth)
            wi += k_mob * (v / rm) * h
            if wi < 0.0:
                wi = 0.0
            elif wi > depth:
                wi = depth
            t_left -= h
        out[i] = wi
    return out
