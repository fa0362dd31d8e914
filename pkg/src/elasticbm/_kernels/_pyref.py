"""Pure-numpy reference kernels for the hot path-simulation loops.

Every function here has a compiled twin in ``_fast.pyx`` with identical
arithmetic (same expressions, same evaluation order per path), so the two
backends produce numerically identical paths from the same random inputs.
Keep the expressions in sync when editing.
"""
import numpy as np


def bang_bang_chunk(y, s, env, kill_level, kill_step, step0, z, theta, dt):
    """Advance bang-bang paths dY = -theta*sgn(Y) dt + sqrt(2) dB through a
    chunk of pre-drawn normals ``z`` of shape (steps, n).

    In place: positions ``y``, Tanaka compensator sums ``s``, the monotone
    envelope ``env`` of the raw local time |Y| - S, and ``kill_step`` (first
    global step index at which env crossed ``kill_level``; -1 while alive).
    """
    m = z.shape[0]
    sq = np.sqrt(2.0 * dt)
    for j in range(m):
        sg = np.sign(y)
        yn = y + (-theta * sg * dt + sq * z[j])
        s += sg * (yn - y)
        y[:] = yn
        g = np.abs(y) - s
        np.maximum(env, g, out=env)
        newly = (kill_step < 0) & (env >= kill_level)
        if newly.any():
            kill_step[newly] = step0 + j + 1


def bang_bang_path(y0, z, theta, dt):
    """Single bang-bang trajectory; returns (positions, raw local time),
    each of length len(z) + 1 including the initial point."""
    n = z.shape[0]
    sq = np.sqrt(2.0 * dt)
    y_path = np.empty(n + 1)
    g_path = np.empty(n + 1)
    y = float(y0)
    s = 0.0
    y_path[0] = y
    g_path[0] = abs(y) - s
    for j in range(n):
        sg = 1.0 if y > 0.0 else (-1.0 if y < 0.0 else 0.0)
        yn = y + (-theta * sg * dt + sq * z[j])
        s = s + sg * (yn - y)
        y = yn
        y_path[j + 1] = y
        g_path[j + 1] = abs(y) - s
    return y_path, g_path


def bm_max_chunk(x, m, z, lu, mu, dt, bridge):
    """Advance drifted BM paths dX = mu dt + sqrt(2) dB and their running
    maxima through a chunk of normals ``z`` (steps, n).

    ``lu`` holds log-uniforms for the within-step bridge maximum draw
    M = (a + b + sqrt((b-a)^2 - 4 dt ln U)) / 2 (variance-rate-2 bridge);
    ignored when ``bridge`` is false.
    """
    msteps = z.shape[0]
    sq = np.sqrt(2.0 * dt)
    for j in range(msteps):
        xn = x + (mu * dt + sq * z[j])
        if bridge:
            ms = 0.5 * (x + xn + np.sqrt((xn - x) * (xn - x) - 4.0 * dt * lu[j]))
        else:
            ms = xn
        np.maximum(m, ms, out=m)
        x[:] = xn


def passage_chunk(h, lpass, k0, z, u, step, m_ig, sh_ig, t_target):
    """Accumulate subordinator increments and record first passage above
    ``t_target``.

    ``h`` holds running subordinator values, ``lpass`` the first-passage
    operational times (NaN while not yet passed).  Increments are inverse
    Gaussian with mean ``m_ig`` and shape ``sh_ig`` when ``m_ig > 0``, else
    the stable limit 0.5*step^2 / N^2.  Paths that already passed keep
    consuming randoms so the stream stays aligned across backends.
    """
    msteps = z.shape[0]
    m = m_ig
    sh = sh_ig
    with np.errstate(divide="ignore", over="ignore"):
        for j in range(msteps):
            yv = z[j] * z[j]
            if m > 0.0:
                a = m / (2.0 * sh)
                t1 = m * yv
                xx = m + a * (t1 - np.sqrt(4.0 * sh * t1 + t1 * t1))
                inc = np.where(u[j] <= m / (m + xx), xx, (m * m) / xx)
            else:
                inc = 0.5 * step * step / yv
            h += inc
            newly = np.isnan(lpass) & (h > t_target)
            if newly.any():
                lpass[newly] = (k0 + j + 1) * step
