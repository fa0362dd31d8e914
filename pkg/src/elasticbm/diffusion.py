"""Path simulation for drifted Brownian motion (variance rate 2), running
maxima with exact bridge correction, the bang-bang SDE whose absolute value
is a reflecting drifted Brownian motion, semimartingale local time, and
elastic killing.

Conventions fixed here and carried through every formula:
  * diffusion variance rate is 2 (generator d^2/dx^2), so increments are
    mu*dt + sqrt(2*dt)*N;
  * the bang-bang drift magnitude is the full |mu| (dY = -theta*sgn(Y) dt
    + sqrt(2) dB with theta = +/-mu), which is what makes |Y| a reflecting
    Brownian motion with drift -/+mu at this variance rate;
  * local time is the semimartingale (Tanaka) local time at zero, normalised
    so that for mu = 0 it equals in law the inverse 1/2-stable subordinator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, _mc
from .randtime import RngStream, _gen

__all__ = [
    "DIFFUSION_VARIANCE_RATE",
    "DiffusionPath",
    "LocalTimeAccumulator",
    "simulate_bm",
    "running_max",
    "bm_max_samples",
    "simulate_bang_bang",
    "bang_bang_gamma_samples",
    "elastic_kill",
    "elastic_survival_curve",
]

DIFFUSION_VARIANCE_RATE = 2.0


@dataclass(frozen=True)
class DiffusionPath:
    """A sampled diffusion trajectory on a uniform grid."""

    grid: np.ndarray
    values: np.ndarray
    drift: float

    def __post_init__(self):
        g = np.asarray(self.grid, float)
        v = np.asarray(self.values, float)
        if g.shape != v.shape or g.ndim != 1 or g.size < 2:
            raise ValueError("grid and values must be equal-length 1d arrays")
        steps = np.diff(g)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-15):
            raise ValueError("grid must be uniform")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass(frozen=True)
class LocalTimeAccumulator:
    """Local time at zero along a path: raw discrete-Tanaka values and their
    non-decreasing (monotone envelope) clip."""

    grid: np.ndarray
    gamma: np.ndarray
    gamma_raw: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        g = np.asarray(self.gamma, float)
        if g[0] != 0.0 or np.any(np.diff(g) < 0):
            raise ValueError("gamma must start at 0 and be non-decreasing")


def _steps(t_end: float, dt: float) -> int:
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_end < dt:
        raise ValueError(f"t_end must be >= dt, got {t_end}")
    return int(round(t_end / dt))


def simulate_bm(mu: float, x0: float, t_end: float, dt: float, rng) -> DiffusionPath:
    """Drifted Brownian motion by exact Gaussian increments mu*dt + sqrt(2 dt) N."""
    if x0 < 0:
        raise ValueError(f"x0 must be >= 0, got {x0}")
    n = _steps(t_end, dt)
    z = _gen(rng).standard_normal(n)
    vals = np.empty(n + 1)
    vals[0] = x0
    vals[1:] = x0 + np.cumsum(mu * dt + np.sqrt(2.0 * dt) * z)
    return DiffusionPath(dt * np.arange(n + 1), vals, mu)


def running_max(path: DiffusionPath, bridge_corrected: bool = True, rng=None) -> np.ndarray:
    """Per-grid-point running maximum of a diffusion path.

    With ``bridge_corrected`` each step's maximum is drawn from the exact
    variance-rate-2 Brownian-bridge law,
    M = (a + b + sqrt((b-a)^2 - 4*dt*ln U)) / 2, which removes the O(sqrt(dt))
    discretisation bias of the naive skeleton maximum.
    """
    x = path.values
    if not bridge_corrected:
        return np.maximum.accumulate(x)
    if rng is None:
        raise ValueError("bridge correction draws randomness; pass rng")
    u = _gen(rng).random(x.size - 1)
    a, b = x[:-1], x[1:]
    step_max = 0.5 * (a + b + np.sqrt((b - a) ** 2 - 4.0 * path.dt * np.log(u)))
    out = np.empty_like(x)
    out[0] = x[0]
    np.maximum.accumulate(np.maximum(step_max, x[0]), out=out[1:])
    return out


def bm_max_samples(mu: float, t: float, dt: float, n: int, rng,
                   x0: float = 0.0, bridge: bool = True, threads: int = 1) -> np.ndarray:
    """n samples of max_{s<=t} X_s for the drifted BM started at x0 (kernel-backed)."""
    nsteps = _steps(t, dt)
    if not isinstance(rng, RngStream):
        raise TypeError("bm_max_samples needs an RngStream for block substreams")

    def worker(stream, count):
        gen = stream.generator()
        x = np.full(count, float(x0))
        m = np.full(count, float(x0))
        done = 0
        empty = np.empty((0, count))
        while done < nsteps:
            msteps = min(_mc.CHUNK_STEPS, nsteps - done)
            z = gen.standard_normal((msteps, count))
            lu = np.log(gen.random((msteps, count))) if bridge else empty
            _kernels.bm_max_chunk(x, m, z, lu, mu, dt, bridge)
            done += msteps
        return m

    return _mc.run_blocks(n, rng, worker, threads=threads)


def _theta_from_sign(theta_sign, mu: float) -> float:
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    if theta_sign in ("+", "pos", 1, +1):
        return mu
    if theta_sign in ("-", "neg", -1):
        return -mu
    raise ValueError(f"theta_sign must be '+' or '-', got {theta_sign!r}")


def simulate_bang_bang(theta_sign, mu: float, t_end: float, dt: float,
                       rng) -> tuple[DiffusionPath, LocalTimeAccumulator]:
    """One path of dY = -theta*sgn(Y) dt + sqrt(2) dB, theta = +/-mu, Y_0 = 0,
    with its discrete-Tanaka local time at zero.

    The raw local time is gamma_k = |Y_k| - sum_{j<k} sgn(Y_j)(Y_{j+1}-Y_j);
    the returned accumulator also carries its monotone envelope.
    """
    theta = _theta_from_sign(theta_sign, mu)
    n = _steps(t_end, dt)
    z = _gen(rng).standard_normal(n)
    y_path, g_raw = _kernels.bang_bang_path(0.0, z, theta, dt)
    grid = dt * np.arange(n + 1)
    env = np.maximum.accumulate(g_raw)
    return (DiffusionPath(grid, y_path, -theta),
            LocalTimeAccumulator(grid, env, g_raw))


def bang_bang_gamma_samples(theta_sign, mu: float, t: float, dt: float, n: int,
                            rng, snapshot_times=None, threads: int = 1):
    """Monte Carlo local-time samples gamma_t(Y^{+/-mu}) at the horizon t.

    Returns a (n,) array, or a (n, k) matrix of envelope snapshots when
    ``snapshot_times`` is given (each snapshot time is rounded to the grid).
    """
    theta = _theta_from_sign(theta_sign, mu)
    nsteps = _steps(t, dt)
    if snapshot_times is None:
        snap_idx = np.array([nsteps], dtype=np.int64)
    else:
        snap_idx = np.asarray(
            [int(round(ts / dt)) for ts in np.atleast_1d(snapshot_times)], dtype=np.int64)
        if np.any(snap_idx <= 0) or np.any(snap_idx > nsteps) or np.any(np.diff(snap_idx) <= 0):
            raise ValueError("snapshot_times must be increasing, in (0, t]")
    if not isinstance(rng, RngStream):
        raise TypeError("bang_bang_gamma_samples needs an RngStream")

    def worker(stream, count):
        gen = stream.generator()
        y = np.zeros(count)
        s = np.zeros(count)
        env = np.zeros(count)
        level = np.full(count, np.inf)
        kstep = np.full(count, -1, dtype=np.int64)
        out = np.empty((count, snap_idx.size))
        done = 0
        for col, target in enumerate(snap_idx):
            while done < target:
                msteps = min(_mc.CHUNK_STEPS, int(target) - done)
                z = gen.standard_normal((msteps, count))
                _kernels.bang_bang_chunk(y, s, env, level, kstep, done, z, theta, dt)
                done += msteps
            out[:, col] = env
        return out

    res = _mc.run_blocks(n, rng, worker, threads=threads)
    return res[:, 0] if snapshot_times is None else res


def elastic_kill(gamma: LocalTimeAccumulator, c: float, rng) -> float:
    """Lifetime of the elastically killed path: first grid time with
    gamma_t >= E, E ~ Exp(c); math.inf when the path survives the horizon."""
    if c <= 0:
        raise ValueError(f"c must be > 0, got {c}")
    level = _gen(rng).exponential(scale=1.0 / c)
    idx = np.searchsorted(gamma.gamma, level, side="left")
    if idx >= gamma.gamma.size:
        return math.inf
    return float(gamma.grid[idx])


def elastic_survival_curve(theta_sign, mu: float, c: float, t_grid, dt: float,
                           n: int, rng, threads: int = 1):
    """Monte Carlo estimate of E[exp(-c*gamma_t)] on a grid of times.

    Returns (means, standard errors); this is the multiplicative-functional
    mean E_0[M_t] of the elastically killed reflecting motion |Y^{+/-mu}|.
    """
    t_arr = np.atleast_1d(np.asarray(t_grid, float))
    snaps = bang_bang_gamma_samples(theta_sign, mu, float(t_arr.max()), dt, n,
                                    rng, snapshot_times=t_arr, threads=threads)
    w = np.exp(-c * snaps)
    return w.mean(axis=0), w.std(axis=0, ddof=1) / np.sqrt(n)
