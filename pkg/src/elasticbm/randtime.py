"""Sampling and densities for the tempered 1/2-stable subordinator H and its
inverse L (first passage of H), including the truncated variant L ^ T_mu.

Increments of H are exact inverse-Gaussian draws (mean dt/(2 sqrt(eta)),
shape dt^2/2) for eta > 0 and stable 0.5*dt^2/N^2 draws for eta = 0; both
match the Laplace transform exp(-dt * phi(lam)).  The inverse is sampled by
first passage over an operational-time grid of pitch ``step``, so L values
carry an O(step) upward bias.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc, erfcx

from . import _kernels, _mc
from .errors import QuadratureError, ResourceCapError
from .symbols import TemperedSymbol, levy_tail, phi

__all__ = [
    "RngStream",
    "MonotonePath",
    "sample_increment",
    "sample_subordinator_path",
    "sample_inverse_path",
    "sample_inverse",
    "sample_truncated_inverse",
    "subordinator_density",
    "subordinator_cdf",
    "inverse_density",
    "inverse_survival",
    "inverse_mean",
    "potential_lt1",
    "potential_lt2",
]

_BLOCK_SHIFT = 20  # block substream ids live in [sid<<20 + 1, sid<<20 + 2^20)


@dataclass(frozen=True)
class RngStream:
    """Reproducible RNG handle: identical (seed, stream_id) => identical draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((self.seed, self.stream_id))))

    def block(self, i: int) -> "RngStream":
        """Substream for path block ``i``; disjoint across parent streams."""
        return RngStream(self.seed, (self.stream_id << _BLOCK_SHIFT) + i + 1)

    def aux(self) -> "RngStream":
        """Companion stream for auxiliary draws (e.g. exponential clocks)."""
        return RngStream(self.seed, self.stream_id << _BLOCK_SHIFT)


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"rng must be RngStream or numpy Generator, got {type(rng)}")


@dataclass(frozen=True)
class MonotonePath:
    """A non-decreasing sampled path (subordinator or inverse) on a time grid."""

    grid: np.ndarray
    values: np.ndarray
    kind: str  # "subordinator" | "inverse"

    def __post_init__(self):
        if self.kind not in ("subordinator", "inverse"):
            raise ValueError(f"kind must be subordinator|inverse, got {self.kind}")
        g = np.asarray(self.grid, float)
        v = np.asarray(self.values, float)
        if g.ndim != 1 or g.shape != v.shape:
            raise ValueError("grid and values must be 1d arrays of equal length")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(v < 0) or np.any(np.diff(v) < 0):
            raise ValueError(f"{self.kind} path must be non-negative and non-decreasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# increments and paths of H

def _increments(gen, eta: float, dt: float, n: int) -> np.ndarray:
    """Exact draws of H_{t+dt} - H_t (inverse Gaussian / stable limit)."""
    z = gen.standard_normal(n)
    u = gen.random(n)
    yv = z * z
    if eta > 0.0:
        m = dt / (2.0 * np.sqrt(eta))
        sh = dt * dt / 2.0
        a = m / (2.0 * sh)
        t1 = m * yv
        xx = m + a * (t1 - np.sqrt(4.0 * sh * t1 + t1 * t1))
        return np.where(u <= m / (m + xx), xx, (m * m) / xx)
    with np.errstate(divide="ignore"):
        return 0.5 * dt * dt / yv


def sample_increment(sym: TemperedSymbol, dt: float, rng, size: int | None = None):
    """Draw H_{t+dt} - H_t; a float when ``size`` is None, else an array."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    out = _increments(_gen(rng), sym.eta, dt, 1 if size is None else int(size))
    return float(out[0]) if size is None else out


def sample_subordinator_path(sym: TemperedSymbol, s_end: float, step: float,
                             rng) -> MonotonePath:
    """One H trajectory on the operational grid step, 2*step, ..., s_end."""
    if step <= 0 or s_end < step:
        raise ValueError("need step > 0 and s_end >= step")
    n = int(round(s_end / step))
    inc = _increments(_gen(rng), sym.eta, step, n)
    grid = step * np.arange(1, n + 1)
    return MonotonePath(grid, np.cumsum(inc), "subordinator")


# ---------------------------------------------------------------------------
# inverse L by first passage

def _default_op_cap(sym: TemperedSymbol, t: float) -> float:
    # generous operational-time horizon: mean passage mu*t plus a fat margin
    return sym.mu * t + 14.0 * np.sqrt(t) + 14.0


def sample_inverse_path(sym: TemperedSymbol, t_grid, step: float = 1e-3,
                        rng=None, max_steps: int | None = None) -> MonotonePath:
    """One inverse path: L_t = first operational grid time with H above t.

    L values are multiples of ``step`` (bias O(step)); t = 0 maps to L = 0.
    """
    t_arr = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_arr.size == 0:
        raise ValueError("t_grid must be non-empty")
    if np.any(t_arr < 0):
        raise ValueError("t_grid times must be >= 0")
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    gen = _gen(rng if rng is not None else RngStream(0))
    t_max = float(t_arr.max())
    cap = max_steps if max_steps is not None else int(_default_op_cap(sym, max(t_max, step)) / step)

    chunks = []
    total = 0.0
    n_steps = 0
    chunk = 4096
    while total <= t_max:
        if n_steps > cap:
            raise ResourceCapError(
                f"subordinator exceeded {cap} steps without passing t={t_max}")
        inc = _increments(gen, sym.eta, step, chunk)
        chunks.append(np.cumsum(inc) + total)
        total = chunks[-1][-1]
        n_steps += chunk
    h = np.concatenate(chunks)
    idx = np.searchsorted(h, t_arr, side="right")  # first grid index with H > t
    values = (idx + 1) * step
    values[t_arr == 0.0] = 0.0
    return MonotonePath(t_arr, values, "inverse")


def sample_inverse(sym: TemperedSymbol, t: float, n: int, step: float = 1e-3,
                   rng=None, max_steps: int | None = None, threads: int = 1) -> np.ndarray:
    """n independent samples of L_t by first passage (kernel-backed)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return np.zeros(n)
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if not isinstance(rng, RngStream):
        raise TypeError("batch sampling needs an RngStream for block substreams")
    eta = sym.eta
    m_ig = step / (2.0 * np.sqrt(eta)) if eta > 0 else 0.0
    sh_ig = step * step / 2.0
    cap = max_steps if max_steps is not None else int(_default_op_cap(sym, t) / step)

    def worker(stream, count):
        gen = stream.generator()
        h = np.zeros(count)
        lpass = np.full(count, np.nan)
        out = np.empty(count)
        alive = np.arange(count)
        k0 = 0
        while alive.size:
            msteps = _mc.CHUNK_STEPS
            z = gen.standard_normal((msteps, alive.size))
            u = gen.random((msteps, alive.size))
            h_a = np.ascontiguousarray(h[alive])
            l_a = np.full(alive.size, np.nan)
            _kernels.passage_chunk(h_a, l_a, k0, z, u, step, m_ig, sh_ig, t)
            k0 += msteps
            done = ~np.isnan(l_a)
            out[alive[done]] = l_a[done]
            h[alive] = h_a
            alive = alive[~done]
            if alive.size and k0 > cap:
                raise ResourceCapError(
                    f"{alive.size} paths exceeded {cap} operational steps at t={t}")
        return out

    return _mc.run_blocks(n, rng, worker, threads=threads)


def sample_truncated_inverse(sym: TemperedSymbol, mu: float, t: float, rng,
                             step: float = 1e-3, size: int | None = None,
                             threads: int = 1):
    """Samples of L_t ^ T_mu with T_mu ~ Exp(mu) independent of the path."""
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    n = 1 if size is None else int(size)
    if not isinstance(rng, RngStream):
        raise TypeError("sample_truncated_inverse needs an RngStream")
    lvals = sample_inverse(sym, t, n, step=step, rng=rng, threads=threads)
    tvals = rng.aux().generator().exponential(scale=1.0 / mu, size=n)
    out = np.minimum(lvals, tvals)
    return float(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# densities and potentials

def _pos(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise ValueError(f"{name} must be > 0, got {x}")
    return arr


def subordinator_density(sym: TemperedSymbol, s, x):
    """Density h(s, x) of H_s at x > 0.

    Exponential tilting of the 1/2-stable density:
    h(s,x) = s/(2 sqrt(pi) x^{3/2}) * exp(-(x*mu - s)^2 / (4x)), mu = 2 sqrt(eta).
    """
    s_arr = _pos(s, "s")
    x_arr = _pos(x, "x")
    d = x_arr * sym.mu - s_arr
    out = s_arr / (2.0 * np.sqrt(np.pi) * x_arr ** 1.5) * np.exp(-d * d / (4.0 * x_arr))
    scalar = not (isinstance(s, np.ndarray) or isinstance(x, np.ndarray))
    return float(out) if scalar else out


def subordinator_cdf(sym: TemperedSymbol, s, t):
    """P(H_s <= t) in closed form (inverse-Gaussian CDF); equals P(L_t >= s)."""
    s_arr = _pos(s, "s")
    t_arr = _pos(t, "t")
    return _survival_raw(t_arr, s_arr, sym.mu)


def _survival_raw(t, x, mu):
    # P(L_t > x) = 0.5*(erfc(a) + exp(-a^2) erfcx(b)), a=(x-mu t)/(2 sqrt t)
    rt = 2.0 * np.sqrt(t)
    a = (x - mu * t) / rt
    b = (x + mu * t) / rt
    return 0.5 * (erfc(a) + np.exp(-a * a) * erfcx(b))


def inverse_survival(sym: TemperedSymbol, t, x):
    """P(L_t > x) in closed form, for t > 0 and x >= 0."""
    t_arr = _pos(t, "t")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError(f"x must be >= 0, got {x}")
    out = _survival_raw(t_arr, x_arr, sym.mu)
    scalar = not (isinstance(t, np.ndarray) or isinstance(x, np.ndarray))
    return float(out) if scalar else out


def inverse_density(sym: TemperedSymbol, t, x):
    """Density l(t, x) of L_t at x > 0.

    Derived as -d/dx P(H_x <= t) from the inverse-Gaussian CDF:
    l(t,x) = exp(-a^2) * (1/sqrt(pi t) - (mu/2) erfcx(b)) with
    a = (x - mu t)/(2 sqrt t), b = (x + mu t)/(2 sqrt t), mu = 2 sqrt(eta);
    reduces to 2 g(t, x) when eta = 0.
    """
    t_arr = _pos(t, "t")
    x_arr = _pos(x, "x")
    rt = 2.0 * np.sqrt(t_arr)
    a = (x_arr - sym.mu * t_arr) / rt
    b = (x_arr + sym.mu * t_arr) / rt
    out = np.exp(-a * a) * (1.0 / np.sqrt(np.pi * t_arr) - 0.5 * sym.mu * erfcx(b))
    scalar = not (isinstance(t, np.ndarray) or isinstance(x, np.ndarray))
    return float(out) if scalar else out


def _quad(f, a, b, *, tol=1e-10, limit=200, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, abserr = integrate.quad(f, a, b, epsabs=tol, epsrel=tol,
                                         limit=limit, points=points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] failed: {exc}") from exc
    return val, abserr


def inverse_mean(sym: TemperedSymbol, t: float) -> float:
    """E[L_t] = int_0^infty P(L_t > x) dx by quadrature."""
    if t == 0:
        return 0.0
    _pos(t, "t")
    val, _ = _quad(lambda x: _survival_raw(t, x, sym.mu), 0.0, np.inf)
    return val


def potential_lt1(sym: TemperedSymbol, theta: float, x: float, lam: float) -> float:
    """Laplace potential int_0^inf e^{-lam t} E[(1-e^{-theta(L_t-x)})/theta
    1(L_t >= x)] dt, evaluated by nested quadrature over the inverse density."""
    if theta <= 0 or lam <= 0 or x < 0:
        raise ValueError("need theta > 0, lam > 0, x >= 0")

    def inner(t):
        val, _ = _quad(lambda z: (1.0 - np.exp(-theta * (z - x))) / theta
                       * inverse_density(sym, t, z), x, np.inf, tol=1e-11)
        return val

    val, _ = _quad(lambda t: np.exp(-lam * t) * inner(t), 0.0, np.inf, tol=1e-9)
    return val


def potential_lt2(sym: TemperedSymbol, theta: float, x: float, lam: float) -> float:
    """Companion potential int e^{-lam t} E[e^{-theta(L_t-x)} 1(L_t >= x)] dt."""
    if theta <= 0 or lam <= 0 or x < 0:
        raise ValueError("need theta > 0, lam > 0, x >= 0")

    def inner(t):
        val, _ = _quad(lambda z: np.exp(-theta * (z - x))
                       * inverse_density(sym, t, z), x, np.inf, tol=1e-11)
        return val

    val, _ = _quad(lambda t: np.exp(-lam * t) * inner(t), 0.0, np.inf, tol=1e-9)
    return val
