"""Tempered 1/2-stable Bernstein symbol and the special functions built on it.

Everything downstream (random-time sampling, closed-form kernels, boundary
operators) reduces to the symbol ``sqrt(lam + eta) - sqrt(eta)``, its Levy
tail, and the complementary error function.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc, erfcx

__all__ = [
    "TemperedSymbol",
    "SpecialValue",
    "phi",
    "phi_analytic",
    "levy_tail",
    "levy_tail_primitive",
    "mittag_leffler_half",
    "gauss_kernel",
]

_SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class TemperedSymbol:
    """The Bernstein symbol phi(lam) = sqrt(lam + eta) - sqrt(eta).

    ``eta >= 0`` is the tempering rate (units 1/time); ``mu = 2 sqrt(eta)`` is
    the drift magnitude it encodes in the elastic-Brownian picture.  The
    generic evaluation interface assumes an infinite Levy measure on (0, inf),
    which holds for every eta; no other symbol family is instantiated here.
    """

    eta: float

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta < 0:
            raise ValueError(f"eta must be finite and >= 0, got {self.eta}")

    @property
    def mu(self) -> float:
        """Drift magnitude 2*sqrt(eta) encoded by the tempering rate."""
        return 2.0 * np.sqrt(self.eta)

    @classmethod
    def from_drift(cls, mu: float) -> "TemperedSymbol":
        """Symbol with tempering rate (mu/2)**2; sign of mu is irrelevant."""
        return cls((mu / 2.0) ** 2)


@dataclass(frozen=True)
class SpecialValue:
    """A computed value together with an absolute error bound."""

    value: float
    abs_error_bound: float


def _as_nonneg_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError(f"{name} must be >= 0, got {x}")
    return arr


def _match(x, template) -> float | np.ndarray:
    return x if isinstance(template, np.ndarray) else float(x)


def phi(sym: TemperedSymbol, lam) -> float | np.ndarray:
    """Evaluate phi(lam) = sqrt(lam + eta) - sqrt(eta) for lam >= 0.

    Evaluated as lam / (sqrt(lam + eta) + sqrt(eta)) so there is no
    cancellation for lam << eta; phi(0) = 0 exactly.
    """
    arr = _as_nonneg_array(lam, "lam")
    denom = np.sqrt(arr + sym.eta) + np.sqrt(sym.eta)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(arr == 0.0, 0.0, arr / np.where(denom == 0.0, 1.0, denom))
    return _match(out, np.asarray(lam) if isinstance(lam, np.ndarray) else lam)


def phi_analytic(sym: TemperedSymbol, lam):
    """phi continued to complex lam (principal branch), for Laplace inversion.

    No domain checks; the branch cut sits on lam in (-inf, -eta].
    """
    return np.sqrt(np.asarray(lam) + sym.eta) - np.sqrt(sym.eta)


def levy_tail(sym: TemperedSymbol, s) -> float | np.ndarray:
    """Tail of the Levy measure, Pi((s, inf)), for s > 0.

    Closed form exp(-eta*s)/sqrt(pi*s) - sqrt(eta)*erfc(sqrt(eta*s)), obtained
    by integrating the tempered 1/2-stable Levy density by parts; reduces to
    1/sqrt(pi*s) when eta = 0.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0) or np.any(np.isnan(arr)):
        raise ValueError(f"s must be > 0, got {s}")
    se = np.sqrt(sym.eta)
    out = np.exp(-sym.eta * arr) / np.sqrt(np.pi * arr) - se * erfc(se * np.sqrt(arr))
    return _match(out, np.asarray(s) if isinstance(s, np.ndarray) else s)


def levy_tail_primitive(sym: TemperedSymbol, z) -> float | np.ndarray:
    """Running integral I(z) = int_0^z Pi((v, inf)) dv for z >= 0.

    Closed form via erf/erfc; these are the exact first moments of the weakly
    singular kernel used by the product-integration convolution:

        I(z) = erf(sqrt(eta z))/(2 sqrt(eta)) - sqrt(eta) z erfc(sqrt(eta z))
               + sqrt(z/pi) exp(-eta z)

    with the eta = 0 limit 2*sqrt(z/pi).
    """
    arr = _as_nonneg_array(z, "z")
    if sym.eta == 0.0:
        out = 2.0 * np.sqrt(arr / np.pi)
    else:
        se = np.sqrt(sym.eta)
        r = se * np.sqrt(arr)
        out = erf(r) / (2.0 * se) - se * arr * erfc(r) + np.sqrt(arr / np.pi) * np.exp(-sym.eta * arr)
    return _match(out, np.asarray(z) if isinstance(z, np.ndarray) else z)


def mittag_leffler_half(x) -> SpecialValue:
    """Mittag-Leffler function E_{1/2}(x) = exp(x^2) erfc(-x) for x <= 0.

    Evaluated through the scaled complementary error function erfcx, which is
    exact to a few ulp on the whole negative axis (the asymptotic regime
    x << -20 is handled inside erfcx, so no overflow guard is needed).
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr > 0) or np.any(np.isnan(arr)):
        raise ValueError(f"documented domain is x <= 0, got {x}")
    val = erfcx(-arr)
    bound = 4.0 * np.finfo(float).eps * np.abs(val)
    if isinstance(x, np.ndarray):
        return SpecialValue(val, bound)
    return SpecialValue(float(val), float(bound))


def gauss_kernel(t, z) -> float | np.ndarray:
    """Heat kernel g(t, z) = exp(-z^2/(4t)) / sqrt(4 pi t) for t > 0.

    Note the variance-2t convention: this is the transition density of the
    generator d^2/dx^2, not (1/2) d^2/dx^2.
    """
    tarr = np.asarray(t, dtype=float)
    if np.any(tarr <= 0) or np.any(np.isnan(tarr)):
        raise ValueError(f"t must be > 0, got {t}")
    zarr = np.asarray(z, dtype=float)
    out = np.exp(-zarr * zarr / (4.0 * tarr)) / np.sqrt(4.0 * np.pi * tarr)
    scalar = not (isinstance(t, np.ndarray) or isinstance(z, np.ndarray))
    return float(out) if scalar else out
