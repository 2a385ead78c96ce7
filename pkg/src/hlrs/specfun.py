"""Scalar special functions: gamma, Tricomi Psi, the Le Roy function, model constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import loggamma, roots_jacobi

from . import _backend
from .errors import DomainError, LeRoyRangeError, ParameterError, UnsupportedParameterError

__all__ = [
    "Alpha",
    "Beta",
    "as_alpha",
    "as_beta",
    "gamma_real",
    "gamma_complex",
    "tricomi_psi",
    "tricomi_psi_dz",
    "leroy",
    "leroy_dx",
    "model_constants",
    "normalized_psi",
    "LEROY_X_MAX",
    "LEROY_MAX_LOSS",
]

#: hard cap on |x| for the Le Roy series
LEROY_X_MAX = 500.0
#: largest tolerated ratio sum|terms| / |sum|; keeps relative error near 1e-9
LEROY_MAX_LOSS = 1e6
#: below this argument the alternating series is replaced by a contour integral
_LEROY_SERIES_MIN = -1.0
# contour abscissa and trapezoid step for the contour integral
_MB_ABSCISSA = -0.8
_MB_STEP = 0.04

_N_JACOBI = 24
_N_LEGENDRE = 20


@dataclass(frozen=True)
class Alpha:
    """Hadamard order in (0, 2)."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (0.0 < v < 2.0) or math.isnan(v):
            raise ParameterError(f"alpha={self.value} outside the valid window (0,2)")
        object.__setattr__(self, "value", v)

    @property
    def regime(self) -> str:
        if self.value < 1.0:
            return "derivative"
        if self.value > 1.0:
            return "integral"
        return "brownian"

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Beta:
    """Le Roy order in (0, 1]."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (0.0 < v <= 1.0) or math.isnan(v):
            raise ParameterError(f"beta={self.value} outside the valid window (0,1]")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def as_alpha(alpha) -> float:
    return Alpha(float(alpha)).value


def as_beta(beta) -> float:
    return Beta(float(beta)).value


def _is_pole(x) -> bool:
    return x <= 0 and float(x) == math.floor(x)


def gamma_real(x: float) -> float:
    """Gamma function on the real line (poles raise :class:`DomainError`)."""
    x = float(x)
    if _is_pole(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def gamma_complex(z: complex) -> complex:
    """Gamma function for complex argument, via the continuous-branch log-gamma."""
    z = complex(z)
    if z.imag == 0.0 and _is_pole(z.real):
        raise DomainError(f"Gamma has a pole at {z}")
    return complex(np.exp(loggamma(z)))


@lru_cache(maxsize=512)
def _jacobi_nodes(a: float):
    x, w = roots_jacobi(_N_JACOBI, 0.0, a - 1.0)
    # nodes on [0, 1], exact for s**(a-1) * poly(s)
    return np.ascontiguousarray((x + 1.0) / 2.0), np.ascontiguousarray(w / 2.0**a)


@lru_cache(maxsize=1)
def _legendre_nodes():
    x, w = np.polynomial.legendre.leggauss(_N_LEGENDRE)
    return np.ascontiguousarray((x + 1.0) / 2.0), np.ascontiguousarray(w / 2.0)


def _psi_positive(a: float, b: float, z: np.ndarray) -> np.ndarray:
    xj, wj = _jacobi_nodes(a)
    xl, wl = _legendre_nodes()
    raw = _backend.kernels.psi_positive(a, b, np.ascontiguousarray(z, dtype=np.float64), xj, wj, xl, wl)
    return raw / math.gamma(a)


def tricomi_psi(a: float, b: float, z):
    """Tricomi's confluent hypergeometric function Psi(a, b; z) for real a, b and z > 0.

    For ``a > 0`` the Laplace-type integral is split at ``s0 = min(1, 1/z)``:
    Gauss-Jacobi absorbs ``s**(a-1)`` on ``[0, s0]`` and the remainder is
    integrated in ``w = log(s/s0)`` on unit panels until ``exp(-z s)`` is below
    ``exp(-45)``.  For ``a <= 0`` the Kummer shift
    ``Psi(a,b;z) = z**(1-b) Psi(a+1-b, 2-b; z)`` is applied once.
    """
    a, b = float(a), float(b)
    zarr = np.asarray(z, dtype=np.float64)
    if np.any(~(zarr > 0)):
        raise DomainError("tricomi_psi is restricted to z > 0")
    flat = zarr.ravel()
    if a == 0.0:
        out = np.ones_like(flat)
    elif a > 0.0:
        out = _psi_positive(a, b, flat)
    else:
        a2 = a + 1.0 - b
        if a2 <= 0.0:
            raise UnsupportedParameterError(f"Psi({a}, {b}; z) needs a > 0 or a + 1 - b > 0")
        out = flat ** (1.0 - b) * _psi_positive(a2, 2.0 - b, flat)
    out = out.reshape(zarr.shape)
    return float(out) if out.ndim == 0 else out


def tricomi_psi_dz(a: float, b: float, z):
    """d/dz Psi(a, b; z) = -a Psi(a+1, b+1; z)."""
    if float(a) == 0.0:
        zarr = np.asarray(z, dtype=np.float64)
        if np.any(~(zarr > 0)):
            raise DomainError("tricomi_psi_dz is restricted to z > 0")
        out = np.zeros_like(zarr)
        return float(out) if out.ndim == 0 else out
    return -float(a) * tricomi_psi(a + 1.0, b + 1.0, z)


def model_constants(alpha) -> tuple[float, float]:
    """Return ``(C_alpha, K_alpha)``.

    ``C_alpha = 2**(1-alpha) sqrt(pi) / Gamma(alpha/2)`` scales the covariance,
    ``K_alpha = Gamma((alpha+1)/2) / sqrt(Gamma(alpha))`` normalizes the operator.
    """
    alpha = as_alpha(alpha)
    c = 2.0 ** (1.0 - alpha) * math.sqrt(math.pi) / math.gamma(alpha / 2.0)
    k = math.gamma((alpha + 1.0) / 2.0) / math.sqrt(math.gamma(alpha))
    return c, k


def normalized_psi(alpha, z):
    """C_alpha * Psi((1-alpha)/2, 1-alpha; z), the covariance shape factor (1 at alpha=1)."""
    alpha = as_alpha(alpha)
    if alpha == 1.0:
        zarr = np.asarray(z, dtype=np.float64)
        out = np.ones_like(zarr)
        return float(out) if out.ndim == 0 else out
    c, _ = model_constants(alpha)
    return c * tricomi_psi((1.0 - alpha) / 2.0, 1.0 - alpha, z)


def _leroy_negative(beta: float, s: np.ndarray, derivative: bool) -> np.ndarray:
    """R_beta(-s) (or R_beta'(-s)) for s > 0 from the Mellin-Barnes integral.

    ``R_beta(-s) = (1/2 pi i) int Gamma(-z) Gamma(1+z)**(1-beta) s**z dz`` on
    ``Re z = -0.8``.  The integrand is analytic in ``-1 < Re z < 0`` and decays
    like ``exp(-pi (1 - beta/2) |Im z|)``, so the trapezoid rule converges
    geometrically and no alternating cancellation occurs.
    """
    ymax = 40.0 / (math.pi * (1.0 - beta / 2.0))
    y = np.arange(0.0, ymax + _MB_STEP, _MB_STEP)
    z = _MB_ABSCISSA + 1j * y
    base = -np.pi / np.sin(np.pi * z) * np.exp(-beta * loggamma(1.0 + z))
    shift = 0.0
    if derivative:
        base = -base * z
        shift = 1.0
    w = np.full(y.size, _MB_STEP)
    w[0] /= 2.0
    out = np.empty_like(s)
    for lo in range(0, s.size, 2048):
        ls = np.log(s[lo:lo + 2048])
        vals = (base[None, :] * np.exp((z[None, :] - shift) * ls[:, None])).real
        out[lo:lo + 2048] = vals @ w / np.pi
    return out


def _leroy(beta, x, derivative: bool):
    beta = as_beta(beta)
    xarr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(xarr) > LEROY_X_MAX) or np.any(np.isnan(xarr)):
        raise LeRoyRangeError(f"|x| exceeds the Le Roy cap {LEROY_X_MAX}")
    flat = np.ascontiguousarray(xarr.ravel())
    if beta == 1.0:
        vals = np.exp(flat)
    else:
        vals = np.empty_like(flat)
        neg = flat < _LEROY_SERIES_MIN
        if np.any(neg):
            vals[neg] = _leroy_negative(beta, -flat[neg], derivative)
        ser = ~neg
        if np.any(ser):
            v, asums, _ = _backend.kernels.leroy_series(beta, np.ascontiguousarray(flat[ser]), derivative)
            if not np.all(np.isfinite(asums)):
                raise LeRoyRangeError(f"Le Roy function overflows for beta={beta} on this range")
            if np.any(~(asums <= LEROY_MAX_LOSS * np.abs(v))):
                raise LeRoyRangeError(f"Le Roy series for beta={beta} loses more than 1e-10 to cancellation")
            vals[ser] = v
    vals = vals.reshape(xarr.shape)
    return float(vals) if vals.ndim == 0 else vals


def leroy(beta, x):
    """Le Roy function R_beta(x) = sum_j x**j / (j!)**beta, for 0 < beta <= 1."""
    return _leroy(beta, x, derivative=False)


def leroy_dx(beta, x):
    """Termwise derivative sum_j j x**(j-1) / (j!)**beta."""
    return _leroy(beta, x, derivative=True)
