"""Hadamard-type fractional integrals and derivatives on the half-line.

Every operator is evaluated after the logarithmic substitution ``z = t e^{-u}``
(left side) or ``z = t e^{u}`` (right side), so the quadrature always sees
``e^{-mu u} u^{gamma-1} f(...)`` on ``(0, inf)`` with the algebraic endpoint
weight absorbed by Gauss-Jacobi nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammainc, gammaincc

from . import quadrature
from .errors import NonIntegrableError, ParameterError, UnsupportedParameterError
from .specfun import as_alpha, as_beta, model_constants

__all__ = [
    "ScalarFunction",
    "constant",
    "power",
    "indicator",
    "gaussian_bump",
    "had_integral_left",
    "had_integral_right",
    "had_derivative_left",
    "indicator_M_right",
    "caputo_had_left",
    "marchaud_had_left",
    "M_left_mu1",
]

SMOOTH = "smooth-decaying"
INDICATOR = "indicator"
GENERIC = "generic"


@dataclass(frozen=True)
class ScalarFunction:
    """A real function on ``(0, inf)`` with optional derivative and shape hints.

    Parameters
    ----------
    fn : callable
        Vectorized evaluation on positive arguments.
    deriv : callable, optional
        Vectorized first derivative, used by the Caputo form.
    tag : str
        ``"smooth-decaying"``, ``"indicator"`` or ``"generic"``.
    interval : tuple, optional
        ``(a, b)`` with ``0 <= a < b`` for indicators of ``[a, b)``.
    breakpoints : tuple
        Arguments where ``fn`` has kinks; mapped to quadrature panel edges.
    """

    fn: Callable
    deriv: Optional[Callable] = None
    tag: str = GENERIC
    interval: Optional[tuple] = None
    breakpoints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.tag not in (SMOOTH, INDICATOR, GENERIC):
            raise ParameterError(f"unknown function tag {self.tag!r}")
        if self.tag == INDICATOR:
            if self.interval is None:
                raise ParameterError("indicator functions need an interval (a, b)")
            a, b = self.interval
            if not (0.0 <= a < b):
                raise ParameterError(f"indicator interval needs 0 <= a < b, got {self.interval}")

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=np.float64))

    def derivative(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.deriv is not None:
            return self.deriv(z)
        h = np.maximum(1e-6, 1e-6 * np.abs(z))
        return (self.fn(z + h) - self.fn(z - h)) / (2.0 * h)


def constant(c: float) -> ScalarFunction:
    """The constant function ``c``."""
    c = float(c)
    return ScalarFunction(lambda z: np.full(np.shape(z), c), lambda z: np.zeros(np.shape(z)), SMOOTH)


def power(kappa: float) -> ScalarFunction:
    """``z -> z**kappa``."""
    k = float(kappa)
    return ScalarFunction(lambda z: z**k, lambda z: k * z ** (k - 1.0), GENERIC)


def indicator(a: float, b: float) -> ScalarFunction:
    """Indicator of ``[a, b)``."""
    a, b = float(a), float(b)
    return ScalarFunction(
        lambda z: ((z >= a) & (z < b)).astype(np.float64),
        tag=INDICATOR,
        interval=(a, b),
        breakpoints=(a, b) if a > 0 else (b,),
    )


def gaussian_bump(center: float = 1.0, width: float = 0.5) -> ScalarFunction:
    """``exp(-((z - center)/width)**2 / 2)``."""
    c, w = float(center), float(width)

    def fn(z):
        return np.exp(-0.5 * ((z - c) / w) ** 2)

    def deriv(z):
        return -(z - c) / w**2 * fn(z)

    return ScalarFunction(fn, deriv, SMOOTH)


def as_function(f) -> ScalarFunction:
    """Wrap a plain vectorized callable as a generic :class:`ScalarFunction`."""
    return f if isinstance(f, ScalarFunction) else ScalarFunction(f)


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not mu >= 0.0:
        raise ParameterError(f"mu must be >= 0, got {mu}")
    return mu


def _weighted_gamma(gamma: float, mu: float, lo: float, hi: float) -> float:
    """``(1/Gamma(gamma)) int_lo^hi e^{-mu u} u^{gamma-1} du`` for ``0 <= lo <= hi <= inf``."""
    if hi <= lo:
        return 0.0
    if mu == 0.0:
        if math.isinf(hi):
            return math.inf
        return (hi**gamma - lo**gamma) / math.gamma(gamma + 1.0)
    upper = 1.0 if math.isinf(hi) else gammainc(gamma, mu * hi)
    # difference of regularized incomplete gammas, taken on the accurate side
    if lo * mu > gamma:
        upper_c = 0.0 if math.isinf(hi) else gammaincc(gamma, mu * hi)
        diff = gammaincc(gamma, mu * lo) - upper_c
    else:
        diff = upper - gammainc(gamma, mu * lo)
    return float(diff) * mu**-gamma


def _u_breaks(points, t: float, sign: float) -> tuple:
    out = []
    for z in points:
        if z > 0:
            u = sign * math.log(z / t)
            if u > 0:
                out.append(u)
    return tuple(out)


def had_integral_left(f: ScalarFunction, gamma: float, mu: float, t: float, *, rtol: float = 1e-9) -> float:
    """Left-sided Hadamard-type integral ``(1/Gamma(gamma)) int_0^inf e^{-mu u} u^{gamma-1} f(t e^{-u}) du``.

    Raises :class:`~hlrs.errors.NonIntegrableError` when the integrand does not
    decay (for instance ``f = 1`` with ``mu = 0``).
    """
    f = as_function(f)
    gamma, mu, t = float(gamma), _check_mu(mu), float(t)
    if not (gamma > 0 and t > 0):
        raise ParameterError("had_integral_left needs gamma > 0 and t > 0")
    if f.tag == INDICATOR:
        a, b = f.interval
        # t e^{-u} in [a, b)  <=>  log(t/b) < u <= log(t/a)
        lo = math.log(t / b) if t > b else 0.0
        hi = math.inf if a == 0.0 else (math.log(t / a) if t >= a else -1.0)
        if hi < 0.0:
            return 0.0
        val = _weighted_gamma(gamma, mu, max(lo, 0.0), hi)
        if math.isinf(val):
            raise NonIntegrableError("indicator reaching 0 is not integrable with mu = 0")
        return val

    def g(u):
        return np.exp(-mu * u) * f(t * np.exp(-u))

    val = quadrature.halfline(g, gamma - 1.0, rtol=rtol, breakpoints=_u_breaks(f.breakpoints, t, -1.0))
    return float(val) / math.gamma(gamma)


def had_integral_right(f: ScalarFunction, gamma: float, mu: float, t: float, *, rtol: float = 1e-9) -> float:
    """Right-sided Hadamard-type integral ``(1/Gamma(gamma)) int_0^inf e^{-mu u} u^{gamma-1} f(t e^{u}) du``."""
    f = as_function(f)
    gamma, mu, t = float(gamma), _check_mu(mu), float(t)
    if not (gamma > 0 and t > 0):
        raise ParameterError("had_integral_right needs gamma > 0 and t > 0")
    if f.tag == INDICATOR:
        a, b = f.interval
        # t e^{u} in [a, b)  <=>  log(a/t) <= u < log(b/t)
        hi = math.log(b / t) if b > t else -1.0
        if hi <= 0.0:
            return 0.0
        lo = math.log(a / t) if a > t else 0.0
        return _weighted_gamma(gamma, mu, lo, hi)

    def g(u):
        with np.errstate(over="ignore"):
            return np.exp(-mu * u) * f(t * np.exp(u))

    val = quadrature.halfline(g, gamma - 1.0, rtol=rtol, breakpoints=_u_breaks(f.breakpoints, t, 1.0))
    return float(val) / math.gamma(gamma)


def had_derivative_left(f: ScalarFunction, gamma: float, mu: float, t: float) -> float:
    """Left-sided Hadamard-type derivative of order ``gamma`` in (0, 1), by its defining formula.

    Evaluates ``t^{-mu} (t d/dt) [t^mu I^{1-gamma}_{0+,mu} f](t)`` with a
    central difference of step ``max(1e-6, 1e-6 t)``.  The inner integral is
    taken on one fixed node set for all three abscissae so its discretization
    error is smooth in ``t`` and does not pollute the difference quotient.
    Intended as an independent reference, not a fast path.
    """
    f = as_function(f)
    gamma, mu, t = float(gamma), _check_mu(mu), float(t)
    if not 0.0 < gamma < 1.0:
        raise ParameterError("had_derivative_left implements 0 < gamma < 1")
    p = -gamma  # weight exponent of the order 1 - gamma integral

    cut = quadrature.BASE_EDGES[-1]

    def inner(tt, level):
        def g(u):
            return np.exp(-mu * u) * f(tt * np.exp(-u))

        body = quadrature.halfline_fixed(g, p, level=level, n=24) / math.gamma(1.0 - gamma)
        # beyond the last panel f(tt e^{-u}) is frozen at its value there
        far = float(f(tt * math.exp(-cut)))
        if far == 0.0:
            return body
        tail = _weighted_gamma(1.0 - gamma, mu, cut, math.inf)
        if math.isinf(tail):
            raise NonIntegrableError("f does not vanish at 0, so the mu = 0 integral diverges")
        return body + far * tail

    # pick a resolution that resolves the integral at t, then freeze it
    prev = inner(t, 0)
    level = 1
    for level in range(1, 10):
        cur = inner(t, level)
        if abs(cur - prev) <= 1e-12 * max(abs(cur), 1e-300):
            break
        prev = cur
    h = max(1e-6, 1e-6 * t)
    plus = (t + h) ** mu * inner(t + h, level)
    minus = (t - h) ** mu * inner(t - h, level)
    return t ** (1.0 - mu) * (plus - minus) / (2.0 * h)


def indicator_M_right(alpha, a: float, b: float, x):
    """Right-sided operator ``M^{alpha/2}_-`` applied to the indicator of ``[a, b)``.

    Returns ``K_alpha / Gamma((alpha+1)/2) [ (log(b/x))_+^{(alpha-1)/2} - (log(a/x))_+^{(alpha-1)/2} ]``,
    the indicator itself when ``alpha = 1``.  Vectorized in ``x``.
    """
    alpha = as_alpha(alpha)
    a, b = float(a), float(b)
    if not 0.0 <= a < b:
        raise ParameterError(f"need 0 <= a < b, got a={a}, b={b}")
    xarr = np.asarray(x, dtype=np.float64)
    if np.any(~(xarr > 0)):
        raise ParameterError("indicator_M_right is defined for x > 0")
    if alpha == 1.0:
        out = ((xarr >= a) & (xarr < b)).astype(np.float64)
    else:
        e = (alpha - 1.0) / 2.0
        _, k = model_constants(alpha)
        scale = k / math.gamma((alpha + 1.0) / 2.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            lb = np.log(b / xarr)
            out = np.where(xarr < b, np.abs(lb) ** e, 0.0)
            if a > 0.0:
                la = np.log(a / xarr)
                out = out - np.where(xarr < a, np.abs(la) ** e, 0.0)
        out = scale * out
    return float(out) if out.ndim == 0 else out


def caputo_had_left(f: ScalarFunction, beta, t: float, *, rtol: float = 1e-9) -> float:
    """Left Hadamard derivative of Caputo type, ``(1/Gamma(1-beta)) int_0^inf u^{-beta} f'(t e^{-u}) t e^{-u} du``.

    ``beta = 1`` returns the limit ``t f'(t)``.  Uses ``f.deriv`` when present,
    otherwise a central difference.
    """
    f = as_function(f)
    beta, t = as_beta(beta), float(t)
    if not t > 0:
        raise ParameterError("caputo_had_left needs t > 0")
    if beta == 1.0:
        return float(t * f.derivative(t))

    def g(u):
        z = t * np.exp(-u)
        return f.derivative(z) * z

    val = quadrature.halfline(g, -beta, rtol=rtol, breakpoints=_u_breaks(f.breakpoints, t, -1.0))
    return float(val) / math.gamma(1.0 - beta)


def _marchaud_tail(gamma: float, mu: float, cut: float) -> float:
    """``int_cut^inf e^{-mu z} z^{-1-gamma} dz``."""
    if mu == 0.0:
        return cut**-gamma / gamma
    x = mu * cut
    upper = gammaincc(1.0 - gamma, x) * math.gamma(1.0 - gamma)
    return float((cut**-gamma * math.exp(-x) - mu**gamma * upper) / gamma)


def marchaud_had_left(f: ScalarFunction, gamma: float, mu: float, x: float, *, rtol: float = 1e-9) -> float:
    """Marchaud-Hadamard derivative of order ``gamma`` in (0, 1) with parameter ``mu``.

    ``(gamma/Gamma(1-gamma)) int_0^inf e^{-mu z} (f(x) - f(x e^{-z})) z^{-1-gamma} dz + mu^gamma f(x)``.
    The difference quotient ``(f(x) - f(x e^{-z}))/z`` stays bounded at ``z = 0``, so the
    integrand is handled as ``z^{-gamma}`` times a regular function.  Beyond the last
    panel the remainder is added analytically with ``f(x e^{-z})`` frozen at its value there.
    """
    f = as_function(f)
    gamma, mu, x = float(gamma), _check_mu(mu), float(x)
    if not 0.0 < gamma < 1.0:
        raise ParameterError("marchaud_had_left needs 0 < gamma < 1")
    if not x > 0:
        raise ParameterError("marchaud_had_left needs x > 0")
    fx = float(f(x))
    cut = quadrature.BASE_EDGES[-1]

    def g(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (fx - f(x * np.exp(-z))) / z
        return np.exp(-mu * z) * q

    body = quadrature.halfline(g, -gamma, rtol=rtol, check_tail=False, breakpoints=_u_breaks(f.breakpoints, x, -1.0))
    tail = (fx - float(f(x * math.exp(-cut)))) * _marchaud_tail(gamma, mu, cut)
    return float(gamma / math.gamma(1.0 - gamma) * (float(body) + tail) + mu**gamma * fx)


def M_left_mu1(xi: ScalarFunction, alpha, t: float) -> float:
    """Left operator ``M^{alpha/2}_{0+,1}``: ``K_alpha D^{(1-alpha)/2}_{0+,1}`` for alpha < 1, ``K_alpha I^{(alpha-1)/2}_{0+,1}`` for alpha > 1."""
    xi = as_function(xi)
    alpha = as_alpha(alpha)
    if alpha == 1.0:
        raise UnsupportedParameterError("alpha = 1 is the identity; apply it directly")
    _, k = model_constants(alpha)
    if alpha < 1.0:
        return k * marchaud_had_left(xi, (1.0 - alpha) / 2.0, 1.0, t)
    return k * had_integral_left(xi, (alpha - 1.0) / 2.0, 1.0, t)
