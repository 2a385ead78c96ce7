"""The Le Roy mixing law and the moment algebra of the Le Roy grey-noise measure.

The mixing variable ``Y`` has Mellin transform ``E[Y^s] = Gamma(1+s)^{1-beta}``
and Laplace transform ``E[e^{-sY}] = R_beta(-s)``.  Its density and CDF are
tabulated by trapezoidal inversion of the Mellin transform along vertical
lines; the trapezoid rule converges geometrically because the integrand is
analytic in a strip and decays like ``exp(-pi (1-beta) |x| / 2)``.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator
from scipy.special import loggamma

from . import rng
from .errors import MixingLawError, ParameterError, TruncationError
from .specfun import as_beta

__all__ = [
    "MixingLaw",
    "LeRoyHermite",
    "mellin_truncation",
    "m_beta_density",
    "mixing_cdf",
    "build_mixing_law",
    "get_mixing_law",
    "sample_mixing",
    "mixing_moment",
    "mixed_moments",
    "grey_moment",
    "hermite_poly",
    "product_defect",
    "product_defect_from_moments",
]

TABLE_VERSION = 1
#: the trapezoid step in the Mellin variable
MELLIN_STEP = 0.02
#: integrand magnitude below which the Mellin integral is truncated
MELLIN_TAIL = 1e-13
#: lower end of the tabulated support
T_MIN = 1e-8
#: relative share of the fourth moment allowed beyond the upper end of the support
UPPER_TAIL = 1e-8
N_GRID = 4000
#: largest Mellin window accepted (reached near beta = 0.98); beyond it the integrand decays too slowly
MELLIN_X_CAP = 1000.0
# abscissa of the contour used for the CDF (any value in (-1, 0) works)
_CDF_ABSCISSA = -0.5


def mellin_truncation(beta: float) -> float:
    """Truncation ``X`` of the Mellin integral: ``|Gamma(1+ix)|^{1-beta} < MELLIN_TAIL`` beyond ``X``.

    Uses the bound ``|Gamma(1+ix)| <= sqrt(2 pi (1+x^2)^{1/2}) e^{-pi x/2}`` (up to 1 + O(1/x)).
    """
    beta = as_beta(beta)
    if beta == 1.0:
        raise TruncationError("the Mellin integral does not decay at beta = 1 (the law is a point mass)")
    rate = math.pi * (1.0 - beta) / 2.0
    x = -math.log(MELLIN_TAIL) / rate
    for _ in range(50):
        # include the algebraic prefactor, then iterate to the fixed point
        x_new = (-math.log(MELLIN_TAIL) + 0.5 * (1.0 - beta) * math.log(2.0 * math.pi * (1.0 + x))) / rate
        if abs(x_new - x) < 1e-6:
            break
        x = x_new
    if x_new > MELLIN_X_CAP:
        raise TruncationError(
            f"the Mellin integrand at beta={beta} needs a window of {x_new:.0f} > {MELLIN_X_CAP:.0f}; "
            "beta is too close to 1 for the tabulated law"
        )
    return x_new


def _mellin_line(beta: float, c: float, t: np.ndarray, divide_by_s: bool, step: float, xmax: float) -> np.ndarray:
    x = np.arange(0.0, xmax + step, step)
    s = c + 1j * x
    base = np.exp((1.0 - beta) * loggamma(1.0 + s))
    if divide_by_s:
        base = -base / s
    w = np.full(x.size, step)
    w[0] /= 2.0
    out = np.empty(t.size)
    for lo in range(0, t.size, 256):
        lt = np.log(t[lo:lo + 256])
        vals = (base[None, :] * np.exp(-s[None, :] * lt[:, None])).real
        out[lo:lo + 256] = vals @ w / math.pi
    return out


def _check_beta_lt1(beta) -> float:
    beta = as_beta(beta)
    if beta == 1.0:
        raise ParameterError("the mixing law at beta = 1 is the point mass at 1; no density exists")
    return beta


def m_beta_density(beta, t, *, step: float = MELLIN_STEP, xmax: Optional[float] = None):
    """Density of the mixing variable, ``(1/2pi) int t^{-ix-1} Gamma(1+ix)^{1-beta} dx``.

    Parameters
    ----------
    beta : float
        Le Roy order in (0, 1).
    t : float or ndarray
        Positive arguments.
    step, xmax : float, optional
        Trapezoid step and truncation of the Mellin variable; ``xmax``
        defaults to :func:`mellin_truncation`.
    """
    beta = _check_beta_lt1(beta)
    tarr = np.asarray(t, dtype=np.float64)
    if np.any(~(tarr > 0)):
        raise ParameterError("the mixing density is evaluated at t > 0")
    xmax = mellin_truncation(beta) if xmax is None else float(xmax)
    out = _mellin_line(beta, 0.0, tarr.ravel(), False, step, xmax) / tarr.ravel()
    out = out.reshape(tarr.shape)
    return float(out) if out.ndim == 0 else out


def mixing_cdf(beta, t, *, step: float = MELLIN_STEP, xmax: Optional[float] = None):
    """``P(Y <= t)`` from the Mellin inversion on ``Re s = -1/2`` (independent of the density table)."""
    beta = _check_beta_lt1(beta)
    tarr = np.asarray(t, dtype=np.float64)
    if np.any(~(tarr > 0)):
        raise ParameterError("the mixing CDF is evaluated at t > 0")
    xmax = mellin_truncation(beta) if xmax is None else float(xmax)
    out = _mellin_line(beta, _CDF_ABSCISSA, tarr.ravel(), True, step, xmax).reshape(tarr.shape)
    return float(out) if out.ndim == 0 else out


def mixing_moment(beta, r: float) -> float:
    """``E[Y^r] = Gamma(1+r)^{1-beta}``."""
    beta = as_beta(beta)
    return math.exp((1.0 - beta) * math.lgamma(1.0 + r))


def _upper_support(beta: float) -> float:
    """Markov bound: ``E[Y^4; Y > T] <= UPPER_TAIL * E[Y^4]``."""
    lm = lambda r: (1.0 - beta) * math.lgamma(r + 1.0)  # noqa: E731
    return min(math.exp((lm(4 + k) - lm(4) - math.log(UPPER_TAIL)) / k) for k in range(1, 80))


@dataclass(frozen=True)
class MixingLaw:
    """Tabulated density and CDF of the mixing variable, with moment certificates.

    ``certificates[r]`` is the tabulated ``int t^r m(t) dt`` divided by its exact
    value ``(r!)^{1-beta}``, minus one.
    """

    beta: float
    t: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    xmax: float
    step: float
    certificates: tuple

    @property
    def key(self) -> str:
        return _cache_key(self.beta, float(self.t[0]), float(self.t[-1]), self.t.size, self.xmax, self.step)

    def moment(self, r: float) -> float:
        """Moment of order ``r`` by Simpson's rule in ``log t`` over the table."""
        return float(simpson(self.t ** (r + 1.0) * self.density, x=np.log(self.t)))

    def laplace(self, s: float) -> float:
        """``int e^{-s t} m(t) dt`` over the table."""
        return float(simpson(self.t * np.exp(-s * self.t) * self.density, x=np.log(self.t)))

    def check(self, tol: float = 1e-3) -> None:
        """Raise :class:`~hlrs.errors.MixingLawError` if an invariant of the table fails."""
        if self.density.min() < -1e-6:
            raise MixingLawError(f"density dips to {self.density.min():.3g}")
        if np.any(np.diff(self.cdf) < -1e-10) or abs(self.cdf[-1] - 1.0) > 1e-4:
            raise MixingLawError("CDF table is not monotone up to 1")
        bad = [r for r, e in enumerate(self.certificates) if abs(e) > tol]
        if bad:
            raise MixingLawError(f"moment certificates fail for r={bad}: {self.certificates}")

    def quantile(self, u):
        """Inverse CDF by monotone cubic interpolation of the table."""
        u = np.asarray(u, dtype=np.float64)
        pchip, umax, tmax = self._inverse
        return np.where(u >= umax, tmax, pchip(np.minimum(u, umax)))

    @cached_property
    def _inverse(self):
        u = np.maximum.accumulate(np.concatenate([[0.0], self.cdf]))
        x = np.concatenate([[0.0], self.t])
        keep = np.concatenate([[True], np.diff(u) > 0])
        u, x = u[keep], x[keep]
        return PchipInterpolator(u, x, extrapolate=False), u[-1], x[-1]

    def to_csv(self, path) -> None:
        path = Path(path)
        header = (
            f"# hlrs-mixing-law,version={TABLE_VERSION},beta={self.beta!r},xmax={self.xmax!r},"
            f"step={self.step!r},key={self.key}\n"
            "t,density,cdf\n"
        )
        body = "\n".join(f"{a!r},{b!r},{c!r}" for a, b, c in zip(self.t.tolist(), self.density.tolist(), self.cdf.tolist()))
        path.write_text(header + body + "\n")

    @classmethod
    def from_csv(cls, path) -> "MixingLaw":
        path = Path(path)
        with path.open() as fh:
            first = fh.readline().strip()
        if not first.startswith("# hlrs-mixing-law"):
            raise MixingLawError(f"{path} is not a mixing-law table")
        meta = dict(kv.split("=", 1) for kv in first[2:].split(",")[1:])
        if int(meta["version"]) != TABLE_VERSION:
            raise MixingLawError(f"{path} has table version {meta['version']}, expected {TABLE_VERSION}")
        data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
        beta = float(meta["beta"])
        t, dens, cdf = data[:, 0].copy(), data[:, 1].copy(), data[:, 2].copy()
        return cls._assemble(beta, t, dens, cdf, float(meta["xmax"]), float(meta["step"]))

    @classmethod
    def _assemble(cls, beta, t, dens, cdf, xmax, step) -> "MixingLaw":
        for a in (t, dens, cdf):
            a.setflags(write=False)
        law = cls(beta, t, dens, cdf, xmax, step, ())
        certs = tuple(law.moment(r) / mixing_moment(beta, r) - 1.0 for r in range(5))
        return cls(beta, t, dens, cdf, xmax, step, certs)


_LAWS: dict = {}


def _cache_key(beta, tmin, tmax, n, xmax, step) -> str:
    raw = f"{TABLE_VERSION}|{beta!r}|{tmin!r}|{tmax!r}|{n}|{xmax!r}|{step!r}"
    return hashlib.sha256(raw.encode()).hexdigest()[:16]


def _cache_dir() -> Optional[Path]:
    d = os.environ.get("HLRS_CACHE_DIR")
    return Path(d) if d else None


def build_mixing_law(beta, *, n_grid: int = N_GRID, step: float = MELLIN_STEP, use_cache: bool = True) -> MixingLaw:
    """Tabulate the mixing law on a geometric grid over ``[T_MIN, T_max]`` and register it.

    ``T_max`` comes from a Markov bound on the moments so the share of the
    fourth moment beyond the table is below ``UPPER_TAIL``.  When
    ``HLRS_CACHE_DIR`` is set, tables are read from and written to
    ``<dir>/mixing_<key>.csv``.
    """
    beta = _check_beta_lt1(beta)
    xmax = mellin_truncation(beta)
    tmax = _upper_support(beta)
    key = _cache_key(beta, T_MIN, tmax, int(n_grid), xmax, float(step))
    cache = _cache_dir() if use_cache else None
    law = None
    if cache is not None:
        path = cache / f"mixing_{key}.csv"
        if path.exists():
            law = MixingLaw.from_csv(path)
    if law is None:
        t = np.geomspace(T_MIN, tmax, int(n_grid))
        dens = _mellin_line(beta, 0.0, t, False, step, xmax) / t
        cdf = _mellin_line(beta, _CDF_ABSCISSA, t, True, step, xmax)
        law = MixingLaw._assemble(beta, t, dens, cdf, xmax, float(step))
        if cache is not None:
            cache.mkdir(parents=True, exist_ok=True)
            law.to_csv(cache / f"mixing_{key}.csv")
    law.check()
    _LAWS[beta] = law
    return law


def get_mixing_law(beta, *, build: bool = False) -> Optional[MixingLaw]:
    """The registered table for ``beta``; built on demand only if ``build`` is true."""
    beta = as_beta(beta)
    law = _LAWS.get(beta)
    if law is None and build and beta < 1.0:
        law = build_mixing_law(beta)
    return law


def sample_mixing(beta, n: int, seed: int, *, first_index: int = 0) -> np.ndarray:
    """Draw ``n`` mixing variables; draw ``k`` uses the counter stream of index ``first_index + k``.

    ``beta = 1`` returns ones.  Otherwise the table must have been built with
    :func:`build_mixing_law` (a :class:`~hlrs.errors.MixingLawError` is raised
    if not).
    """
    beta = as_beta(beta)
    n = int(n)
    if n < 1:
        raise ParameterError("sample_mixing needs n >= 1")
    if beta == 1.0:
        return np.ones(n)
    law = _LAWS.get(beta)
    if law is None:
        raise MixingLawError(f"mixing law for beta={beta} has not been built; call build_mixing_law first")
    u = rng.uniforms(seed, rng.MIXING, np.arange(first_index, first_index + n))
    return law.quantile(u)


def mixed_moments(beta, orders) -> float:
    """Mixed moment ``E[prod_j X_j^{r_j}]`` of the n-dimensional Le Roy measure.

    Zero if any order is odd, else ``2^{-m} (m!)^{1-beta} prod_j (2 m_j)!/m_j!`` with ``m = sum m_j``.
    """
    beta = as_beta(beta)
    orders = [int(r) for r in orders]
    if not orders or any(r < 0 for r in orders):
        raise ParameterError("orders must be a non-empty list of non-negative integers")
    if any(r % 2 for r in orders):
        return 0.0
    ms = [r // 2 for r in orders]
    m = sum(ms)
    prod = 1
    for mj in ms:
        prod *= math.factorial(2 * mj) // math.factorial(mj)
    return math.exp((1.0 - beta) * math.lgamma(m + 1.0)) * prod / 2.0**m


def grey_moment(beta, norm_sq: float, order: int) -> float:
    """Moment of order ``order`` of a pairing with squared norm ``norm_sq``: ``(2m)!/(2^m (m!)^beta) norm_sq^m``."""
    beta = as_beta(beta)
    norm_sq = float(norm_sq)
    order = int(order)
    if norm_sq < 0 or order < 0:
        raise ParameterError("grey_moment needs norm_sq >= 0 and a non-negative order")
    if order % 2:
        return 0.0
    m = order // 2
    return math.factorial(2 * m) / (2.0**m * math.factorial(m) ** beta) * norm_sq**m


@dataclass(frozen=True)
class LeRoyHermite:
    """Monic orthogonal polynomial; ``coefficients[k]`` multiplies ``x**k``."""

    beta: float
    degree: int
    coefficients: tuple

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64), self.coefficients)


def _hermite_coefficients(beta: float, j: int) -> tuple:
    if j == 0:
        return (1.0,)
    if j == 1:
        return (0.0, 1.0)
    if j == 2:
        return (-1.0, 0.0, 1.0)
    if j == 3:
        return (0.0, -6.0 / 2.0**beta, 0.0, 1.0)
    a2 = (6.0 - 90.0 * 3.0**-beta) / (6.0 - 2.0**beta)
    a0 = -6.0 / 2.0**beta - a2
    return (a0, 0.0, a2, 0.0, 1.0)


def hermite_poly(beta, j: int) -> LeRoyHermite:
    """Monic polynomial of degree ``j <= 4`` orthogonal under the one-dimensional Le Roy measure."""
    beta = as_beta(beta)
    j = int(j)
    if not 0 <= j <= 4:
        raise ParameterError("Le Roy-Hermite polynomials are provided for degrees 0..4")
    return LeRoyHermite(beta, j, _hermite_coefficients(beta, j))


def product_defect(beta) -> float:
    """``int H_4(x_1) H_2(x_2) dnu^2_beta``, zero exactly when ``beta = 1``.

    ``[(18 - 6 3^beta)(6 - 2^beta) + (2 3^beta - 6^beta)(6 - 90 3^{-beta})] / (6^beta (6 - 2^beta))``.
    """
    beta = as_beta(beta)
    p2, p3, p6 = 2.0**beta, 3.0**beta, 6.0**beta
    return ((18.0 - 6.0 * p3) * (6.0 - p2) + (2.0 * p3 - p6) * (6.0 - 90.0 / p3)) / (p6 * (6.0 - p2))


def product_defect_from_moments(beta) -> float:
    """The same integral expanded monomial by monomial through :func:`mixed_moments`."""
    beta = as_beta(beta)
    h4 = hermite_poly(beta, 4).coefficients
    h2 = hermite_poly(beta, 2).coefficients
    total = 0.0
    for i, ci in enumerate(h4):
        for k, ck in enumerate(h2):
            if ci and ck:
                total += ci * ck * mixed_moments(beta, [i, k])
    return total

