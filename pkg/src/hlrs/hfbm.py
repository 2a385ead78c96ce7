"""Second-order structure of the Hadamard fractional Brownian motion.

The covariance of the process at ``s <= t`` is
``C_alpha * s * Psi((1-alpha)/2, 1-alpha; log(t/s))``, with variance ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalPSDError, ParameterError
from .specfun import as_alpha, normalized_psi

__all__ = [
    "TimeGrid",
    "CovarianceMatrix",
    "MemoryRatioReport",
    "covariance",
    "covariance_matrix",
    "increment_variance",
    "increment_cross_covariance",
    "memory_ratio",
    "memory_ratios",
    "memory_ratio_report",
    "memory_numerator",
    "joint_charfn_exponent",
]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times; only the first may be zero."""

    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64).ravel()
        if t.size == 0:
            raise ParameterError("a time grid needs at least one point")
        if not np.all(np.isfinite(t)):
            raise ParameterError("grid times must be finite")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("grid times must be strictly increasing")
        if t[0] < 0 or (t.size > 1 and t[1] <= 0) or (t.size == 1 and t[0] < 0):
            raise ParameterError("grid times must be positive (a leading 0 is allowed)")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @classmethod
    def of(cls, times) -> "TimeGrid":
        return times if isinstance(times, cls) else cls(times)

    @classmethod
    def uniform(cls, start: float, stop: float, count: int) -> "TimeGrid":
        return cls(np.linspace(start, stop, int(count)))

    @classmethod
    def geometric(cls, start: float, stop: float, count: int) -> "TimeGrid":
        return cls(np.geomspace(start, stop, int(count)))

    @property
    def has_origin(self) -> bool:
        return self.times[0] == 0.0

    @property
    def positive(self) -> np.ndarray:
        """Times with the optional leading zero removed."""
        return self.times[1:] if self.has_origin else self.times

    def scaled(self, factor: float) -> "TimeGrid":
        return TimeGrid(self.times * float(factor))

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class CovarianceMatrix:
    """Gram matrix of the process on a grid, with its Cholesky factor.

    ``jitter`` records the diagonal shift needed for the factorization (0 when
    none was needed).  Rows for a leading zero time are identically zero and
    carry a zero row in ``cholesky``.
    """

    grid: TimeGrid
    entries: np.ndarray
    cholesky: np.ndarray
    jitter: float = 0.0


@dataclass(frozen=True)
class MemoryRatioReport:
    alpha: float
    t: int
    m_values: tuple
    ratios: tuple
    numerator: float
    extra: dict = field(default_factory=dict)


def covariance(alpha, s, t):
    """Covariance of the process at times ``s`` and ``t`` (broadcasting).

    Zero when either time is zero, ``t`` on the diagonal, ``min(s, t)`` at
    ``alpha = 1``.
    """
    alpha = as_alpha(alpha)
    s_arr, t_arr = np.broadcast_arrays(np.asarray(s, dtype=np.float64), np.asarray(t, dtype=np.float64))
    if np.any(s_arr < 0) or np.any(t_arr < 0):
        raise ParameterError("covariance is defined for s, t >= 0")
    shape = s_arr.shape
    lo = np.minimum(s_arr, t_arr).ravel()
    hi = np.maximum(s_arr, t_arr).ravel()
    out = lo.copy()
    if alpha != 1.0:
        off = (lo > 0) & (hi > lo)
        if np.any(off):
            z = np.log(hi[off] / lo[off])
            out[off] = lo[off] * normalized_psi(alpha, z)
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def _cholesky_with_jitter(entries: np.ndarray):
    scale = float(np.max(np.diag(entries))) if entries.size else 1.0
    try:
        return np.linalg.cholesky(entries), 0.0
    except np.linalg.LinAlgError:
        pass
    eye = np.eye(entries.shape[0])
    delta = 1e-14 * scale
    while delta <= 1e-10 * scale * (1 + 1e-12):
        try:
            return np.linalg.cholesky(entries + delta * eye), delta
        except np.linalg.LinAlgError:
            delta *= 2.0
    min_eig = float(np.linalg.eigvalsh(entries)[0])
    raise NumericalPSDError(
        f"covariance matrix not positive definite after jitter {1e-10 * scale:.3g}; min eigenvalue {min_eig:.3g}",
        min_eig,
    )


def covariance_matrix(alpha, grid) -> CovarianceMatrix:
    """Covariance matrix on ``grid`` and its (possibly jittered) Cholesky factor.

    Jitter ``delta I`` doubles from ``1e-14`` to ``1e-10`` times the largest
    diagonal entry; beyond that :class:`~hlrs.errors.NumericalPSDError` is raised.
    """
    alpha = as_alpha(alpha)
    grid = TimeGrid.of(grid)
    t = grid.times
    entries = covariance(alpha, t[:, None], t[None, :])
    entries = np.atleast_2d(entries)
    entries = 0.5 * (entries + entries.T)
    np.fill_diagonal(entries, t)
    k = 1 if grid.has_origin else 0
    chol = np.zeros_like(entries)
    jitter = 0.0
    if t.size > k:
        sub, jitter = _cholesky_with_jitter(entries[k:, k:])
        chol[k:, k:] = sub
    entries.setflags(write=False)
    chol.setflags(write=False)
    return CovarianceMatrix(grid, entries, chol, jitter)


def increment_variance(alpha, s, t):
    """Variance of ``B(t) - B(s)``: ``t + s - 2 cov(s, t)``."""
    s_arr = np.asarray(s, dtype=np.float64)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(s_arr < 0) or np.any(s_arr >= t_arr):
        raise ParameterError("increment_variance needs 0 <= s < t")
    out = t_arr + s_arr - 2.0 * np.asarray(covariance(alpha, s_arr, t_arr))
    return float(out) if np.ndim(out) == 0 else out


def increment_cross_covariance(alpha, u: float, v: float, s: float, t: float) -> float:
    """Covariance of ``B(v) - B(u)`` and ``B(t) - B(s)`` for ``0 < u < v <= s < t``."""
    if not (0 < u < v <= s < t):
        raise ParameterError("need 0 < u < v <= s < t")
    c = lambda a, b: covariance(alpha, a, b)  # noqa: E731
    return c(t, v) - c(t, u) - c(s, v) + c(s, u)


def _unit_increment_variances(alpha: float, j: np.ndarray) -> np.ndarray:
    """``Var(B(j) - B(j-1))`` for integers ``j >= 1`` (equal to 1 at ``j = 1``)."""
    j = np.asarray(j, dtype=np.float64)
    out = np.ones_like(j)
    big = j >= 2
    if np.any(big):
        jb = j[big]
        out[big] = 2.0 * jb - 1.0 - 2.0 * (jb - 1.0) * normalized_psi(alpha, np.log(jb / (jb - 1.0)))
    return out


def memory_numerator(alpha, t: int) -> float:
    """``2t - 1 - 2(t-1) C_alpha Psi(log(t/(t-1)))``, the numerator constant of the memory ratio."""
    alpha = as_alpha(alpha)
    t = int(t)
    if t < 2:
        raise ParameterError("memory ratio needs integer t >= 2")
    return float(_unit_increment_variances(alpha, np.array([t]))[0])


def memory_ratio(alpha, t: int, m: int) -> float:
    """Memory ratio ``m C_{alpha,t} / sum_{j=tm-m+1}^{tm} rho(j-1, j)``; identically 1 at ``alpha = 1``."""
    alpha = as_alpha(alpha)
    t, m = int(t), int(m)
    if m < 1:
        raise ParameterError("memory ratio needs integer m >= 1")
    num = memory_numerator(alpha, t)
    if alpha == 1.0:
        return 1.0
    j = np.arange(t * m - m + 1, t * m + 1)
    den = float(np.sum(_unit_increment_variances(alpha, j)))
    return m * num / den


def memory_ratios(alpha, t: int, m_values) -> np.ndarray:
    """:func:`memory_ratio` for many ``m`` at once.

    The unit-increment variances up to ``t max(m)`` are evaluated once and each
    denominator is a difference of their cumulative sums.
    """
    alpha = as_alpha(alpha)
    t = int(t)
    ms = np.asarray([int(m) for m in m_values], dtype=np.int64)
    if ms.size and ms.min() < 1:
        raise ParameterError("memory ratio needs integer m >= 1")
    num = memory_numerator(alpha, t)
    if alpha == 1.0 or ms.size == 0:
        return np.ones(ms.size)
    csum = np.concatenate([[0.0], np.cumsum(_unit_increment_variances(alpha, np.arange(1, t * ms.max() + 1)))])
    return ms * num / (csum[t * ms] - csum[t * ms - ms])


def memory_ratio_report(alpha, t: int, m_values) -> MemoryRatioReport:
    alpha = as_alpha(alpha)
    ms = tuple(int(m) for m in m_values)
    ratios = tuple(float(r) for r in memory_ratios(alpha, t, ms))
    return MemoryRatioReport(alpha, int(t), ms, ratios, memory_numerator(alpha, t))


def joint_charfn_exponent(alpha, grid, k) -> float:
    """Quadratic form ``Q = k^T Sigma k``; the Gaussian characteristic function is ``exp(-Q/2)``."""
    grid = TimeGrid.of(grid)
    k = np.asarray(k, dtype=np.float64).ravel()
    if k.size != len(grid):
        raise ParameterError(f"k has {k.size} entries but the grid has {len(grid)}")
    cov = covariance_matrix(alpha, grid).entries
    return float(k @ cov @ k)
