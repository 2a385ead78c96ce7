"""Sample paths of the Hadamard fBm, the Le Roy-Hadamard motion and the LH-OU process.

All generators draw path ``k`` from its own counter-based stream (see
:mod:`hlrs.rng`), and paths are produced in fixed blocks of absolute path
indices, so the output is bit-identical for any number of workers.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gammaincc

from . import quadrature, rng
from .errors import ParameterError
from .hfbm import TimeGrid, covariance_matrix
from .leroy import get_mixing_law, sample_mixing
from .specfun import as_alpha, as_beta

__all__ = [
    "OUParams",
    "PathEnsemble",
    "paths_factorization",
    "paths_kernel_quadrature",
    "kernel_quadrature_weights",
    "kernel_quadrature_covariance",
    "paths_lhm",
    "paths_ou",
    "ou_kernel",
    "ou_kernel_inner",
    "BLOCK",
]

#: paths per generation block; blocks are aligned on absolute path indices
BLOCK = 2048
#: internal refinement of the output grid for the OU integral
OU_REFINE = 8


@dataclass(frozen=True)
class OUParams:
    """Mean-reversion rate ``theta > 0``, volatility ``sigma`` and start ``y0``."""

    theta: float
    sigma: float = 1.0
    y0: float = 0.0

    def __post_init__(self):
        if not float(self.theta) > 0:
            raise ParameterError(f"theta must be > 0, got {self.theta}")


@dataclass(frozen=True)
class PathEnsemble:
    """Sample paths (rows) on a time grid (columns) with their provenance."""

    grid: TimeGrid
    values: np.ndarray
    generator: str
    seed: int
    params: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    def manifest(self) -> dict:
        return {
            "generator": self.generator,
            "seed": int(self.seed),
            "n_paths": self.n_paths,
            "grid": [float(t) for t in self.grid.times],
            "params": dict(self.params),
        }

    def csv_text(self, header: str | None = None) -> str:
        """CSV body under a one-line ``#`` comment (``header`` replaces the default provenance line)."""
        head = header if header is not None else ",".join(
            [f"generator={self.generator}"]
            + [f"{k}={v}" for k, v in self.params.items()]
            + [f"seed={self.seed}", f"n_paths={self.n_paths}"]
        )
        lines = [f"# {head}", "path_id,t,value"]
        times = [repr(float(t)) for t in self.grid.times]
        for k, row in enumerate(self.values.tolist()):
            lines.extend(f"{k},{t},{v!r}" for t, v in zip(times, row))
        return "\n".join(lines) + "\n"

    def write(self, csv_path, manifest_path=None, extra: dict | None = None, header: str | None = None) -> dict:
        """Write ``path_id,t,value`` CSV and a JSON manifest holding its SHA-256."""
        csv_path = Path(csv_path)
        text = self.csv_text(header)
        csv_path.write_text(text)
        manifest = self.manifest()
        manifest["csv"] = csv_path.name
        manifest["sha256"] = hashlib.sha256(text.encode()).hexdigest()
        if extra:
            manifest.update(extra)
        manifest_path = Path(manifest_path) if manifest_path else csv_path.with_suffix(".json")
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return manifest

    @classmethod
    def read_csv(cls, csv_path) -> "PathEnsemble":
        """Read a file written by :meth:`write`; the header may be ``k=v`` pairs or a JSON run config."""
        csv_path = Path(csv_path)
        with csv_path.open() as fh:
            head = fh.readline()[2:].strip()
        if head.startswith("hlrs "):
            meta = json.loads(head[5:])
        else:
            meta = dict(kv.split("=", 1) for kv in head.split(","))
        data = np.loadtxt(csv_path, delimiter=",", skiprows=2, ndmin=2)
        n_paths = int(data[-1, 0]) + 1
        times = data[: data.shape[0] // n_paths, 1]
        values = data[:, 2].reshape(n_paths, times.size)
        meta.pop("n_paths", None)
        generator = str(meta.pop("generator", meta.get("subcommand", "unknown")))
        seed = int(meta.pop("seed"))
        return cls(TimeGrid(times), values, generator, seed, meta)


def _check_count(n_paths) -> int:
    n = int(n_paths)
    if n < 1:
        raise ParameterError("n_paths must be >= 1")
    return n


def _blocked(n_paths: int, make_block, width: int, workers: int) -> np.ndarray:
    """Run ``make_block(first, count)`` on aligned blocks and stack the rows in path order."""
    starts = list(range(0, n_paths, BLOCK))
    out = np.empty((n_paths, width))

    def run(first):
        out[first:first + min(BLOCK, n_paths - first)] = make_block(first, min(BLOCK, n_paths - first))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            list(pool.map(run, starts))
    else:
        for first in starts:
            run(first)
    return out


def _gaussian_paths(alpha: float, grid: TimeGrid, n_paths: int, seed: int, workers: int) -> np.ndarray:
    cov = covariance_matrix(alpha, grid)
    k = 1 if grid.has_origin else 0
    chol_t = np.ascontiguousarray(cov.cholesky[k:, k:].T)
    width = len(grid)

    def block(first, count):
        z = rng.normals(seed, rng.GAUSSIAN, np.arange(first, first + count), width - k)
        vals = np.zeros((count, width))
        vals[:, k:] = z @ chol_t
        return vals

    return _blocked(n_paths, block, width, workers)


def paths_factorization(alpha, grid, n_paths: int, seed: int = rng.DEFAULT_SEED, *, workers: int = 1) -> PathEnsemble:
    """Exact Gaussian paths ``L z`` from the Cholesky factor of the covariance on ``grid``."""
    alpha = as_alpha(alpha)
    grid = TimeGrid.of(grid)
    n_paths = _check_count(n_paths)
    vals = _gaussian_paths(alpha, grid, n_paths, int(seed), workers)
    return PathEnsemble(grid, vals, "factorization", int(seed), {"alpha": alpha, "beta": 1.0})


def kernel_quadrature_weights(alpha, grid, n_steps: int) -> tuple[np.ndarray, float]:
    """Panel-averaged moving-average kernel on a uniform partition of ``(0, T]``.

    Row ``j`` holds ``(n/T) int_{s_i}^{min(s_{i+1}, t_j)} (log(t_j/s))^{(alpha-1)/2} ds / sqrt(Gamma(alpha))``.
    The panel containing ``t_j`` (integrable singularity) and the first panel
    (logarithmic growth at ``s = 0``) use the closed form
    ``t Gamma(e+1) [Q(e+1, log(t/b)) - Q(e+1, log(t/a))]``; all other panels use
    8-point Gauss-Legendre.  Returns ``(weights, dt)``.
    """
    alpha = as_alpha(alpha)
    grid = TimeGrid.of(grid)
    n = int(n_steps)
    times = grid.times
    if n < len(grid):
        raise ParameterError("n_steps must be at least the number of grid points")
    T = float(times[-1])
    dt = T / n
    e = (alpha - 1.0) / 2.0
    edges = dt * np.arange(n + 1)
    edges[-1] = T
    xg, wg = quadrature.gauss_legendre(8)
    ge = math.gamma(e + 1.0)
    out = np.zeros((times.size, n))
    for j, t in enumerate(times):
        if t == 0.0:
            continue
        last = min(int(np.searchsorted(edges, t, side="left")) - 1, n - 1)
        last = max(last, 0)
        # regular panels 1 .. last-1 by Gauss-Legendre
        if last > 1:
            a = edges[1:last]
            s = a[:, None] + dt * xg[None, :]
            out[j, 1:last] = (np.log(t / s) ** e) @ wg
        # closed form on the first panel and the panel holding t
        for i in {0, last}:
            a, b = edges[i], min(edges[i + 1], t)
            if b <= a:
                continue
            hi = gammaincc(e + 1.0, math.log(t / a)) if a > 0 else 0.0
            lo = gammaincc(e + 1.0, math.log(t / b))
            out[j, i] = t * ge * (lo - hi) / dt
    return out / math.sqrt(math.gamma(alpha)), dt


def kernel_quadrature_covariance(alpha, grid, n_steps: int) -> np.ndarray:
    """Exact covariance of the kernel-quadrature scheme (its deterministic bias is this minus the closed form)."""
    w, dt = kernel_quadrature_weights(alpha, grid, n_steps)
    return (w * dt) @ w.T


def paths_kernel_quadrature(alpha, grid, n_steps: int, n_paths: int, seed: int = rng.DEFAULT_SEED, *,
                            workers: int = 1) -> PathEnsemble:
    """Moving-average discretization: Brownian increments on a uniform partition weighted by panel-averaged kernels."""
    alpha = as_alpha(alpha)
    grid = TimeGrid.of(grid)
    n_paths = _check_count(n_paths)
    seed = int(seed)
    w, dt = kernel_quadrature_weights(alpha, grid, n_steps)
    wt = np.ascontiguousarray(w.T) * math.sqrt(dt)
    n = int(n_steps)

    def block(first, count):
        z = rng.normals(seed, rng.GAUSSIAN, np.arange(first, first + count), n)
        return z @ wt

    vals = _blocked(n_paths, block, len(grid), workers)
    return PathEnsemble(grid, vals, "kernel-quadrature", seed, {"alpha": alpha, "beta": 1.0, "n_steps": n})


def paths_lhm(alpha, beta, grid, n_paths: int, seed: int = rng.DEFAULT_SEED, *, workers: int = 1) -> PathEnsemble:
    """Le Roy-Hadamard paths ``sqrt(Y_k) B_k`` with ``B_k`` from :func:`paths_factorization`.

    ``Y_k`` comes from the mixing stream of path ``k``, disjoint from its
    Gaussian stream, so ``beta = 1`` reproduces the Gaussian paths bit for bit.
    The mixing table is built on first use.
    """
    alpha, beta = as_alpha(alpha), as_beta(beta)
    grid = TimeGrid.of(grid)
    n_paths = _check_count(n_paths)
    seed = int(seed)
    vals = _gaussian_paths(alpha, grid, n_paths, seed, workers)
    if beta < 1.0:
        get_mixing_law(beta, build=True)
        vals *= np.sqrt(sample_mixing(beta, n_paths, seed))[:, None]
    return PathEnsemble(grid, vals, "lhm", seed, {"alpha": alpha, "beta": beta})


def _refined(grid: TimeGrid, factor: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid ``[0, t_1, ...]`` with every interval split ``factor`` times, and the positions of the output times."""
    knots = np.concatenate([[0.0], grid.positive])
    pieces = [np.array([0.0])]
    for a, b in zip(knots[:-1], knots[1:]):
        pieces.append(a + (b - a) * np.arange(1, factor + 1) / factor)
    fine = np.concatenate(pieces)
    fine[factor::factor] = knots[1:]
    idx = np.searchsorted(fine, grid.times)
    return fine, idx


def paths_ou(alpha, beta, ou: OUParams, grid, n_paths: int, seed: int = rng.DEFAULT_SEED, *,
             refine: int = OU_REFINE, workers: int = 1) -> PathEnsemble:
    """LH-Ornstein-Uhlenbeck paths from the pathwise solution of the Langevin equation.

    ``Y(t) = y0 e^{-theta t} + sigma B(t) - theta sigma int_0^t e^{theta(s-t)} B(s) ds`` with ``B`` an
    LHm path simulated exactly on the output grid refined ``refine`` times (at least 8);
    the time integral is the trapezoid rule on the refined grid.
    """
    grid = TimeGrid.of(grid)
    if int(refine) < 8:
        raise ParameterError("the OU refinement factor must be at least 8")
    fine, idx = _refined(grid, int(refine))
    base = paths_lhm(alpha, beta, fine, n_paths, seed, workers=workers)
    b = base.values
    theta, sigma, y0 = float(ou.theta), float(ou.sigma), float(ou.y0)
    # cumulative trapezoid of e^{theta s} B(s), then scale by e^{-theta t}
    f = np.exp(theta * fine)[None, :] * b
    cum = np.concatenate([np.zeros((b.shape[0], 1)), np.cumsum(0.5 * np.diff(fine) * (f[:, 1:] + f[:, :-1]), axis=1)], axis=1)
    damp = np.exp(-theta * fine)
    y = y0 * damp[None, :] + sigma * b - theta * sigma * damp[None, :] * cum
    vals = np.ascontiguousarray(y[:, idx])
    params = {"alpha": base.params["alpha"], "beta": base.params["beta"], "theta": theta, "sigma": sigma,
              "y0": y0, "refine": int(refine)}
    return PathEnsemble(grid, vals, "ou", int(seed), params)


def ou_kernel(alpha, ou: OUParams, t: float, x: float, *, literal: bool = False) -> float:
    """Moving-average kernel of the LH-OU process at ``(t, x)``.

    ``(1/sqrt(Gamma(alpha))) [ (log(t/x))_+^e - theta int_x^t e^{theta(s-t)} (log(s/x))^e ds ]`` with
    ``e = (alpha-1)/2``, zero for ``x >= t``.  The factor ``theta`` in front of the
    integral follows from the pathwise solution; ``literal=True`` drops it.
    """
    alpha = as_alpha(alpha)
    t, x = float(t), float(x)
    if not (t > 0 and x > 0):
        raise ParameterError("ou_kernel needs t, x > 0")
    if x >= t:
        return 0.0
    theta = float(ou.theta)
    e = (alpha - 1.0) / 2.0
    span = math.log(t / x)

    # s = x e^w: the weight w^e is handled by the Gauss-Jacobi first panel
    def g(w):
        s = x * np.exp(w)
        return np.exp(theta * (s - t)) * s

    edges = tuple(sorted({0.0, span} | {u for u in quadrature.BASE_EDGES if u < span}))
    inner = float(quadrature.halfline(g, e, rtol=1e-11, breakpoints=(), check_tail=False, edges=edges))
    factor = 1.0 if literal else theta
    return (span**e - factor * inner) / math.sqrt(math.gamma(alpha))


def ou_kernel_inner(alpha, ou: OUParams, t: float, s: float, *, literal: bool = False, rtol: float = 1e-7) -> float:
    """``int_0^inf h_t(x) h_s(x) dx`` by quadrature in ``v = log(min(t,s)/x)``."""
    alpha = as_alpha(alpha)
    lo, hi = sorted((float(t), float(s)))
    e = (alpha - 1.0) / 2.0
    # h at the smaller time behaves like v**e near v = 0; the other factor is regular unless t = s
    p = 2.0 * e if lo == hi else e

    def g(v):
        v = np.atleast_1d(v)
        x = lo * np.exp(-v)
        a = np.array([ou_kernel(alpha, ou, lo, xx, literal=literal) for xx in x])
        b = a if lo == hi else np.array([ou_kernel(alpha, ou, hi, xx, literal=literal) for xx in x])
        return a * b * x / v**p

    return float(quadrature.halfline(g, p, rtol=rtol, n=12, max_level=6, check_tail=False))
