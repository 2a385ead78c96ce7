"""Command-line front end.

Every CSV written here starts with one ``# hlrs {...}`` comment line holding
the full run configuration as JSON, so a file can be regenerated from its own
header.  Exit status is 0 on success, 1 on invalid parameters or numerical
domain errors, and 2 when a verification check fails.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import hfbm, leroy, rng, simulate, verify
from .errors import HLRSError, ParameterError
from .specfun import as_alpha, as_beta

__all__ = ["GridSpec", "RunConfig", "parse_grid", "run", "main"]

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_FAILED_CHECK = 2

GENERATORS = ("factorization", "kernel-quadrature", "lhm")


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    spacing: str = "uniform"

    def __post_init__(self):
        if self.spacing not in ("uniform", "geometric"):
            raise ParameterError(f"grid spacing must be uniform or geometric, got {self.spacing!r}")
        if self.count < 1:
            raise ParameterError("grid count must be at least 1")
        if self.spacing == "geometric" and self.start <= 0:
            raise ParameterError("a geometric grid needs start > 0")

    def grid(self) -> hfbm.TimeGrid:
        if self.spacing == "geometric":
            return hfbm.TimeGrid.geometric(self.start, self.stop, self.count)
        return hfbm.TimeGrid.uniform(self.start, self.stop, self.count)


def parse_grid(text: str) -> GridSpec:
    """Parse ``start:stop:count[:geo]``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("geo", "uniform")):
        raise ParameterError(f"grid spec {text!r} is not start:stop:count[:geo]")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ParameterError(f"grid spec {text!r}: {exc}") from None
    spacing = "geometric" if len(parts) == 4 and parts[3] == "geo" else "uniform"
    return GridSpec(start, stop, count, spacing)


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output."""

    subcommand: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    grid: Optional[GridSpec] = None
    n_paths: Optional[int] = None
    n_steps: Optional[int] = None
    seed: int = rng.DEFAULT_SEED
    theta: Optional[float] = None
    sigma: Optional[float] = None
    y0: Optional[float] = None
    generator: Optional[str] = None
    options: dict = field(default_factory=dict)
    out: Optional[str] = None

    def validate(self) -> None:
        """Enforce every parameter window before any computation starts."""
        if self.alpha is not None:
            as_alpha(self.alpha)
        if self.beta is not None:
            as_beta(self.beta)
        if self.n_paths is not None and self.n_paths < 1:
            raise ParameterError("n_paths must be at least 1")
        if self.n_steps is not None and self.n_steps < 1:
            raise ParameterError("n_steps must be at least 1")
        if self.theta is not None:
            simulate.OUParams(self.theta, self.sigma or 1.0, self.y0 or 0.0)
        if self.generator is not None and self.generator not in GENERATORS:
            raise ParameterError(f"unknown generator {self.generator!r}")
        if self.grid is not None:
            self.grid.grid()

    def header(self) -> str:
        cfg = {k: v for k, v in asdict(self).items() if k != "out" and v is not None}
        return "hlrs " + json.dumps(cfg, sort_keys=True, separators=(",", ":"))


class _Parser(argparse.ArgumentParser):
    """Usage errors are parameter errors (exit 1), keeping exit 2 for failed checks."""

    def error(self, message):
        raise ParameterError(f"{self.prog}: {message}")


def _grid_arg(text):
    try:
        return parse_grid(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hlrs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, *, grid=True, seed=False):
        p.add_argument("--alpha", type=float, default=0.5, help="Hadamard order in (0,2)")
        if grid:
            p.add_argument("--grid", type=_grid_arg, required=True, help="start:stop:count[:geo]")
        if seed:
            p.add_argument("--seed", type=int, default=rng.DEFAULT_SEED)
            p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", help="output directory (default: write to stdout)")

    p = sub.add_parser("simulate", help="simulate H-fBm or LHm sample paths")
    common(p, seed=True)
    p.add_argument("--generator", choices=GENERATORS, default="factorization")
    p.add_argument("--beta", type=float, default=1.0, help="Le Roy order in (0,1] (lhm only)")
    p.add_argument("--n-paths", type=int, default=1000)
    p.add_argument("--n-steps", type=int, default=1024, help="partition size (kernel-quadrature only)")

    p = sub.add_parser("cov", help="covariance matrix or pairwise table on a grid")
    common(p)
    p.add_argument("--format", choices=("matrix", "pairs"), default="matrix")

    p = sub.add_parser("memory", help="memory ratio table")
    common(p, grid=False)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--m", type=_int_list, default=[10, 100, 1000, 10000])

    p = sub.add_parser("leroy", help="build (or load) the mixing law and emit its density and CDF")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", help="output directory (default: write to stdout)")

    p = sub.add_parser("verify", help="run verification checks and emit JSON reports")
    common(p, grid=False, seed=True)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--check", action="append", choices=verify.CHECKS + ("all",),
                   help="check to run (repeatable; default all)")
    p.add_argument("--n-paths", type=int, default=100_000)
    p.add_argument("--n-steps", type=int, default=1024)

    p = sub.add_parser("ou", help="simulate LH-Ornstein-Uhlenbeck paths")
    common(p, seed=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--n-paths", type=int, default=1000)
    return parser


def _config(ns) -> RunConfig:
    get = lambda name: getattr(ns, name, None)  # noqa: E731
    options = {}
    for name in ("format", "t", "m", "check", "workers"):
        if get(name) is not None:
            options[name] = get(name)
    if ns.subcommand == "verify" and not options.get("check"):
        options["check"] = ["all"]
    cfg = RunConfig(
        subcommand=ns.subcommand,
        alpha=get("alpha") if ns.subcommand != "leroy" else None,
        beta=get("beta"),
        grid=get("grid"),
        n_paths=get("n_paths"),
        n_steps=get("n_steps") if ns.subcommand in ("verify",) or get("generator") == "kernel-quadrature" else None,
        seed=get("seed") if get("seed") is not None else rng.DEFAULT_SEED,
        theta=get("theta"),
        sigma=get("sigma") if ns.subcommand == "ou" else None,
        y0=get("y0"),
        generator=get("generator"),
        options=options,
        out=get("out"),
    )
    cfg.validate()
    return cfg


def _table(header: str, columns: list, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {header}\n")
    if columns:
        buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(cfg: RunConfig, name: str, text: str, stdout) -> None:
    if cfg.out is None:
        stdout.write(text)
        return
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _write_manifest(cfg: RunConfig, name: str, files: dict) -> None:
    manifest = {
        "config": json.loads(cfg.header()[5:]),
        "files": files,
        "created": datetime.now(timezone.utc).isoformat(),
    }
    (Path(cfg.out) / name).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _ensemble(cfg: RunConfig, ens: simulate.PathEnsemble, stdout) -> int:
    if cfg.out is None:
        stdout.write(ens.csv_text(cfg.header()))
        return EXIT_OK
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    ens.write(out / f"{cfg.subcommand}.csv", header=cfg.header(),
              extra={"config": json.loads(cfg.header()[5:]), "created": datetime.now(timezone.utc).isoformat()})
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig, stdout) -> int:
    grid, workers = cfg.grid.grid(), cfg.options.get("workers", 1)
    if cfg.generator == "factorization":
        ens = simulate.paths_factorization(cfg.alpha, grid, cfg.n_paths, cfg.seed, workers=workers)
    elif cfg.generator == "kernel-quadrature":
        ens = simulate.paths_kernel_quadrature(cfg.alpha, grid, cfg.n_steps, cfg.n_paths, cfg.seed, workers=workers)
    else:
        ens = simulate.paths_lhm(cfg.alpha, cfg.beta, grid, cfg.n_paths, cfg.seed, workers=workers)
    return _ensemble(cfg, ens, stdout)


def _cmd_ou(cfg: RunConfig, stdout) -> int:
    ou = simulate.OUParams(cfg.theta, cfg.sigma, cfg.y0)
    ens = simulate.paths_ou(cfg.alpha, cfg.beta, ou, cfg.grid.grid(), cfg.n_paths, cfg.seed,
                            workers=cfg.options.get("workers", 1))
    return _ensemble(cfg, ens, stdout)


def _cmd_cov(cfg: RunConfig, stdout) -> int:
    t = cfg.grid.grid().times
    cov = hfbm.covariance_matrix(cfg.alpha, t).entries
    if cfg.options["format"] == "matrix":
        text = _table(cfg.header(), [], cov.tolist())
    else:
        rows = [(float(t[i]), float(t[j]), float(cov[i, j])) for i in range(t.size) for j in range(i, t.size)]
        text = _table(cfg.header(), ["s", "t", "cov"], rows)
    _emit(cfg, "cov.csv", text, stdout)
    return EXIT_OK


def _cmd_memory(cfg: RunConfig, stdout) -> int:
    rep = hfbm.memory_ratio_report(cfg.alpha, cfg.options["t"], cfg.options["m"])
    text = _table(cfg.header(), ["m", "ratio"], zip(rep.m_values, rep.ratios))
    _emit(cfg, "memory.csv", text, stdout)
    return EXIT_OK


def _cmd_leroy(cfg: RunConfig, stdout) -> int:
    if cfg.beta == 1.0:
        raise ParameterError("the mixing law at beta=1 is a point mass at 1; choose beta in (0,1)")
    law = leroy.build_mixing_law(cfg.beta)
    text = _table(cfg.header(), ["t", "density", "cdf"], zip(law.t.tolist(), law.density.tolist(), law.cdf.tolist()))
    _emit(cfg, "mixing.csv", text, stdout)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig, stdout) -> int:
    names = cfg.options["check"]
    names = verify.CHECKS if "all" in names else tuple(dict.fromkeys(names))
    reports = verify.run_checks(names, alpha=cfg.alpha, beta=cfg.beta, seed=cfg.seed,
                                n_paths=cfg.n_paths, n_steps=cfg.n_steps)
    text = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True, allow_nan=False) + "\n"
    _emit(cfg, "verify.json", text, stdout)
    if cfg.out is not None:
        for r in reports:
            stdout.write(f"{r.name}: {'pass' if r.passed else 'FAIL'} "
                         f"(residual {r.residual:.3g}, tolerance {r.tolerance:.3g})\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED_CHECK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "cov": _cmd_cov,
    "memory": _cmd_memory,
    "leroy": _cmd_leroy,
    "verify": _cmd_verify,
    "ou": _cmd_ou,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run the CLI on ``argv`` and return the exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        cfg = _config(build_parser().parse_args(argv))
        return _COMMANDS[cfg.subcommand](cfg, stdout)
    except HLRSError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
