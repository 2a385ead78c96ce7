"""Hadamard fractional Brownian motion, the Le Roy-Hadamard motion and the LH-OU process."""

from . import errors, hadamard, hfbm, leroy, rng, simulate, specfun, verify
from ._backend import available as available_backends
from ._backend import set_backend
from .errors import HLRSError

__version__ = "0.1.0"

__all__ = [
    "errors",
    "hadamard",
    "hfbm",
    "leroy",
    "rng",
    "simulate",
    "specfun",
    "verify",
    "set_backend",
    "available_backends",
    "HLRSError",
]
