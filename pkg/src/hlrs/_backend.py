"""Kernel backend selection.

The compiled :mod:`hlrs._ckernels` is used when it imports; otherwise, or when
``HLRS_PURE_PYTHON=1`` is set, the NumPy fallback :mod:`hlrs._pykernels` is used.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("HLRS_PURE_PYTHON") == "1" or _ckernels is None:
    kernels = _pykernels
    name = "python"
else:
    kernels = _ckernels
    name = "cython"


def available():
    return sorted(_BACKENDS)


def set_backend(backend: str) -> None:
    """Switch the active kernel backend (``"cython"`` or ``"python"``)."""
    global kernels, name
    try:
        kernels = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} unavailable; have {available()}") from None
    name = backend
