"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module.  Setting ``ENTDISTILL_PURE_PYTHON=1``
forces the fallback.
"""

import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_AVAILABLE = {"python": _pykernels}
if _ckernels is not None:
    _AVAILABLE["cython"] = _ckernels

if os.environ.get("ENTDISTILL_PURE_PYTHON") or _ckernels is None:
    kernels = _pykernels
else:
    kernels = _ckernels


def available():
    return sorted(_AVAILABLE)


def name():
    return kernels.NAME


def set_backend(backend):
    global kernels
    try:
        kernels = _AVAILABLE[backend]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {backend!r}; have {available()}") from None


@contextmanager
def use(backend):
    previous = kernels.NAME
    set_backend(backend)
    try:
        yield
    finally:
        set_backend(previous)
