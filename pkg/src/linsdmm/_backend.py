"""Kernel backend selection.

The compiled extension is used when it imports; ``LINSDMM_PURE=1`` in the
environment forces the numpy fallback.  ``use()`` switches at runtime, which
the benchmarks and the backend-equivalence tests rely on.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_active = _pykernels if (_ckernels is None or os.environ.get("LINSDMM_PURE")) else _ckernels


def available():
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use(name):
    """Select the kernel backend by name and return the previous one's name."""
    global _active
    previous = _active.NAME
    if name == "python":
        _active = _pykernels
    elif name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def current():
    return _active


def name():
    return _active.NAME
