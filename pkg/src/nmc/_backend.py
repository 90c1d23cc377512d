"""Selects the implementation of the hot loops.

The numba kernels in :mod:`nmc._nb` are used by default. Setting the
environment variable ``NMC_DISABLE_NUMBA=1`` before import (or numba being
unavailable) switches every hot loop to the vectorised numpy kernels in
:mod:`nmc._np`. Both produce the same numbers up to rounding.
"""

import os
from types import ModuleType

FLAG = "NMC_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}


try:  # pragma: no cover - exercised implicitly
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def kernels(name: str | None = None) -> ModuleType:
    """Return the kernel module; ``name`` forces "numba" or "numpy"."""
    if name is None:
        name = "numba" if USE_NUMBA else "numpy"
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        from . import _nb

        return _nb
    if name == "numpy":
        from . import _np

        return _np
    raise ValueError(f"unknown backend {name!r}")


def active() -> str:
    return "numba" if USE_NUMBA else "numpy"
