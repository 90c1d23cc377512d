"""Cached Gauss rules. Arrays are returned read-only so callers cannot corrupt the cache."""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


def _frozen(*arrays):
    for arr in arrays:
        arr.setflags(write=False)
    return arrays


@lru_cache(maxsize=None)
def legendre_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on (0, 1) with weights summing to one."""
    x, w = roots_legendre(n)
    return _frozen(0.5 * (x + 1.0), 0.5 * w)


@lru_cache(maxsize=None)
def legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = roots_legendre(n)
    return _frozen(np.asarray(x, float), np.asarray(w, float))


@lru_cache(maxsize=None)
def jacobi_left(n: int, exponent: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule on [-1, 1] for the weight (1 + x)**exponent."""
    x, w = roots_jacobi(n, 0.0, exponent)
    return _frozen(np.asarray(x, float), np.asarray(w, float))
