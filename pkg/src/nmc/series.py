"""Even periodic functions stored as finite cosine series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class CosineSeries:
    """phi(s) = sum_k coeffs[k] cos(k freq s).

    ``freq`` defaults to one (2 pi-periodic functions); the reconstructed,
    unrescaled bands use freq = lambda. Instances are immutable.
    """

    coeffs: np.ndarray
    freq: float = 1.0
    K: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not (self.freq > 0.0 and np.isfinite(self.freq)):
            raise ValueError("freq must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "freq", float(self.freq))
        object.__setattr__(self, "K", c.size - 1)

    # constructors
    @classmethod
    def basis(cls, k: int, K: int | None = None, scale: float = 1.0) -> "CosineSeries":
        K = k if K is None else K
        c = np.zeros(K + 1)
        c[k] = scale
        return cls(c)

    @classmethod
    def constant(cls, value: float, K: int = 0) -> "CosineSeries":
        c = np.zeros(K + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def zeros(cls, K: int) -> "CosineSeries":
        return cls(np.zeros(K + 1))

    # evaluation
    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        k = np.arange(self.K + 1)
        vals = np.cos(np.multiply.outer(s * self.freq, k)) @ self.coeffs
        return float(vals) if vals.ndim == 0 else vals

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        k = np.arange(self.K + 1)
        vals = -np.sin(np.multiply.outer(s * self.freq, k)) @ (self.coeffs * k * self.freq)
        return float(vals) if vals.ndim == 0 else vals

    # arithmetic
    def padded(self, K: int) -> "CosineSeries":
        if K < self.K:
            if np.any(self.coeffs[K + 1:] != 0.0):
                raise ValueError("truncation would drop nonzero modes")
            return CosineSeries(self.coeffs[: K + 1], self.freq)
        c = np.zeros(K + 1)
        c[: self.K + 1] = self.coeffs
        return CosineSeries(c, self.freq)

    def _binary(self, other, op):
        if isinstance(other, CosineSeries):
            if other.freq != self.freq:
                raise ValueError("frequencies differ")
            K = max(self.K, other.K)
            return CosineSeries(op(self.padded(K).coeffs, other.padded(K).coeffs), self.freq)
        c = np.array(self.coeffs)
        c[0] = op(c[0], float(other))
        return CosineSeries(c, self.freq)

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return CosineSeries(-self.coeffs, self.freq)

    def __mul__(self, scalar: float):
        return CosineSeries(self.coeffs * float(scalar), self.freq)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"CosineSeries(K={self.K}, freq={self.freq}, coeffs={np.array2string(self.coeffs, precision=4)})"

    # V1 / V2 splitting
    @property
    def c1(self) -> float:
        return float(self.coeffs[1]) if self.K >= 1 else 0.0

    def project_V1(self) -> "CosineSeries":
        c = np.zeros(self.K + 1)
        if self.K >= 1:
            c[1] = self.coeffs[1]
        return CosineSeries(c, self.freq)

    def project_V2(self) -> "CosineSeries":
        c = np.array(self.coeffs)
        if self.K >= 1:
            c[1] = 0.0
        return CosineSeries(c, self.freq)

    def in_V2(self) -> bool:
        return self.c1 == 0.0

    # norms from coefficients
    def sup_bound(self) -> float:
        """Upper bound for sup |phi|."""
        return float(np.abs(self.coeffs).sum())

    def c1_norm(self) -> float:
        """Bound for sup|phi| + sup|phi'|."""
        k = np.arange(self.K + 1) * self.freq
        return float(np.abs(self.coeffs) @ (1.0 + k))

    def lipschitz_norm(self) -> float:
        """Bound for sup|phi| + sup|phi'| + Lip(phi')."""
        k = np.arange(self.K + 1) * self.freq
        return float(np.abs(self.coeffs) @ (1.0 + k + k * k))

    def l2(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def is_positive(self) -> bool:
        """Coefficient test c_0 > sum_{k>=1} |c_k| guaranteeing phi > 0."""
        return bool(self.coeffs[0] > np.abs(self.coeffs[1:]).sum())


@dataclass(frozen=True)
class Increments:
    """Difference quotients of phi at (s, t)."""

    s: float
    t: float
    delta_minus: float
    delta_plus: float
    delta_zero: float


def increments(phi: CosineSeries, s: float, t: float) -> Increments:
    """delta_-, delta_+ and delta_0 of phi at (s, t), t != 0."""
    if t == 0.0:
        raise ValueError("increments are undefined at t = 0")
    ps = phi(s)
    at = abs(t)
    return Increments(s, t, (ps - phi(s - t)) / at, (ps - phi(s + t)) / at, ps + phi(s - t))
