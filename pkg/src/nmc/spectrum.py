"""Eigenvalues of the linearized operator at the straight band.

At (a, lambda, phi) = (0, 1, cos) the linearization acts diagonally on the
cosine basis: cos(k s) is an eigenfunction with eigenvalue

    lambda_k = int (1 - cos k t)|t|^(-2-alpha) dt - int P_R - int cos(k t) P_R(t) dt,

where P_R(t) = ((2R)^2 + t^2)^(-(2+alpha)/2). For large k the substitution
t -> t/k gives lambda_k = k^(1+alpha) mu_k with a non-oscillatory integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketError, DegenerateEigenvalueError, DomainError, NonConvergenceError
from .kernels import KernelContext
from .quad import (DEFAULT, AlgebraicKernel, QuadratureConfig, cos_tail, oscillatory_cos_integral,
                   power_exp_tail, pv_symmetric_integral)
from .series import CosineSeries

#: below this k the eigenvalue is assembled from its three integrals
SCALED_FROM_K = 16


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues lambda_0..lambda_K at (alpha, R) with mu_inf and gamma."""

    alpha: float
    R: float
    lambdas: np.ndarray
    mu_inf: float
    gamma: float

    @property
    def K(self) -> int:
        return self.lambdas.size - 1

    def ratios(self) -> np.ndarray:
        """lambda_k / (k^(1+alpha) mu_inf) for k >= 1 (index 0 is nan)."""
        k = np.arange(self.lambdas.size, dtype=float)
        out = np.full(k.shape, np.nan)
        out[1:] = self.lambdas[1:] / (k[1:] ** (1.0 + self.alpha) * self.mu_inf)
        return out


def _frac_tail(k: float, alpha: float):
    """int_T^inf 2 (1 - cos k t) t^(-2-alpha) dt."""

    def tail(T):
        return 2.0 * (T ** (-1.0 - alpha) / (1.0 + alpha) - power_exp_tail([k], 2.0 + alpha, T)[0].real)

    return tail


@lru_cache(maxsize=256)
def _frac_symbol(alpha: float, k: float, cfg: QuadratureConfig) -> float:
    """int over the line of (1 - cos k t)|t|^(-2-alpha) dt."""

    def g(t):
        return 4.0 * np.sin(0.5 * k * t) ** 2 * t ** (-2.0 - alpha)

    return pv_symmetric_integral(g, cfg, -alpha, tail=_frac_tail(k, alpha))


def mu_inf(ctx: KernelContext, cfg: QuadratureConfig = DEFAULT) -> float:
    """mu_inf = int (1 - cos t)|t|^(-2-alpha) dt."""
    return _frac_symbol(ctx.alpha, 1.0, cfg)


def pr_kernel(ctx: KernelContext) -> AlgebraicKernel:
    return AlgebraicKernel(ctx.kappa, 2.0 * ctx.R)


@lru_cache(maxsize=4096)
def _pr_moment(alpha: float, R: float, k: int, cfg: QuadratureConfig) -> float:
    return oscillatory_cos_integral(AlgebraicKernel(0.5 * (2.0 + alpha), 2.0 * R), k, cfg)


def _lambda_direct(ctx: KernelContext, k: int, cfg: QuadratureConfig) -> float:
    if k == 0:
        return -2.0 * _pr_moment(ctx.alpha, ctx.R, 0, cfg)
    frac = _frac_symbol(ctx.alpha, float(k), cfg)
    return frac - _pr_moment(ctx.alpha, ctx.R, 0, cfg) - _pr_moment(ctx.alpha, ctx.R, k, cfg)


@lru_cache(maxsize=8192)
def _mu_k(alpha: float, R: float, k: int, cfg: QuadratureConfig) -> float:
    kern = AlgebraicKernel(0.5 * (2.0 + alpha), 2.0 * R * k)

    def g(t):
        return 4.0 * (np.sin(0.5 * t) ** 2 * t ** (-2.0 - alpha) - np.cos(0.5 * t) ** 2 * kern(t))

    def tail(T):
        return (_frac_tail(1.0, alpha)(T) - 2.0 * kern.tail(T) - 2.0 * cos_tail(kern, 1.0, T))

    return pv_symmetric_integral(g, cfg, -alpha, tail=tail)


def mu_k(ctx: KernelContext, k: int, cfg: QuadratureConfig = DEFAULT) -> float:
    """mu_k = lambda_k / k^(1+alpha) from its own rescaled integral (k >= 1)."""
    if k < 1:
        raise DomainError("mu_k is defined for k >= 1")
    return _mu_k(ctx.alpha, ctx.R, int(k), cfg)


def lambda_k(ctx: KernelContext, k: int, cfg: QuadratureConfig = DEFAULT, method: str = "auto") -> float:
    """k-th eigenvalue of the linearized operator at (alpha, R).

    ``method`` is "direct" (three integrals), "scaled" (k^(1+alpha) mu_k) or
    "auto" (direct below k = 16).
    """
    k = int(k)
    if k < 0 or k > 4096:
        raise DomainError("k must lie in [0, 4096]")
    if method == "auto":
        method = "direct" if k < SCALED_FROM_K else "scaled"
    if method == "direct":
        return _lambda_direct(ctx, k, cfg)
    if method == "scaled":
        return k ** (1.0 + ctx.alpha) * mu_k(ctx, k, cfg)
    raise DomainError(f"unknown method {method!r}")


def lambda1(alpha: float, R: float, cfg: QuadratureConfig = DEFAULT) -> float:
    return lambda_k(KernelContext(alpha, R), 1, cfg, method="direct")


def _pr2_moments(ctx: KernelContext, cfg: QuadratureConfig) -> float:
    kern = AlgebraicKernel(0.5 * (4.0 + ctx.alpha), 2.0 * ctx.R)
    return oscillatory_cos_integral(kern, 0, cfg) + oscillatory_cos_integral(kern, 1, cfg)


def lambda1_prime(ctx: KernelContext, cfg: QuadratureConfig = DEFAULT) -> float:
    """d lambda_1 / dR = 4 (2+alpha) R int (1 + cos t)(t^2 + 4R^2)^(-(4+alpha)/2) dt > 0."""
    return 4.0 * (2.0 + ctx.alpha) * ctx.R * _pr2_moments(ctx, cfg)


def gamma_const(ctx: KernelContext, cfg: QuadratureConfig = DEFAULT) -> float:
    """gamma = -int (1 + cos t) F''(2R/|t|) 2R |t|^(-3-alpha) dt.

    With F''(q) = -(2+alpha) q (1+q^2)^(-(4+alpha)/2) the integrand equals
    4 (2+alpha) R^2 (1 + cos t)(t^2 + 4R^2)^(-(4+alpha)/2), which is smooth.
    """
    return 4.0 * (2.0 + ctx.alpha) * ctx.R**2 * _pr2_moments(ctx, cfg)


@dataclass(frozen=True)
class SolveRResult:
    alpha: float
    R_star: float
    lambda1_residual: float
    history: tuple[tuple[str, float, float], ...]


def solve_R_detailed(alpha: float, cfg: QuadratureConfig = DEFAULT, tol: float = 1e-12,
                     max_iter: int = 60) -> SolveRResult:
    """Root of lambda_1(R) by geometric bracketing and safeguarded Newton."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    hist: list[tuple[str, float, float]] = []

    def f(R):
        v = lambda1(alpha, R, cfg)
        return v

    R = 1.0
    fR = f(R)
    hist.append(("bracket", R, fR))
    lo = hi = None
    for _ in range(60):
        if fR < 0.0:
            lo, flo = R, fR
            R *= 2.0
        else:
            hi, fhi = R, fR
            R *= 0.5
        if lo is not None and hi is not None:
            break
        fR = f(R)
        hist.append(("bracket", R, fR))
    else:
        raise BracketError("could not bracket the root of lambda_1")
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        hist.append(("newton", x, fx))
        if fx < 0.0:
            lo = x
        else:
            hi = x
        if abs(fx) <= tol:
            break
        dfx = lambda1_prime(KernelContext(alpha, x), cfg)
        step = fx / dfx
        nx = x - step
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 1e-15 * x:
            x = nx
            break
        x = nx
    else:
        raise NonConvergenceError("Newton iteration for R* did not converge")
    res = f(x)
    return SolveRResult(alpha, x, res, tuple(hist))


@lru_cache(maxsize=32)
def solve_R(alpha: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """Critical half-width R*(alpha) with lambda_1(R*) = 0."""
    return solve_R_detailed(float(alpha), cfg).R_star


def critical_context(alpha: float, cfg: QuadratureConfig = DEFAULT) -> KernelContext:
    return KernelContext(alpha, solve_R(float(alpha), cfg))


def compute_spectrum(ctx: KernelContext, kmax: int, cfg: QuadratureConfig = DEFAULT) -> Spectrum:
    lam = np.array([lambda_k(ctx, k, cfg) for k in range(kmax + 1)])
    lam.setflags(write=False)
    return Spectrum(ctx.alpha, ctx.R, lam, mu_inf(ctx, cfg), gamma_const(ctx, cfg))


def _eigenvalues(ctx: KernelContext, K: int, cfg: QuadratureConfig) -> np.ndarray:
    return np.array([lambda_k(ctx, k, cfg) for k in range(K + 1)])


def apply_L(ctx: KernelContext, w: CosineSeries, cfg: QuadratureConfig = DEFAULT) -> CosineSeries:
    """Diagonal action of the linearized operator on a cosine series."""
    return CosineSeries(_eigenvalues(ctx, w.K, cfg) * w.coeffs)


def solve_L_on_V2(ctx: KernelContext, f: CosineSeries, cfg: QuadratureConfig = DEFAULT,
                  tiny: float = 1e-12) -> CosineSeries:
    """Inverse of the linearized operator on the complement of cos."""
    if f.c1 != 0.0:
        raise DomainError("right-hand side must have zero cos(s) coefficient")
    lam = _eigenvalues(ctx, f.K, cfg)
    out = np.zeros(f.K + 1)
    for k in range(f.K + 1):
        if k == 1:
            continue
        if abs(lam[k]) < tiny:
            raise DegenerateEigenvalueError(f"|lambda_{k}| = {abs(lam[k]):.3e} is numerically zero")
        out[k] = f.coeffs[k] / lam[k]
    return CosineSeries(out)
