"""Quadrature layer: principal-value, oscillatory, tail and periodized integrals.

Every principal value in this package is symmetrized (t paired with -t) by the
caller before it reaches this module, so the routines here only ever see
integrable endpoint singularities of the form t^p with p > -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from ._nodes import jacobi_left, legendre
from .errors import DomainError, NonConvergenceError, NonIntegrableSingularityError
from .kernels import KernelContext, f_table


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncation parameters shared by all integrals.

    Parameters
    ----------
    abs_tol : float
        Absolute tolerance of adaptive and accelerated integrals.
    trunc_T : float
        Radius beyond which integrals over the line are replaced by tails.
    graded_levels : int
        Number of dyadic panels between the innermost panel and t = 1.
    periodization_M : int
        Lattice translates summed explicitly by :func:`periodized_kernel`.
    gauss_order : int
        Points per Gauss-Legendre panel.
    max_panels : int
        Refinement budget of the adaptive routines.
    """

    abs_tol: float = 1e-10
    trunc_T: float = 50.0
    graded_levels: int = 40
    periodization_M: int = 32
    gauss_order: int = 16
    max_panels: int = 200_000

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")
        if not self.trunc_T >= 10.0:
            raise DomainError("trunc_T must be at least 10")
        if self.graded_levels < 8:
            raise DomainError("graded_levels must be at least 8")
        if self.periodization_M < 4:
            raise DomainError("periodization_M must be at least 4")
        if self.gauss_order < 4:
            raise DomainError("gauss_order must be at least 4")

    def with_tol(self, abs_tol: float) -> "QuadratureConfig":
        return QuadratureConfig(abs_tol, self.trunc_T, self.graded_levels, self.periodization_M,
                                self.gauss_order, self.max_panels)


DEFAULT = QuadratureConfig()


# ---------------------------------------------------------------- algebraic weights


def taylor_power(u0: float, u1: float, u2: float, gamma: float, n: int) -> np.ndarray:
    """Taylor coefficients of (u0 + u1 h + u2 h^2)^gamma about h = 0."""
    v = np.zeros(n + 1)
    u = (u0, u1, u2)
    v[0] = u0**gamma
    for m in range(1, n + 1):
        acc = 0.0
        for j in range(1, min(m, 2) + 1):
            acc += (gamma * j - m + j) * u[j] * v[m - j]
        v[m] = acc / (m * u0)
    return v


@dataclass(frozen=True)
class AlgebraicKernel:
    """Even weight (t^2 + W^2)^(-beta); W = 0 gives the pure power |t|^(-2 beta)."""

    beta: float
    W: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.W == 0.0:
            return np.abs(t) ** (-2.0 * self.beta)
        return (t * t + self.W * self.W) ** (-self.beta)

    @property
    def scale(self) -> float:
        return max(self.W, 1.0)

    def tail(self, T: float) -> float:
        """int_T^inf of the weight."""
        if self.W == 0.0:
            return T ** (1.0 - 2.0 * self.beta) / (2.0 * self.beta - 1.0)
        tab = f_table(self.beta)
        return float(self.W ** (1.0 - 2.0 * self.beta) * tab.upper(np.array([T / self.W]))[0])

    def line_integral(self) -> float:
        """int over the whole line (W > 0 only)."""
        if self.W == 0.0:
            raise DomainError("pure power weights are not integrable over the line")
        return 2.0 * self.W ** (1.0 - 2.0 * self.beta) * f_table(self.beta).finf

    def derivatives(self, T: float, n: int) -> np.ndarray:
        """f(T), f'(T), ..., f^(n)(T)."""
        if self.W == 0.0:
            v = taylor_power(T, 1.0, 0.0, -2.0 * self.beta, n)
        else:
            v = taylor_power(T * T + self.W * self.W, 2.0 * T, 1.0, -self.beta, n)
        return v * np.array([math.factorial(m) for m in range(n + 1)], dtype=float)


# ---------------------------------------------------------------- power tails


_X_ASYM = 60.0


def _exp_tail_asym(X: np.ndarray, p: float) -> np.ndarray:
    """int_X^inf e^{ix} x^-p dx by its asymptotic series (X large)."""
    total = np.zeros(X.shape, dtype=complex)
    term_mag = X ** (-p)
    coef = np.ones(X.shape)
    done = np.zeros(X.shape, dtype=bool)
    prev = np.full(X.shape, np.inf)
    fac = 1.0 + 0.0j
    for n in range(400):
        fac = fac * (-1j)  # (1/i)^(n+1)
        term = coef * term_mag
        grow = term > prev
        done |= grow
        upd = ~done
        total[upd] += fac * term[upd]
        done |= term < 1e-18 * np.abs(total)
        if np.all(done):
            break
        prev = term
        coef = coef * (p + n) / X
    return -np.exp(1j * X) * total


def _exp_tail_direct(X: float, p: float, upper: float) -> complex:
    """int_X^upper e^{ix} x^-p dx on panels graded towards small X."""
    x, w = legendre(24)
    edges = [X]
    while edges[-1] < upper:
        edges.append(min(upper, edges[-1] + min(1.0, 0.5 * edges[-1])))
    edges = np.array(edges)
    a = edges[:-1, None]
    b = edges[1:, None]
    xx = 0.5 * (b - a) * x + 0.5 * (b + a)
    vals = np.exp(1j * xx) * xx ** (-p) * (0.5 * (b - a)) * w
    return complex(vals.sum())


def power_exp_tail(omega, p: float, T: float) -> np.ndarray:
    """int_T^inf exp(i omega t) t^(-p) dt for omega >= 0 (vectorised).

    The substitution x = omega t reduces every mode to one scaled special
    integral, which is summed asymptotically once its argument is large and
    integrated on graded panels below that.
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if p <= 1.0 and np.any(om == 0.0):
        raise DomainError("zero-frequency tail needs p > 1")
    out = np.empty(om.shape, dtype=complex)
    zero = om == 0.0
    out[zero] = T ** (1.0 - p) / (p - 1.0)
    nz = ~zero
    if np.any(nz):
        X = om[nz] * T
        res = np.empty(X.shape, dtype=complex)
        xa = max(_X_ASYM, 3.0 * p + 30.0)
        far = X >= xa
        if np.any(far):
            res[far] = _exp_tail_asym(X[far], p)
        if np.any(~far):
            base = complex(_exp_tail_asym(np.array([xa]), p)[0])
            for i in np.nonzero(~far)[0]:
                res[i] = _exp_tail_direct(X[i], p, xa) + base
        out[nz] = om[nz] ** (p - 1.0) * res
    return out


@lru_cache(maxsize=64)
def tail_table(alpha: float, T: float, period: float, n_samples: int, n_powers: int):
    """Sample nodes and weights for exact tails of periodic integrands.

    For a ``period``-periodic g whose Fourier modes lie below n_samples/2,

        int_T^inf g(t) t^-(2 + alpha + m) dt = sum_n weights[m, n] g(nodes[n]).

    Returns
    -------
    nodes : ndarray, shape (n_samples,)
    weights : ndarray, shape (n_powers, n_samples)
    """
    n = int(n_samples)
    nodes = period * np.arange(n) / n
    omega = 2.0 * np.pi * np.arange(n // 2) / period
    weights = np.empty((n_powers, n))
    for m in range(n_powers):
        tails = power_exp_tail(omega, 2.0 + alpha + m, T)
        pad = np.zeros(n, dtype=complex)
        pad[: n // 2] = tails
        weights[m] = (2.0 * np.fft.fft(pad).real - tails[0].real) / n
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def periodic_power_tail(g: Callable, alpha: float, m: int, T: float, period: float,
                        n_samples: int = 256) -> float:
    """int_T^inf g(t) t^-(2+alpha+m) dt for a periodic trigonometric polynomial g."""
    nodes, weights = tail_table(float(alpha), float(T), float(period), int(n_samples), m + 1)
    return float(weights[m] @ np.asarray(g(nodes), dtype=float))


# ---------------------------------------------------------------- adaptive panels


def _gauss_on(x, w, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half[:, None] * x + mid[:, None], half[:, None] * w


def _adaptive(f: Callable, a: np.ndarray, b: np.ndarray, cfg: QuadratureConfig,
              tol_per_length: float, tol_floor: float) -> float:
    """Adaptive Gauss-Legendre on a list of panels; deterministic reduction."""
    x, w = legendre(cfg.gauss_order)

    def panel_sums(lo, hi):
        nodes, weights = _gauss_on(x, w, lo, hi)
        return (np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape) * weights).sum(axis=1)

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    whole = panel_sums(a, b)
    accepted_lo: list[np.ndarray] = []
    accepted_val: list[np.ndarray] = []
    used = a.size
    while a.size:
        m = 0.5 * (a + b)
        left = panel_sums(a, m)
        right = panel_sums(m, b)
        fine = left + right
        err = np.abs(fine - whole)
        ok = (err <= tol_per_length * (b - a) + tol_floor) | (b - a <= 1e-14 * np.maximum(1.0, np.abs(b)))
        accepted_lo.append(a[ok])
        accepted_val.append(fine[ok])
        bad = ~ok
        used += 2 * int(bad.sum())
        if used > cfg.max_panels:
            raise NonConvergenceError("adaptive quadrature exhausted its panel budget")
        a = np.concatenate([a[bad], m[bad]])
        b = np.concatenate([m[bad], b[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    lo = np.concatenate(accepted_lo)
    val = np.concatenate(accepted_val)
    return math.fsum(val[np.argsort(lo, kind="stable")])


def pv_symmetric_integral(g: Callable, cfg: QuadratureConfig = DEFAULT, singular_exponent: float = 0.0,
                          tail: Callable[[float], float] | float | None = None,
                          upper: float | None = None) -> float:
    """int_0^inf g(t) dt for an already symmetrized integrand.

    Parameters
    ----------
    g : callable
        Vectorised integrand on t > 0 with |g(t)| <= C t^p near 0.
    singular_exponent : float
        The exponent p; must exceed -1.
    tail : callable, float or None
        Value (or function of the truncation radius) of int_T^inf g; None means
        the caller asserts that g is negligible beyond the truncation radius.
    upper : float, optional
        Truncation radius; defaults to ``cfg.trunc_T``.
    """
    p = float(singular_exponent)
    if p <= -1.0:
        raise NonIntegrableSingularityError(f"t^{p} is not integrable at 0")
    T = float(cfg.trunc_T if upper is None else upper)
    levels = cfg.graded_levels
    t0 = 2.0**-levels
    xj, wj = jacobi_left(cfg.gauss_order, p)
    tj = 0.5 * t0 * (1.0 + xj)
    inner = (0.5 * t0) ** (1.0 + p) * float(np.sum(wj * np.asarray(g(tj), dtype=float) / tj**p))
    dyadic = 2.0 ** -np.arange(levels, 0, -1, dtype=float)
    unit = np.arange(1.0, math.ceil(T) + 1.0)
    unit[-1] = T
    edges = np.concatenate([[t0], dyadic, unit])
    edges = edges[np.concatenate([[True], np.diff(edges) > 0])]
    tol_len = 0.5 * cfg.abs_tol / T
    tol_floor = 0.5 * cfg.abs_tol / (4.0 * edges.size)
    body = _adaptive(g, edges[:-1], edges[1:], cfg, tol_len, tol_floor)
    if tail is None:
        tv = 0.0
    elif callable(tail):
        tv = float(tail(T))
    else:
        tv = float(tail)
    return math.fsum([inner, body, tv])


# ---------------------------------------------------------------- oscillatory


def wynn_epsilon(partial_sums) -> tuple[float, float]:
    """Wynn epsilon extrapolation; returns (limit estimate, error estimate)."""
    s = [float(v) for v in partial_sums]
    n = len(s)
    if n < 3:
        return s[-1], math.inf
    prev = [0.0] * (n + 1)
    cur = list(s)
    estimates = [s[-1]]
    for k in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur:
            val = cur[-1]
            if math.isfinite(val):
                estimates.append(val)
        if len(cur) < 2:
            break
    best = estimates[-1]
    err = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else math.inf
    return best, err


def oscillatory_cos_integral(w: Callable, k: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """int over the line of cos(k t) w(t) dt for an even, integrable weight w.

    Half-period panels between consecutive zeros of cos(k t) produce an
    alternating sequence of partial sums that is accelerated by the Wynn
    epsilon algorithm. ``w`` may expose ``scale`` (decay length) and
    ``tail(T)`` (used only for k = 0).
    """
    k = abs(float(k))
    if k == 0.0:
        tail = getattr(w, "tail", None)
        return 2.0 * pv_symmetric_integral(w, cfg, 0.0, tail=tail)
    if k > 4096:
        raise DomainError("k must not exceed 4096")

    def f(t):
        return np.cos(k * t) * np.asarray(w(t), dtype=float)

    scale = float(getattr(w, "scale", 1.0))
    half = math.pi / k
    start = max(10.0 * scale, 20.0 * half)
    n_pre = int(math.ceil(start / half))
    edges = np.concatenate([[0.0], 0.5 * half + half * np.arange(n_pre + 1)])
    tol = 0.25 * cfg.abs_tol
    head = _adaptive(f, edges[:-1], edges[1:], cfg, tol / edges[-1], 1e-3 * tol / edges.size)
    batch = 40
    sums = [head]
    end = edges[-1]
    x, gw = legendre(cfg.gauss_order)
    best = math.inf
    for _ in range(200):
        e = end + half * np.arange(batch + 1)
        lo, hi = e[:-1], e[1:]
        nodes, weights = _gauss_on(x, gw, lo, hi)
        # each half period is subdivided so the smooth weight is resolved
        sub = 4
        vals = np.zeros(batch)
        for j in range(sub):
            a_ = lo + (hi - lo) * j / sub
            b_ = lo + (hi - lo) * (j + 1) / sub
            nn, ww = _gauss_on(x, gw, a_, b_)
            vals += (f(nn.ravel()).reshape(nn.shape) * ww).sum(axis=1)
        for v in vals:
            sums.append(sums[-1] + v)
        end = e[-1]
        est, err = wynn_epsilon(sums[-batch:])
        if err <= tol:
            return 2.0 * est
        best = est
        if len(sums) * half > 1e6:
            break
    raise NonConvergenceError(f"oscillatory integral did not converge (k={k}, last={best})")


# ---------------------------------------------------------------- periodization

_EM_B = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)


def kernel_for(kernel_id: str, ctx: KernelContext) -> AlgebraicKernel:
    if kernel_id == "mu_alpha":
        return AlgebraicKernel(0.5 * (1.0 + ctx.alpha))
    if kernel_id == "mu_alpha_plus_one":
        return AlgebraicKernel(0.5 * (2.0 + ctx.alpha))
    if kernel_id == "P_R":
        return AlgebraicKernel(ctx.kappa, 2.0 * ctx.R)
    raise DomainError(f"unknown kernel {kernel_id!r}")


def _em_tail(kern: AlgebraicKernel, y0: float, h: float) -> tuple[float, float]:
    """sum_{j>=0} f(y0 + j h) by Euler-Maclaurin; returns (value, bound)."""
    d = kern.derivatives(y0, 7)
    val = kern.tail(y0) / h + 0.5 * d[0]
    for m, b in enumerate(_EM_B[:3], start=1):
        val -= b / math.factorial(2 * m) * h ** (2 * m - 1) * d[2 * m - 1]
    bound = 2.0 * abs(_EM_B[3] / math.factorial(8) * h**7 * d[7])
    return val, bound


def periodized_kernel(kernel_id: str, ctx: KernelContext, t_in_period, cfg: QuadratureConfig = DEFAULT):
    """sum over m of kernel(t + 2 pi m) for t in (0, 2 pi)."""
    kern = kernel_for(kernel_id, ctx)
    ts = np.atleast_1d(np.asarray(t_in_period, dtype=float))
    if np.any((ts <= 0.0) | (ts >= 2.0 * math.pi)):
        raise DomainError("t must lie strictly inside (0, 2 pi)")
    h = 2.0 * math.pi
    out = np.empty(ts.shape)
    for i, t in enumerate(ts):
        M = cfg.periodization_M
        while True:
            m = np.arange(-M, M + 1)
            direct = math.fsum(kern(t + h * m))
            right, b1 = _em_tail(kern, t + h * (M + 1), h)
            left, b2 = _em_tail(kern, h * (M + 1) - t, h)
            if b1 + b2 <= cfg.abs_tol or M > 1 << 16:
                break
            M *= 2
        out[i] = direct + right + left
    return float(out[0]) if np.ndim(t_in_period) == 0 else out


# ---------------------------------------------------------------- half-line grids


@lru_cache(maxsize=32)
def half_line_grid(alpha: float, h: float, n_panels: int, order: int = 16):
    """Composite rule on [0, n_panels h] for two integrand classes.

    Returns nodes ``t`` with weights ``ws`` and ``wr`` such that

        sum ws f(t) ~ int_0^T t^(-1-alpha) f(t) dt   for f(t) = O(t), and
        sum wr g(t) ~ int_0^T g(t) dt                for smooth g.

    The first panel uses Gauss-Jacobi for ``ws`` (absorbing t^-alpha) and
    Gauss-Legendre for ``wr``; later panels share their nodes.
    """
    xg, wg = legendre(order)
    xj, wj = jacobi_left(order, -alpha)
    tj = 0.5 * h * (1.0 + xj)
    wsj = (0.5 * h) ** (1.0 - alpha) * wj / tj
    t1 = 0.5 * h * (1.0 + xg)
    wr1 = 0.5 * h * wg
    lo = h * np.arange(1, n_panels)
    tp = (lo[:, None] + 0.5 * h * (1.0 + xg)).ravel()
    wp = np.tile(0.5 * h * wg, n_panels - 1)
    t = np.concatenate([tj, t1, tp])
    ws = np.concatenate([wsj, np.zeros(order), wp * tp ** (-1.0 - alpha)])
    wr = np.concatenate([np.zeros(order), wr1, wp])
    for arr in (t, ws, wr):
        arr.setflags(write=False)
    return t, ws, wr


def cos_tail(kern: AlgebraicKernel, k: float, T: float, n_max: int = 80) -> float:
    """int_T^inf cos(k t) f(t) dt by repeated integration by parts (k > 0).

    Converges quickly once T is large compared with 1/k and the distance of T
    to the complex singularities of f, which holds for the truncation radii
    used in this package.
    """
    d = kern.derivatives(T, n_max)
    ik = 1j * k
    total = 0.0 + 0.0j
    prev = math.inf
    fac = 1.0 / ik
    for n in range(n_max + 1):
        term = (-1) ** n * d[n] * fac
        mag = abs(term)
        if mag > prev:
            break
        total += term
        if mag <= 1e-18 * abs(total):
            break
        prev = mag
        fac /= ik
    return float((-np.exp(1j * k * T) * total).real)
