"""Nonlocal mean curvature of graph bands and the rescaled operator Phi.

For a band {|y_2| < u(y_1)} with even periodic profile u, the curvature of
the upper boundary at (s, u(s)) is

    H(u)(s) = 2 int F(delta_- u) dmu - 2 int {F((u(s)+u(s-t))/|t|) - F(inf)} dmu,

with dmu = |t|^(-1-alpha) dt. The rescaled operator used for the branch is
Phi(a, lam, phi) = Phi1(a, phi) - Phi2(a, lam, phi), where

    Phi1 = int_0^inf [F1(a, q) + F1(a, p)] dmu,      q, p = delta_-+ phi,
    Phi2 = int_0^inf [r_- F2(t; a r_-) + r_+ F2(t; a r_+)] dt,   r = phi(s) + phi(s -+ t).

Phi1 is split as the exact fractional-Laplacian symbol acting on phi plus the
O(a^2) remainder E(a,q) + E(a,p), E = F1 - q. Integrals over (0, T] use a
Gauss-Jacobi/Gauss-Legendre composite grid; the part beyond T is summed
exactly from the 1/t expansion of the integrand with periodic coefficients
(see :func:`nmc.quad.tail_table`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad as scipy_quad

from . import _backend, _np
from ._nodes import legendre_unit
from .errors import DomainError, PositivityError
from .kernels import KernelContext, eval_F, eval_F1, eval_F3, series_coefficients
from .quad import DEFAULT, QuadratureConfig, half_line_grid, pv_symmetric_integral, tail_table
from .series import CosineSeries, Increments, increments
from .spectrum import mu_inf

__all__ = [
    "CosineSeries", "Increments", "increments", "nmc_of_graph", "straight_band_h", "phi",
    "dphi_dvarphi", "dphi_dlambda", "dphi_da", "phi_system", "PhiSystem", "phi1_symmetrized",
    "phi1_naive", "DEFAULT_NU", "DEFAULT_BALL",
]

DEFAULT_NU = 0.1
DEFAULT_BALL = 10.0

_N_NL = 6      # tail terms of the O(a^2) part of Phi1
_N_SER = 8     # tail terms of Phi2 and of H(u)
_N_E = 14      # Taylor terms of E(a, q) for |a q| < 1/4
_TAU = 10      # Gauss points for the tau integral inside F2


@dataclass(frozen=True)
class _Resolution:
    t: np.ndarray
    ws: np.ndarray
    wr: np.ndarray
    T: float
    tail_t: np.ndarray
    tail_w: np.ndarray


def _resolution(alpha: float, K: int, freq: float, scale: float, cfg: QuadratureConfig) -> _Resolution:
    omega = max(1.0, 3.0 * K * freq)
    h = min(0.25, 10.0 / omega)
    t_min = max(cfg.trunc_T, 20.0 * scale)
    n_panels = int(math.ceil(t_min / h - 1e-9))
    t, ws, wr = half_line_grid(float(alpha), float(h), n_panels, cfg.gauss_order)
    T = n_panels * h
    n_samples = 64
    while n_samples < 8 * (K + 1):
        n_samples *= 2
    tt, tw = tail_table(float(alpha), float(T), float(2.0 * math.pi / freq), n_samples, 2 * _N_SER + 1)
    return _Resolution(t, ws, wr, T, tt, tw)


def _s_array(s):
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    return arr, np.ndim(s) == 0


def _out(vals, scalar):
    return float(vals[0]) if scalar else vals


# ---------------------------------------------------------------- H(u)


def nmc_of_graph(ctx: KernelContext, u: CosineSeries, s, cfg: QuadratureConfig = DEFAULT):
    """Nonlocal mean curvature H(u)(s) of the band {|y_2| < u(y_1)}."""
    if not u.is_positive():
        raise PositivityError("profile must satisfy c_0 > sum |c_k| (strictly positive band)")
    s_arr, scalar = _s_array(s)
    umax = u.sup_bound()
    res = _resolution(ctx.alpha, u.K, u.freq, 2.0 * umax, cfg)
    tab = ctx.table
    fser = series_coefficients(ctx.kappa, _N_SER)
    kern = _backend.kernels()
    first, second = kern.graph_kernel(
        np.ascontiguousarray(u.coeffs), u.freq, s_arr, ctx.alpha, ctx.kappa, res.t, res.ws, res.wr,
        res.tail_t, res.tail_w, _N_SER, fser, tab.glx, tab.glw, tab.gjx, tab.gjw, tab.finf)
    const = 2.0 * tab.finf * res.T ** (-ctx.alpha) / ctx.alpha
    return _out(2.0 * (first + second + const), scalar)


def straight_band_h(ctx: KernelContext, cfg: QuadratureConfig = DEFAULT) -> float:
    """h_R = -2 int {F(2R/|t|) - F(inf)} dmu, the curvature of {|y_2| < R}."""
    a = ctx.alpha
    tab = ctx.table
    w = 2.0 * ctx.R
    fser = series_coefficients(ctx.kappa, _N_SER)

    def g(t):
        return 4.0 * _np.q_upper(t, np.full_like(t, w), a, *tab.args())

    def tail(T):
        j = np.arange(_N_SER + 1)
        ser = np.sum(fser * w ** (2 * j + 1) * T ** (-(2 * j + 1 + a)) / (2 * j + 1 + a))
        return 4.0 * (tab.finf * T ** (-a) / a - ser)

    upper = max(cfg.trunc_T, 40.0 * ctx.R)
    return pv_symmetric_integral(g, cfg, 0.0, tail=tail, upper=upper)


# ---------------------------------------------------------------- Phi


@dataclass(frozen=True, eq=False)
class PhiSystem:
    """Phi and its derivatives at the sample points ``s``.

    ``jac[i, k]`` is the derivative of Phi(s_i) with respect to the k-th
    cosine coefficient of phi.
    """

    s: np.ndarray
    value: np.ndarray
    dlam: np.ndarray
    da: np.ndarray
    jac: np.ndarray | None
    phi1: np.ndarray
    phi2: np.ndarray


def _check_phi_args(ctx, a, lam, varphi, nu, ball):
    if not abs(a) < nu:
        raise DomainError(f"|a| = {abs(a)} must be below the branch guard nu = {nu}")
    if not (0.5 < lam < 1.5):
        raise DomainError(f"lambda = {lam} must lie in (1/2, 3/2)")
    if varphi.freq != 1.0:
        raise DomainError("phi must be 2 pi-periodic")
    if varphi.lipschitz_norm() > ball:
        raise DomainError(f"norm of phi exceeds the admissible ball radius {ball}")
    c = 2.0 * lam * ctx.R
    if c - 2.0 * abs(a) * varphi.sup_bound() <= 0.0:
        raise PositivityError("2 lam R + a r tau may vanish: band would touch zero width")


def phi_system(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, s,
               cfg: QuadratureConfig = DEFAULT, *, want_jac: bool = True, K: int | None = None,
               nu: float = DEFAULT_NU, ball: float = DEFAULT_BALL) -> PhiSystem:
    """Evaluate Phi, d Phi/d lam, d Phi/d a and (optionally) the coefficient Jacobian."""
    a = float(a)
    lam = float(lam)
    _check_phi_args(ctx, a, lam, varphi, nu, ball)
    if K is not None and K > varphi.K:
        varphi = varphi.padded(K)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    coef = np.ascontiguousarray(varphi.coeffs)
    c = 2.0 * lam * ctx.R
    scale = c + 2.0 * abs(a) * varphi.sup_bound()
    res = _resolution(ctx.alpha, varphi.K, 1.0, scale, cfg)
    tab = ctx.table
    gx, gw = legendre_unit(_TAU)
    ecoef = series_coefficients(ctx.kappa, _N_E)
    j = np.arange(_N_SER + 1)
    from scipy.special import binom

    bcoef = binom(-ctx.kappa, j)
    kern = _backend.kernels()
    nl, p2, dc, da_nl, da_p2, jac_nl, jac_p2 = kern.phi_kernel(
        coef, s_arr, a, c, ctx.kappa, res.t, res.ws, res.wr, res.tail_t, res.tail_w, _N_NL, _N_SER,
        ecoef, bcoef, gx, gw, tab.glx, tab.glw, tab.gjx, tab.gjw, tab.finf, bool(want_jac))
    mu = mu_inf(ctx, cfg)
    k = np.arange(varphi.K + 1, dtype=float)
    symbol = mu * k ** (1.0 + ctx.alpha)
    cosm = np.cos(np.multiply.outer(s_arr, k))
    lin = cosm @ (symbol * coef)
    phi1 = lin + nl
    jac = None
    if want_jac:
        jac = cosm * symbol + jac_nl - jac_p2
    return PhiSystem(s_arr, phi1 - p2, -2.0 * ctx.R * dc, da_nl - da_p2, jac, phi1, p2)


def phi(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, s,
        cfg: QuadratureConfig = DEFAULT, **kw):
    """Phi(a, lam, phi)(s) = Phi1(a, phi)(s) - Phi2(a, lam, phi)(s)."""
    sys = phi_system(ctx, a, lam, varphi, s, cfg, want_jac=False, **kw)
    return _out(sys.value, np.ndim(s) == 0)


def dphi_dvarphi(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, psi: CosineSeries, s,
                 cfg: QuadratureConfig = DEFAULT, **kw):
    """Directional derivative D_phi Phi(a, lam, phi) psi at s."""
    K = max(varphi.K, psi.K)
    sys = phi_system(ctx, a, lam, varphi, s, cfg, want_jac=True, K=K, **kw)
    return _out(sys.jac @ psi.padded(K).coeffs, np.ndim(s) == 0)


def dphi_dlambda(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, s,
                 cfg: QuadratureConfig = DEFAULT, **kw):
    """Partial derivative of Phi in lambda (only Phi2 depends on it)."""
    sys = phi_system(ctx, a, lam, varphi, s, cfg, want_jac=False, **kw)
    return _out(sys.dlam, np.ndim(s) == 0)


def dphi_da(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, s,
            cfg: QuadratureConfig = DEFAULT, **kw):
    """Partial derivative of Phi in the amplitude a."""
    sys = phi_system(ctx, a, lam, varphi, s, cfg, want_jac=False, **kw)
    return _out(sys.da, np.ndim(s) == 0)


# ---------------------------------------------------------------- alternative Phi1 routes


def phi1_symmetrized(ctx: KernelContext, a: float, varphi: CosineSeries, s,
                     cfg: QuadratureConfig = DEFAULT):
    """Phi1 from int_0^inf (q + p) F3(a, q, p) dmu without splitting off the linear part."""
    s_arr, scalar = _s_array(s)
    res = _resolution(ctx.alpha, varphi.K, 1.0, 1.0, cfg)
    sing = res.ws != 0.0
    t = res.t[sing]
    ws = res.ws[sing]
    ecoef = series_coefficients(ctx.kappa, _N_NL)
    out = np.empty(s_arr.size)
    for i, si in enumerate(s_arr):
        ps = varphi(si)
        q = (ps - varphi(si - t)) / t
        p = (ps - varphi(si + t)) / t
        body = float(np.sum(ws * (q + p) * eval_F3(ctx, a, q, p)))
        nm = ps - varphi(si - res.tail_t)
        npl = ps - varphi(si + res.tail_t)
        tail = 0.0
        for j in range(_N_NL + 1):
            tail += ecoef[j] * a ** (2 * j) * float(res.tail_w[2 * j] @ (nm ** (2 * j + 1) + npl ** (2 * j + 1)))
        out[i] = body + tail
    return _out(out, scalar)


def phi1_naive(ctx: KernelContext, a: float, varphi: CosineSeries, s, T: float = 400.0,
               tol: float = 1e-9):
    """Phi1 by plain adaptive quadrature of the paired integrand (coarse cross-check).

    Pairs t with -t, integrates (1/a)[F(a q) + F(a p)] |t|^(-1-alpha) on (0, T]
    with scipy's QUADPACK and adds the leading-order tail. No splitting,
    Gauss-Jacobi rules or series tails are involved.
    """
    s_arr, scalar = _s_array(s)
    alpha = ctx.alpha
    out = np.empty(s_arr.size)
    for i, si in enumerate(s_arr):
        ps = varphi(si)

        def f(t):
            psim, psip = _np._increments(varphi.coeffs, si, np.array([t]))
            q = float(psim[0] @ varphi.coeffs) / t
            p = float(psip[0] @ varphi.coeffs) / t
            return (eval_F1(ctx, a, q) + eval_F1(ctx, a, p)) * t ** (-1.0 - alpha)

        edges = np.concatenate([[0.0, 1e-3, 1.0], np.arange(2.0, T + 1.0)])
        body = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                body += scipy_quad(f, lo, hi, epsabs=tol / edges.size, epsrel=1e-12, limit=200)[0]
        # leading tail: (2 phi(s) - phi(s-t) - phi(s+t)) t^(-2-alpha), averaged over a period
        tail = 2.0 * (ps - varphi.coeffs[0]) * T ** (-1.0 - alpha) / (1.0 + alpha)
        out[i] = body + tail
    return _out(out, scalar)


def rescaled_identity_phi(ctx: KernelContext, a: float, lam: float, varphi: CosineSeries, s,
                          cfg: QuadratureConfig = DEFAULT):
    """(1/a) {(1/2) H(lam R + a phi) - (1/2) lam^(-alpha) h_R} computed with :func:`nmc_of_graph`.

    Equals Phi(a, lam, phi)(s) for a != 0; used as an independent oracle.
    """
    if a == 0.0:
        raise DomainError("the undivided identity needs a != 0")
    u = varphi * a + lam * ctx.R
    h = nmc_of_graph(ctx, u, s, cfg)
    hr = straight_band_h(ctx, cfg)
    return (0.5 * np.asarray(h) - 0.5 * lam ** (-ctx.alpha) * hr) / a
