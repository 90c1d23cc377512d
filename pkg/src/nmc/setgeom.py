"""Nonlocal mean curvature evaluated directly from the set.

For a boundary point x of E the curvature is

    H_E(x) = -PV int tau_E(y) |x - y|^(-2-alpha) dy,    tau_E = 1_E - 1_{E^c}.

In polar coordinates around x, directions omega(beta) = cos(beta) T + sin(beta) n
(T the unit tangent, n the inner normal, beta in (0, pi)) are paired with
-omega. Along each ray tau is piecewise constant, so the radial integral is a
finite sum over boundary crossings, which are located by bisection on a
level function that is positive inside. The PV cancellation happens in
closed form: tau(x + r omega) + tau(x - r omega) vanishes for small r. The
remaining beta integral has r^(-alpha)-type endpoint singularities. For
bounded sets it is done with QUADPACK's algebraic-weight rule. For bands,
beta and pi - beta are folded together, and the integral is split at
directions where the integrand has kinks: rays tangent to the boundary
elsewhere, and rays through the slab corners.

For bands only the slab |y_1 - x_1| < L is treated by ray casting. Outside
it the y_2-integral is explicit and its 1/|t| expansion is summed exactly
over the periodic profile (see :func:`nmc.quad.tail_table`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.integrate import IntegrationWarning, quad as scipy_quad
from scipy.optimize import brentq
from scipy.special import binom

from . import _backend
from ._nodes import legendre_unit
from .errors import CrossingError, DomainError, OffBoundaryError
from .kernels import KernelContext, series_coefficients
from .quad import DEFAULT, QuadratureConfig, tail_table
from .series import CosineSeries

__all__ = ["PlanarSet", "nmc_of_set", "nmc_boundary_form", "tangential_derivative", "MAX_CROSSINGS"]

MAX_CROSSINGS = 64
_KINDS = {"disc": 0, "ellipse": 1, "straight_band": 2, "graph_band": 3}
_N_FAR = 12
_ON_BOUNDARY = 1e-9
_EPS_LADDER = (1e-2, 5e-3, 2.5e-3)
_BETA_EDGE = 1e-6


@dataclass(frozen=True, eq=False)
class PlanarSet:
    """A planar set of one of four shapes.

    Use the constructors :meth:`disc`, :meth:`ellipse`, :meth:`straight_band`
    and :meth:`graph_band`. Bands are {|y_2| < u(y_1)}.
    """

    shape_kind: str
    params: tuple
    profile: CosineSeries | None = None

    @classmethod
    def disc(cls, r: float, center: tuple[float, float] = (0.0, 0.0)) -> "PlanarSet":
        if not r > 0:
            raise DomainError("radius must be positive")
        return cls("disc", (float(center[0]), float(center[1]), float(r)))

    @classmethod
    def ellipse(cls, a_axis: float, b_axis: float) -> "PlanarSet":
        if not (a_axis > 0 and b_axis > 0):
            raise DomainError("semi-axes must be positive")
        return cls("ellipse", (float(a_axis), float(b_axis)))

    @classmethod
    def straight_band(cls, R: float) -> "PlanarSet":
        if not R > 0:
            raise DomainError("half-width must be positive")
        return cls("straight_band", (float(R),), CosineSeries.constant(float(R)))

    @classmethod
    def graph_band(cls, u: CosineSeries) -> "PlanarSet":
        if not u.is_positive():
            raise DomainError("band profile must be positive")
        return cls("graph_band", (), u)

    @property
    def bounded(self) -> bool:
        return self.shape_kind in ("disc", "ellipse")

    def _axes(self):
        if self.shape_kind == "disc":
            cx, cy, r = self.params
            return cx, cy, r, r
        if self.shape_kind == "ellipse":
            return 0.0, 0.0, self.params[0], self.params[1]
        raise DomainError("closed-curve parameterization exists only for discs and ellipses")

    def indicator(self, x1, x2):
        """tau_E: +1 on the closed set, -1 outside."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.bounded:
            cx, cy, A, B = self._axes()
            inside = ((x1 - cx) / A) ** 2 + ((x2 - cy) / B) ** 2 <= 1.0
        else:
            inside = np.abs(x2) <= self.profile(x1)
        return np.where(inside, 1, -1)

    def boundary_param(self, theta):
        """Boundary point and outward unit normal at parameter ``theta``.

        Discs and ellipses use the angle of (A cos theta, B sin theta); bands
        use the abscissa of the upper boundary.
        """
        theta = float(theta)
        if self.bounded:
            cx, cy, A, B = self._axes()
            p = np.array([cx + A * math.cos(theta), cy + B * math.sin(theta)])
            n = np.array([B * math.cos(theta), A * math.sin(theta)])
        else:
            u = self.profile
            p = np.array([theta, u(theta)])
            n = np.array([-u.derivative(theta), 1.0])
        return p, n / np.hypot(*n)

    def boundary_tangent(self, theta) -> np.ndarray:
        """Unit tangent in the direction of increasing parameter."""
        _, n = self.boundary_param(theta)
        t = np.array([n[1], -n[0]]) if not self.bounded else np.array([-n[1], n[0]])
        return t

    def arc_speed(self, theta) -> float:
        """|d(boundary point)/d theta|."""
        theta = float(theta)
        if self.bounded:
            _, _, A, B = self._axes()
            return math.hypot(A * math.sin(theta), B * math.cos(theta))
        return math.hypot(1.0, self.profile.derivative(theta))

    # ------------------------------------------------------------ internals

    def _frame(self, x):
        """Tangent and inner normal at boundary point x; raises if x is off the boundary."""
        x1, x2 = float(x[0]), float(x[1])
        if self.bounded:
            cx, cy, A, B = self._axes()
            level = ((x1 - cx) / A) ** 2 + ((x2 - cy) / B) ** 2 - 1.0
            if abs(level) > _ON_BOUNDARY:
                raise OffBoundaryError(f"point {x} is not on the boundary (level {level:.3e})")
            n = np.array([(x1 - cx) / A ** 2, (x2 - cy) / B ** 2])
            n /= np.hypot(*n)
            return (x1, x2), np.array([-n[1], n[0]]), -n
        u = self.profile
        ux = u(x1)
        if abs(abs(x2) - ux) > _ON_BOUNDARY * max(1.0, ux):
            raise OffBoundaryError(f"point {x} is not on the band boundary")
        d = u.derivative(x1)
        h = math.hypot(1.0, d)
        # by symmetry the lower boundary has the same curvature as the upper one
        return (x1, ux), np.array([1.0, d]) / h, np.array([d, -1.0]) / h

    def _kernel_args(self):
        kind = _KINDS[self.shape_kind]
        if self.shape_kind == "disc":
            prm = np.array(self.params)
            size = self.params[2]
        elif self.shape_kind == "ellipse":
            prm = np.array(self.params)
            size = max(self.params)
        else:
            prm = np.array([self.profile.coeffs[0]])
            size = self.profile.sup_bound()
        coef = np.ascontiguousarray(self.profile.coeffs if self.profile is not None else np.zeros(1))
        freq = self.profile.freq if self.profile is not None else 1.0
        return kind, prm, coef, float(freq), float(size)


@dataclass(frozen=True)
class _Rays:
    kind: int
    prm: np.ndarray
    coef: np.ndarray
    freq: float
    x: tuple
    T: np.ndarray
    n: np.ndarray
    alpha: float
    half_width: float
    umax: float
    r_far: float
    r_start: float
    h_max: float

    def __call__(self, beta: float, mode: int, reflect: bool = False) -> float:
        # reflect=True evaluates direction pi - beta without rounding pi - beta
        kern = _backend.kernels()
        cb, sb = math.cos(beta), math.sin(beta)
        if reflect:
            cb = -cb
        val = kern.pair_value(self.kind, self.prm, self.coef, self.freq, self.x[0], self.x[1],
                              self.T[0], self.T[1], self.n[0], self.n[1], cb, sb, self.alpha, mode,
                              self.half_width, self.umax, self.r_far, self.r_start, self.h_max,
                              MAX_CROSSINGS)
        if not math.isfinite(val):
            raise CrossingError(f"crossing detection failed for direction beta = {beta}")
        return val


def _rays(ctx: KernelContext, E: PlanarSet, x) -> _Rays:
    (x1, x2), T, n = E._frame(x)
    kind, prm, coef, freq, size = E._kernel_args()
    if E.bounded:
        half_width, umax, r_far = 0.0, size, 2.05 * size
        h_max = 0.5 * size
    else:
        umax = size
        half_width = _slab(E)
        r_far = math.inf
        h_max = min(0.02 * umax, 0.05 / freq / max(1, coef.size - 1))
    return _Rays(kind, prm, coef, freq, (x1, x2), T, n, ctx.alpha, half_width, umax, r_far,
                 1e-12 * size, h_max)


def _slab(E: PlanarSet) -> float:
    return max(8.0 * E.profile.sup_bound(), 1.0)


def _qaws(f, a, b, wvar, cfg: QuadratureConfig) -> float:
    """int_a^b f(beta) (beta - a)^wvar[0] (b - beta)^wvar[1] for smooth f.

    Within _BETA_EDGE of an endpoint the ray is nearly tangent and f is
    replaced by its linear extrapolation from two interior samples.
    """
    d = _BETA_EDGE
    edges = {}

    def safe(beta):
        for end, sgn in ((a, 1.0), (b, -1.0)):
            off = sgn * (beta - end)
            if off < d:
                if end not in edges:
                    edges[end] = (f(end + sgn * d), f(end + sgn * 2.0 * d))
                f1, f2 = edges[end]
                return f1 + (off - d) * (f2 - f1) / d
        return f(beta)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = scipy_quad(safe, a, b, weight="alg", wvar=wvar, epsabs=0.1 * cfg.abs_tol,
                            epsrel=1e-12, limit=2000)
    return val


def _qags(f, a, b, cfg: QuadratureConfig, breaks=()) -> float:
    """int_a^b f, split at the directions where f is not smooth.

    Between breakpoints the integrand is smooth up to algebraic endpoint
    singularities (tangent rays, inflection points), which the extrapolating
    rule absorbs; across them it only converges slowly and can stall on a
    wrong value.
    """
    pts = [a] + [float(p) for p in breaks if a < p < b] + [b]
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi > lo:
                total += scipy_quad(f, lo, hi, epsabs=0.01 * cfg.abs_tol / len(pts), epsrel=1e-13,
                                    limit=2000)[0]
    return total


def _band_breaks(E: PlanarSet, rays: "_Rays") -> np.ndarray:
    """Directions beta in (0, pi) along which f(beta) is not smooth.

    These are rays tangent to the band boundary at some other point of the
    slab, found as roots of the tangent-line condition, and rays through the
    four slab corners.
    """
    u = E.profile
    c = u.coeffs
    om = np.arange(c.size) * u.freq
    x1, x2 = rays.x
    L = rays.half_width

    def val(y):
        return np.cos(np.multiply.outer(y, om)) @ c

    def der(y):
        return -np.sin(np.multiply.outer(y, om)) @ (c * om)

    tq, wq = legendre_unit(24)
    omax = max(float(om[-1]), 1e-300)

    def upper(d):
        # (u(x1 + d) - u(x1) - u'(x1 + d) d) / d^2 = -int_0^1 tau u''(x1 + tau d) dtau
        d = np.atleast_1d(np.asarray(d, dtype=float))
        out = np.empty(d.shape)
        small = np.abs(d) * omax < 0.5
        y = x1 + np.multiply.outer(d[small], tq)
        out[small] = (np.cos(np.multiply.outer(y, om)) @ (c * om * om)) @ (wq * tq)
        db = d[~small]
        out[~small] = (val(x1 + db) - x2 - der(x1 + db) * db) / db ** 2
        return out

    def lower(d):
        d = np.atleast_1d(np.asarray(d, dtype=float))
        return -val(x1 + d) - x2 + der(x1 + d) * d

    n_grid = int(math.ceil(2.0 * L / min(0.01, 0.05 / omax))) + 1
    grid = np.linspace(-L, L, n_grid)
    pts = []
    for fn, sgn in ((upper, 1.0), (lower, -1.0)):
        g = fn(grid)
        for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
            d = brentq(lambda z: float(fn(z)[0]), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
            pts.append((d, sgn * float(val(x1 + d)) - x2))
    for d in (-L, L):
        for sgn in (1.0, -1.0):
            pts.append((d, sgn * float(val(x1 + d)) - x2))
    out = []
    for d1, d2 in pts:
        if d1 == 0.0 and d2 == 0.0:
            continue
        b = math.atan2(d1 * rays.n[0] + d2 * rays.n[1], d1 * rays.T[0] + d2 * rays.T[1]) % math.pi
        out.append(b)
    return np.unique(np.array(out))


# ---------------------------------------------------------------- area form


def _band_far_area(ctx: KernelContext, E: PlanarSet, x1: float, x2: float, L: float) -> float:
    """int over |y_1 - x_1| > L of tau_E(y) |x - y|^(-2-alpha) dy."""
    u = E.profile
    tab = ctx.table
    period = 2.0 * math.pi / u.freq
    N = _far_samples(u)
    tt, tw = tail_table(ctx.alpha, float(L), float(period), N, 2 * _N_FAR + 2)
    fser = series_coefficients(ctx.kappa, _N_FAR)
    total = -4.0 * tab.finf * L ** (-ctx.alpha) / ctx.alpha
    for y1 in (x1 + tt, x1 - tt):
        uu = u(y1)
        zp = uu - x2
        zm = -uu - x2
        for j in range(_N_FAR + 1):
            total += 2.0 * fser[j] * float(tw[2 * j] @ (zp ** (2 * j + 1) - zm ** (2 * j + 1)))
    return total


def _far_samples(u: CosineSeries) -> int:
    need = 2 * (2 * _N_FAR + 2) * max(u.K, 1) + 2
    n = 64
    while n < need:
        n *= 2
    return n


def nmc_of_set(ctx: KernelContext, E: PlanarSet, x, cfg: QuadratureConfig = DEFAULT) -> float:
    """H_E(x) = -PV int tau_E(y) |x - y|^(-2-alpha) dy at a boundary point x."""
    rays = _rays(ctx, E, x)
    a = ctx.alpha
    f = partial(rays, mode=0)

    if E.bounded:
        near = _qaws(lambda b: f(b) * b ** a * (math.pi - b) ** a, 0.0, math.pi, (-a, -a), cfg)
        return -near
    b = _band_breaks(E, rays)
    near = _qags(lambda beta: f(beta) + f(beta, reflect=True), 0.0, 0.5 * math.pi, cfg,
                 np.unique(np.minimum(b, math.pi - b)))
    far = _band_far_area(ctx, E, rays.x[0], rays.x[1], rays.half_width)
    return -(near + far)


# ---------------------------------------------------------------- tangential derivative


def _band_far_tangential(ctx: KernelContext, E: PlanarSet, x1: float, x2: float, T, L: float) -> float:
    """int over |y_1 - x_1| > L of tau_E(y) |x - y|^(-4-alpha) (x - y).T dy."""
    u = E.profile
    a = ctx.alpha
    kap = ctx.kappa
    beta2 = kap + 1.0
    period = 2.0 * math.pi / u.freq
    N = _far_samples(u)
    tt, tw = tail_table(a, float(L), float(period), N, 2 * _N_FAR + 2)
    fser2 = series_coefficients(beta2, _N_FAR)
    bk = binom(-kap, np.arange(_N_FAR + 1))
    total = 0.0
    for sgn, y1 in ((1.0, x1 + tt), (-1.0, x1 - tt)):
        uu = u(y1)
        zp = uu - x2
        zm = -uu - x2
        for j in range(_N_FAR + 1):
            odd = zp ** (2 * j + 1) - zm ** (2 * j + 1)
            total += -2.0 * T[0] * sgn * fser2[j] * float(tw[2 * j + 1] @ odd)
            if j >= 1:
                even = zp ** (2 * j) - zm ** (2 * j)
                total += 2.0 * T[1] / (2.0 + a) * bk[j] * float(tw[2 * j] @ even)
    return total


def tangential_derivative(ctx: KernelContext, E: PlanarSet, x, v, cfg: QuadratureConfig = DEFAULT) -> float:
    """Derivative of H_E along the unit tangent ``v`` at the boundary point x.

    Evaluates (2 + alpha) PV int tau_E(y) |x - y|^(-4-alpha) (x - y).v dy with
    the same paired rays as :func:`nmc_of_set`; directions beta and pi - beta
    are combined so that the r^(-1-alpha) endpoint singularities cancel.
    """
    rays = _rays(ctx, E, x)
    v = np.asarray(v, dtype=float)
    if abs(np.hypot(*v) - 1.0) > 1e-10:
        raise DomainError("v must be a unit vector")
    if abs(float(v @ rays.n)) > 1e-10:
        raise DomainError("v must be tangent to the boundary at x")
    sign = 1.0 if float(v @ rays.T) > 0 else -1.0
    a = ctx.alpha
    f = partial(rays, mode=1)

    def g(beta):
        return math.cos(beta) * (f(beta) - f(beta, reflect=True))

    breaks = ()
    if not E.bounded:
        b = _band_breaks(E, rays)
        breaks = np.unique(np.minimum(b, math.pi - b))
    near = -_qags(g, 0.0, 0.5 * math.pi, cfg, breaks)
    if E.bounded:
        return sign * (2.0 + a) * near
    far = _band_far_tangential(ctx, E, rays.x[0], rays.x[1], rays.T, rays.half_width)
    return sign * (2.0 + a) * (near + far)


# ---------------------------------------------------------------- boundary form


def _graded_sum(h, lo: float, hi: float, width0: float, n: int = 20) -> float:
    """int_lo^hi h with panels growing geometrically away from ``lo``."""
    x, w = legendre_unit(n)
    edges = [lo]
    step = width0
    while edges[-1] + step < hi:
        edges.append(edges[-1] + step)
        step *= 2.0
    edges.append(hi)
    e = np.array(edges)
    a, b = e[:-1], e[1:]
    nodes = a[:, None] + (b - a)[:, None] * x
    return float(np.sum(h(nodes) * ((b - a)[:, None] * w)))


def _boundary_excluded(alpha: float, A: float, B: float, phx: float, eps: float) -> float:
    """Integral of |x-y|^(-2-alpha) (x-y).nu dsigma over |phi - phx| > eps."""

    def h(u):
        # u = phi - phx, both signs handled by the caller
        ph = phx + u
        sm = np.sin(-0.5 * u)
        sp = 0.5 * (phx + ph)
        d1 = -2.0 * A * np.sin(sp) * sm
        d2 = 2.0 * B * np.cos(sp) * sm
        dist = np.hypot(d1, d2)
        return dist ** (-2.0 - alpha) * (d1 * B * np.cos(ph) + d2 * A * np.sin(ph))

    total = _graded_sum(h, eps, math.pi, eps)
    total += _graded_sum(lambda u: h(-u), eps, math.pi, eps)
    return total


def nmc_boundary_form(ctx: KernelContext, E: PlanarSet, x, cfg: QuadratureConfig = DEFAULT,
                      eps_ladder: tuple[float, float, float] = _EPS_LADDER) -> float:
    """-(2/alpha) PV int over the boundary of |x-y|^(-2-alpha) (x-y).nu(y) dsigma(y).

    The PV is realised by excluding |phi - phi_x| < eps in the curve
    parameter and extrapolating eps -> 0 from three values, using the
    expansion I(eps) = I_0 + c_1 eps^(1-alpha) + c_2 eps^(3-alpha) + ...
    """
    if not E.bounded:
        raise DomainError("the boundary form is offered for discs and ellipses only")
    (x1, x2), _, _ = E._frame(x)
    cx, cy, A, B = E._axes()
    phx = math.atan2((x2 - cy) / B, (x1 - cx) / A)
    a = ctx.alpha
    eps = np.asarray(eps_ladder, dtype=float)
    vals = np.array([_boundary_excluded(a, A, B, phx, float(e)) for e in eps])
    m = np.column_stack([np.ones(3), eps ** (1.0 - a), eps ** (3.0 - a)])
    i0 = np.linalg.solve(m, vals)[0]
    return -(2.0 / a) * i0
