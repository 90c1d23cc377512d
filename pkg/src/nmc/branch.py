"""Continuation of the bifurcating branch of periodic constant-NMC bands.

At amplitude ``a`` we look for (lam, v) with v even, 2 pi-periodic and
orthogonal to cos such that Phi(a, lam, cos + v) = 0. Truncating v to modes
{0, 2, ..., K} and collocating at the K + 1 nodes s_j = pi (j + 1/2)/(K + 1)
gives a square system. Its discrete cosine projection onto mode 1 fixes lam
and the remaining modes fix v, so at a = 0 the Jacobian is diagonal with
entries gamma, lam_0, lam_2, ..., lam_K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NMCError, NonConvergenceError
from .graph_nmc import DEFAULT_BALL, DEFAULT_NU, nmc_of_graph, phi_system, straight_band_h
from .kernels import KernelContext
from .quad import DEFAULT, QuadratureConfig
from .series import CosineSeries

__all__ = [
    "BranchPoint", "Band", "collocation_nodes", "residual", "newton_solve", "continue_branch",
    "reconstruct_band", "DEFAULT_K",
]

DEFAULT_K = 32
NEWTON_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BranchPoint:
    """Solution (a, lam, v) of the collocated equation; v has c_1 = 0."""

    a: float
    lam: float
    v: CosineSeries
    residual_norm: float
    R: float
    alpha: float
    history: tuple = ()

    @property
    def K(self) -> int:
        return self.v.K

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.lam

    def varphi(self) -> CosineSeries:
        return self.v + CosineSeries.basis(1, self.v.K)


@dataclass(frozen=True, eq=False)
class Band:
    """Unrescaled band {|y_2| < profile(y_1)} with constant curvature ``h``."""

    a: float
    period: float | None
    profile: CosineSeries
    h: float
    alpha: float = 0.5
    R: float = 1.0

    @property
    def degenerate(self) -> bool:
        """True for the straight band (constant profile, no minimal period)."""
        return self.period is None


def collocation_nodes(K: int) -> np.ndarray:
    """Midpoint Chebyshev nodes pi (j + 1/2)/(K + 1) on (0, pi)."""
    n = K + 1
    return math.pi * (np.arange(n) + 0.5) / n


@dataclass(frozen=True, eq=False)
class _Projector:
    nodes: np.ndarray
    dct: np.ndarray  # coefficients of the interpolating cosine polynomial


def _projector(K: int) -> _Projector:
    s = collocation_nodes(K)
    n = s.size
    m = np.cos(np.multiply.outer(np.arange(n), s)) * (2.0 / n)
    m[0] *= 0.5
    return _Projector(s, m)


def _v_from_unknowns(x: np.ndarray, K: int) -> CosineSeries:
    c = np.zeros(K + 1)
    c[0] = x[1]
    c[2:] = x[2:]
    return CosineSeries(c)


def residual(ctx: KernelContext, a: float, lam: float, v: CosineSeries, nodes,
             cfg: QuadratureConfig = DEFAULT, **kw) -> np.ndarray:
    """Phi(a, lam, cos + v) at the given nodes."""
    if v.coeffs.size > 1 and v.coeffs[1] != 0.0:
        raise DomainError("v must be orthogonal to cos (c_1 = 0)")
    K = max(v.K, 1)
    varphi = v.padded(K) + CosineSeries.basis(1, K)
    return phi_system(ctx, a, lam, varphi, nodes, cfg, want_jac=False, **kw).value


def _system(ctx, a, x, K, proj, cfg, want_jac, kw):
    lam = float(x[0])
    varphi = _v_from_unknowns(x, K) + CosineSeries.basis(1, K)
    sys = phi_system(ctx, a, lam, varphi, proj.nodes, cfg, want_jac=want_jac, K=K, **kw)
    if not want_jac:
        return sys.value, None
    cols = np.empty((proj.nodes.size, K + 1))
    cols[:, 0] = sys.dlam
    cols[:, 1] = sys.jac[:, 0]
    cols[:, 2:] = sys.jac[:, 2:]
    # reorder rows so that the cos mode (fixing lam) comes first
    order = np.r_[1, 0, 2:K + 1]
    return sys.value, (proj.dct @ cols)[order]


def newton_solve(ctx: KernelContext, a: float, init: tuple[float, CosineSeries] | None = None,
                 cfg: QuadratureConfig = DEFAULT, *, K: int = DEFAULT_K, tol: float = NEWTON_TOL,
                 max_iter: int = 25, nu: float = DEFAULT_NU, ball: float = DEFAULT_BALL) -> BranchPoint:
    """Damped Newton iteration for the collocated branch equation at amplitude ``a``.

    Parameters
    ----------
    init
        Starting (lam, v); defaults to the bifurcation point (1, 0).
    tol
        Target for the max-norm of the residual at the nodes.

    Raises
    ------
    NonConvergenceError
        If the residual is not reduced below ``tol`` within ``max_iter`` steps.
    PositivityError
        If an iterate would describe a band of non-positive width.
    """
    if not abs(a) <= nu:
        raise DomainError(f"|a| = {abs(a)} exceeds the branch guard {nu}")
    proj = _projector(K)
    x = np.zeros(K + 1)
    if init is None:
        x[0] = 1.0
    else:
        lam0, v0 = init
        vc = v0.padded(K).coeffs if v0.K <= K else v0.coeffs[:K + 1]
        x[0] = lam0
        x[1] = vc[0]
        x[2:] = vc[2:]
    kw = {"nu": nu, "ball": ball}
    order = np.r_[1, 0, 2:K + 1]
    hist = []
    val, jac = _system(ctx, a, x, K, proj, cfg, True, kw)
    res = float(np.max(np.abs(val)))
    hist.append(res)
    for _ in range(max_iter):
        if res <= tol:
            break
        g = (proj.dct @ val)[order]
        dx = -np.linalg.solve(jac, g)
        step = 1.0
        norm0 = float(np.linalg.norm(g))
        while True:
            trial = x + step * dx
            try:
                tval, _ = _system(ctx, a, trial, K, proj, cfg, False, kw)
                tnorm = float(np.linalg.norm((proj.dct @ tval)[order]))
            except DomainError:
                tnorm = math.inf
            if tnorm <= (1.0 - 1e-4 * step) * norm0 or (step == 1.0 and tnorm < 1e-13):
                break
            step *= 0.5
            if step < 1.0 / 64:
                if float(np.max(np.abs(val))) <= 10.0 * tol:
                    # at the quadrature noise floor: accept the current iterate
                    return _point(ctx, a, x, K, res, hist)
                raise NonConvergenceError(f"line search failed at a = {a} (residual {res:.3e})")
        x = trial
        val, jac = _system(ctx, a, x, K, proj, cfg, True, kw)
        res = float(np.max(np.abs(val)))
        hist.append(res)
    if res > tol:
        raise NonConvergenceError(f"Newton did not converge at a = {a}: residual {res:.3e}")
    return _point(ctx, a, x, K, res, hist)


def _point(ctx, a, x, K, res, hist) -> BranchPoint:
    return BranchPoint(float(a), float(x[0]), _v_from_unknowns(x, K), res, ctx.R, ctx.alpha, tuple(hist))


def _march(ctx, targets, cfg, K, tol, min_step, kw):
    """Solve at each target amplitude in order, halving the step on failure."""
    pts = [newton_solve(ctx, 0.0, None, cfg, K=K, tol=tol, **kw)]
    prev = None
    out = []
    for target in targets:
        while True:
            cur = pts[-1]
            h = target - cur.a
            if abs(h) < min_step:
                raise NonConvergenceError(
                    f"continuation stalled near a = {cur.a}: step below {min_step}")
            if prev is None:
                guess = (cur.lam, cur.v)
            else:
                w = h / (cur.a - prev.a)
                guess = (cur.lam + w * (cur.lam - prev.lam), cur.v + (cur.v - prev.v) * w)
            try:
                pt = newton_solve(ctx, cur.a + h, guess, cfg, K=K, tol=tol, **kw)
            except NMCError:
                # insert a midpoint and retry from there
                mid = cur.a + 0.5 * h
                if abs(0.5 * h) < min_step:
                    raise NonConvergenceError(f"continuation stalled near a = {cur.a}")
                g2 = (cur.lam, cur.v) if prev is None else (
                    cur.lam + 0.5 * h / (cur.a - prev.a) * (cur.lam - prev.lam),
                    cur.v + (cur.v - prev.v) * (0.5 * h / (cur.a - prev.a)))
                mpt = newton_solve(ctx, mid, g2, cfg, K=K, tol=tol, **kw)
                prev = cur
                pts.append(mpt)
                continue
            prev = cur
            pts.append(pt)
            out.append(pt)
            break
    return pts[0], out


def continue_branch(ctx: KernelContext, a_max: float, steps: int, cfg: QuadratureConfig = DEFAULT, *,
                    K: int = DEFAULT_K, tol: float = NEWTON_TOL, min_step: float = 1e-6,
                    nu: float = DEFAULT_NU, ball: float = DEFAULT_BALL) -> list[BranchPoint]:
    """March from a = 0 to +a_max and to -a_max in ``steps`` equal steps each.

    Returns the 2 steps + 1 points sorted by amplitude. A linear extrapolation
    of the two previous points serves as predictor; a failed corrector inserts
    an intermediate amplitude and retries.
    """
    if int(steps) != steps or steps < 1:
        raise DomainError("steps must be a positive integer")
    if not (0.0 < a_max < nu):
        raise DomainError(f"a_max must lie in (0, {nu})")
    kw = {"nu": nu, "ball": ball}
    grid = a_max * np.arange(1, steps + 1) / steps
    origin, plus = _march(ctx, grid, cfg, K, tol, min_step, kw)
    _, minus = _march(ctx, -grid, cfg, K, tol, min_step, kw)
    return list(reversed(minus)) + [origin] + plus


def reconstruct_band(pt: BranchPoint, cfg: QuadratureConfig = DEFAULT) -> Band:
    """u_a(s) = R + (a/lam) {cos(lam s) + v(lam s)} as a cosine series in frequency lam."""
    ctx = KernelContext(pt.alpha, pt.R)
    h = straight_band_h(ctx, cfg)
    if pt.a == 0.0:
        return Band(0.0, None, CosineSeries.constant(pt.R), h, pt.alpha, pt.R)
    c = (pt.a / pt.lam) * pt.varphi().coeffs
    c[0] += pt.R
    return Band(pt.a, 2.0 * math.pi / pt.lam, CosineSeries(c, freq=pt.lam), h, pt.alpha, pt.R)


def band_nmc_defect(band: Band, s, cfg: QuadratureConfig = DEFAULT) -> np.ndarray:
    """Relative deviation of the band's curvature from h at the points ``s``."""
    ctx = KernelContext(band.alpha, band.R)
    h = np.asarray(nmc_of_graph(ctx, band.profile, s, cfg))
    return np.abs(h - band.h) / band.h
