"""Self-verification suites run by ``nmc verify``.

Each suite returns a list of :class:`Check` records. Checks compare the
library against closed forms, alternative code paths or internal
consistency relations, at tolerances that leave a margin over the observed
accuracy. Random sample points come from a seeded generator so reruns are
identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad as scipy_quad
from scipy.special import gamma as gamma_fn, kv

from . import branch, graph_nmc, kernels, quad, setgeom, spectrum
from .kernels import KernelContext
from .quad import QuadratureConfig
from .series import CosineSeries

SUITES = ("kernels", "quad", "graph", "spectrum", "branch", "setgeom")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float


def _check(suite, name, err, tol, t0) -> Check:
    err = float(err)
    return Check(suite, name, bool(np.isfinite(err) and err <= tol), err, tol, time.perf_counter() - t0)


def pr_cos_closed_form(alpha: float, R: float, k: float) -> float:
    """int_R cos(k t) ((2R)^2 + t^2)^(-(2+alpha)/2) dt via the modified Bessel function."""
    b = 0.5 * (2.0 + alpha)
    W = 2.0 * R
    if k == 0:
        return math.sqrt(math.pi) * gamma_fn(b - 0.5) / gamma_fn(b) * W ** (1.0 - 2.0 * b)
    return 2.0 * math.sqrt(math.pi) / gamma_fn(b) * (k / (2.0 * W)) ** (b - 0.5) * kv(b - 0.5, k * W)


def mu_inf_closed_form(alpha: float) -> float:
    """int_R (1 - cos t)|t|^(-2-alpha) dt."""
    return math.pi / (gamma_fn(2.0 + alpha) * math.sin(0.5 * math.pi * (1.0 + alpha)))


def suite_kernels(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    ctx = KernelContext(alpha, 1.0)
    t0 = time.perf_counter()
    ref = scipy_quad(lambda x: (1 + x * x) ** (-ctx.kappa), 0, 1.3, epsabs=0.0, epsrel=1e-13)[0]
    out.append(_check("kernels", "F(1.3) vs adaptive quadrature", abs(kernels.eval_F(ctx, 1.3) - ref), 1e-13, t0))
    t0 = time.perf_counter()
    q = rng.uniform(-5, 5, 16)
    out.append(_check("kernels", "F odd", np.max(np.abs(kernels.eval_F(ctx, q) + kernels.eval_F(ctx, -q))), 0.0, t0))
    t0 = time.perf_counter()
    out.append(_check("kernels", "F1(0, q) = q", np.max(np.abs(kernels.eval_F1(ctx, 0.0, q) - q)), 0.0, t0))
    t0 = time.perf_counter()
    err = abs(kernels.eval_F1(ctx, 0.4, 1.1) - kernels.eval_F(ctx, 0.44) / 0.4)
    out.append(_check("kernels", "F1(a, q) = F(a q)/a", err, 1e-14, t0))
    t0 = time.perf_counter()
    lhs = kernels.eval_F3(ctx, 0.4, 1.1, -0.3)
    rhs = (kernels.eval_F1(ctx, 0.4, 1.1) + kernels.eval_F1(ctx, 0.4, -0.3)) / 0.8
    out.append(_check("kernels", "F3 symmetrization identity", abs(lhs - rhs), 1e-11, t0))
    t0 = time.perf_counter()
    errs = []
    for d in (0.9e-4, 1.1e-4):
        ref = kernels.eval_F2(ctx, 0.7, 1.0, 1.0, d, switch=1.0)
        errs.append(abs(kernels.eval_F2(ctx, 0.7, 1.0, 1.0, d, switch=0.0) - ref))
    out.append(_check("kernels", "F2 branches agree at the switch", max(errs), 1e-10, t0))
    return out


def suite_quad(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    t0 = time.perf_counter()
    v = quad.pv_symmetric_integral(lambda t: np.where(t <= 1.0, t ** -0.5, 0.0), cfg, -0.5,
                                   tail=lambda T: 0.0, upper=1.0)
    out.append(_check("quad", "int_0^1 t^-1/2 = 2", abs(v - 2.0), 1e-10, t0))
    ctx = KernelContext(alpha, 0.6)
    for k in (0, 3, 16):
        t0 = time.perf_counter()
        num = quad.oscillatory_cos_integral(quad.kernel_for("P_R", ctx), k, cfg)
        out.append(_check("quad", f"cos integral of P_R, k={k}", abs(num - pr_cos_closed_form(alpha, 0.6, k)),
                          1e-10, t0))
    t0 = time.perf_counter()
    t = float(rng.uniform(0.1, 3.0))
    a = quad.periodized_kernel("mu_alpha", ctx, t, cfg)
    b = quad.periodized_kernel("mu_alpha", ctx, 2 * math.pi - t, cfg)
    out.append(_check("quad", "periodized kernel even about pi", abs(a - b) / abs(a), 1e-12, t0))
    return out


def suite_graph(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    ctx = spectrum.critical_context(alpha, cfg)
    cos = CosineSeries.basis(1)
    s = rng.uniform(0, math.pi, 3)
    t0 = time.perf_counter()
    out.append(_check("graph", "Phi(0, 1, cos) = 0", np.max(np.abs(graph_nmc.phi(ctx, 0.0, 1.0, cos, s, cfg))),
                      1e-9, t0))
    for k in (0, 2, 3):
        t0 = time.perf_counter()
        d = graph_nmc.dphi_dvarphi(ctx, 0.0, 1.0, cos, CosineSeries.basis(k), s, cfg)
        ref = spectrum.lambda_k(ctx, k, cfg) * np.cos(k * s)
        out.append(_check("graph", f"D_phi Phi on cos({k} s) = lambda_{k} cos({k} s)", np.max(np.abs(d - ref)),
                          1e-7, t0))
    t0 = time.perf_counter()
    h = graph_nmc.straight_band_h(ctx, cfg)
    closed = 4.0 * ctx.F_infinity * (2 * ctx.R) ** (-alpha) / alpha
    hg = graph_nmc.nmc_of_graph(ctx, CosineSeries.constant(ctx.R), 0.3, cfg)
    out.append(_check("graph", "straight band: quadrature, graph and closed form",
                      max(abs(h - closed), abs(hg - closed)) / closed, 1e-10, t0))
    t0 = time.perf_counter()
    w = CosineSeries(np.array([ctx.R, 0.1]))
    lam = 2.0
    wl = CosineSeries(lam * w.coeffs, freq=1.0 / lam)
    pts = rng.uniform(0, 2 * math.pi, 4)
    lhs = graph_nmc.nmc_of_graph(ctx, wl, lam * pts, cfg)
    rhs = lam ** (-alpha) * graph_nmc.nmc_of_graph(ctx, w, pts, cfg)
    out.append(_check("graph", "scaling law", np.max(np.abs(lhs - rhs)), 1e-7, t0))
    t0 = time.perf_counter()
    direct = graph_nmc.phi(ctx, 0.02, 1.0, cos, 0.0, cfg)
    oracle = graph_nmc.rescaled_identity_phi(ctx, 0.02, 1.0, cos, 0.0, cfg)
    out.append(_check("graph", "Phi vs rescaled curvature identity", abs(direct - float(oracle)), 1e-6, t0))
    return out


def suite_spectrum(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    t0 = time.perf_counter()
    res = spectrum.solve_R_detailed(alpha, cfg)
    out.append(_check("spectrum", "lambda_1(R*) = 0", abs(res.lambda1_residual), 1e-10, t0))
    ctx = KernelContext(alpha, res.R_star)
    t0 = time.perf_counter()
    sp = spectrum.compute_spectrum(ctx, 16, cfg)
    out.append(_check("spectrum", "lambda_0 < 0", max(sp.lambdas[0], 0.0), 0.0, t0))
    gaps = np.diff(sp.lambdas)
    out.append(_check("spectrum", "lambda_k increasing", max(-gaps.min(), 0.0) if gaps.min() <= 0 else 0.0,
                      0.0, t0))
    t0 = time.perf_counter()
    out.append(_check("spectrum", "mu_inf closed form", abs(sp.mu_inf - mu_inf_closed_form(alpha)), 1e-10, t0))
    t0 = time.perf_counter()
    f = CosineSeries(np.array([0.3, 0.0, -0.2, 0.1, 0.05]))
    back = spectrum.apply_L(ctx, spectrum.solve_L_on_V2(ctx, f, cfg), cfg)
    out.append(_check("spectrum", "L L^-1 = I on V2", np.max(np.abs(back.coeffs - f.coeffs)), 1e-12, t0))
    t0 = time.perf_counter()
    out.append(_check("spectrum", "gamma > 0", max(-sp.gamma, 0.0), 0.0, t0))
    return out


def suite_branch(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    ctx = spectrum.critical_context(alpha, cfg)
    t0 = time.perf_counter()
    p0 = branch.newton_solve(ctx, 0.0, cfg=cfg)
    out.append(_check("branch", "a = 0 gives lambda = 1, v = 0", abs(p0.lam - 1.0) + p0.v.l2(), 0.0, t0))
    t0 = time.perf_counter()
    p1 = branch.newton_solve(ctx, 0.01, cfg=cfg)
    out.append(_check("branch", "Newton residual at a = 0.01", p1.residual_norm, 1e-9, t0))
    t0 = time.perf_counter()
    p2 = branch.newton_solve(ctx, 0.02, (p1.lam, p1.v), cfg)
    ok = p1.v.l2() < p2.v.l2() and abs(p1.lam - 1) < abs(p2.lam - 1)
    out.append(_check("branch", "|lambda - 1| and |v| shrink as a -> 0", 0.0 if ok else 1.0, 0.0, t0))
    t0 = time.perf_counter()
    band = branch.reconstruct_band(p2, cfg)
    pts = rng.uniform(0, band.period, 4)
    out.append(_check("branch", "reconstructed band has constant curvature",
                      np.max(branch.band_nmc_defect(band, pts, cfg)), 1e-5, t0))
    return out


def suite_setgeom(alpha: float, cfg: QuadratureConfig, rng) -> list[Check]:
    out = []
    ctx = KernelContext(alpha, 1.0)
    D = setgeom.PlanarSet.disc(1.0)
    t0 = time.perf_counter()
    vals = [setgeom.nmc_of_set(ctx, D, D.boundary_param(th)[0], cfg) for th in rng.uniform(0, 2 * math.pi, 4)]
    out.append(_check("setgeom", "disc has constant curvature", (max(vals) - min(vals)) / vals[0], 1e-8, t0))
    E = setgeom.PlanarSet.ellipse(1.5, 1.0)
    for th in (0.0, 0.5 * math.pi):
        t0 = time.perf_counter()
        x = E.boundary_param(th)[0]
        a = setgeom.nmc_of_set(ctx, E, x, cfg)
        b = setgeom.nmc_boundary_form(ctx, E, x, cfg)
        out.append(_check("setgeom", f"ellipse area vs boundary form at theta={th:.4f}", abs(a - b) / abs(a),
                          1e-4, t0))
    t0 = time.perf_counter()
    S = setgeom.PlanarSet.straight_band(0.6)
    h = setgeom.nmc_of_set(ctx, S, (0.0, 0.6), cfg)
    ref = graph_nmc.straight_band_h(ctx.with_R(0.6), cfg)
    out.append(_check("setgeom", "straight band vs h_R", abs(h - ref) / ref, 1e-5, t0))
    return out


_RUNNERS: dict[str, Callable] = {
    "kernels": suite_kernels,
    "quad": suite_quad,
    "graph": suite_graph,
    "spectrum": suite_spectrum,
    "branch": suite_branch,
    "setgeom": suite_setgeom,
}


def run_suite(name: str, alpha: float = 0.5, cfg: QuadratureConfig = quad.DEFAULT, seed: int = 0) -> list[Check]:
    """Run one suite, or every suite for ``name == "all"``."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise KeyError(n)
    rng = np.random.default_rng(seed)
    out: list[Check] = []
    for n in names:
        out.extend(_RUNNERS[n](alpha, cfg, rng))
    return out
