from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.optimize import brentq

from nmc import graph_nmc, quad, spectrum
from nmc.errors import DegenerateEigenvalueError, DomainError
from nmc.kernels import KernelContext
from nmc.series import CosineSeries

from oracles import critical_R, gamma_quad, lambda_k as lambda_oracle, mu_inf as mu_inf_oracle


@pytest.mark.parametrize("k", [0, 1, 2, 3, 7, 15, 16, 40])
def test_lambda_k_vs_closed_form(ctx_half, cfg, k):
    assert spectrum.lambda_k(ctx_half, k, cfg) == pytest.approx(lambda_oracle(0.5, 1.0, k), abs=1e-8)


def test_lambda_0_negative(cfg):
    for alpha in (0.25, 0.5, 0.75):
        assert spectrum.lambda_k(KernelContext(alpha, 0.7), 0, cfg) < 0


def test_lambda_k_range(ctx_half, cfg):
    with pytest.raises(DomainError):
        spectrum.lambda_k(ctx_half, -1, cfg)
    with pytest.raises(DomainError):
        spectrum.lambda_k(ctx_half, 5000, cfg)
    with pytest.raises(DomainError):
        spectrum.lambda_k(ctx_half, 3, cfg, method="bogus")


@pytest.mark.parametrize("k", [1, 2, 5, 16, 33])
def test_rescaling_identity(crit, cfg, k):
    direct = spectrum.lambda_k(crit, k, cfg, method="direct")
    scaled = spectrum.lambda_k(crit, k, cfg, method="scaled")
    assert abs(direct - scaled) <= 1e-8 * max(1.0, abs(direct))


def test_mu_inf(cfg):
    for alpha in (0.25, 0.5, 0.75):
        v = spectrum.mu_inf(KernelContext(alpha, 1.0), cfg)
        assert v > 0
        assert v == pytest.approx(mu_inf_oracle(alpha), abs=1e-8)


def test_mu_inf_asymptotics(crit, cfg):
    ratio = spectrum.lambda_k(crit, 256, cfg) / (256 ** 1.5 * spectrum.mu_inf(crit, cfg))
    assert abs(ratio - 1) < 0.01


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_solve_R(cfg, alpha):
    res = spectrum.solve_R_detailed(alpha, cfg)
    assert abs(res.lambda1_residual) <= 1e-10
    assert res.R_star == pytest.approx(critical_R(alpha), abs=1e-6)
    assert spectrum.lambda1(alpha, 2 * res.R_star, cfg) > 0
    assert spectrum.lambda1(alpha, 0.5 * res.R_star, cfg) < 0
    assert res.history[0][0] == "bracket"


def test_solve_R_domain(cfg):
    with pytest.raises(DomainError):
        spectrum.solve_R_detailed(1.5, cfg)


def test_distinct_critical_widths(cfg):
    rs = [spectrum.solve_R(a, cfg) for a in (0.25, 0.5, 0.75)]
    assert len(set(rs)) == 3


def test_lambda1_prime(cfg):
    ctx = KernelContext(0.5, 0.9)
    h = 1e-5
    fd = (spectrum.lambda1(0.5, 0.9 + h, cfg) - spectrum.lambda1(0.5, 0.9 - h, cfg)) / (2 * h)
    d = spectrum.lambda1_prime(ctx, cfg)
    assert d > 0
    assert abs(d - fd) / d < 1e-6


def test_gamma(crit, cfg):
    g = spectrum.gamma_const(crit, cfg)
    assert g > 0
    assert g == pytest.approx(gamma_quad(0.5, crit.R), rel=1e-9)
    g2 = spectrum.gamma_const(crit.with_R(2 * crit.R), cfg)
    assert g2 == pytest.approx(gamma_quad(0.5, 2 * crit.R), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_spectrum_ordering(cfg, alpha):
    sp = spectrum.compute_spectrum(spectrum.critical_context(alpha, cfg), 64, cfg)
    assert sp.lambdas[0] < 0
    assert abs(sp.lambdas[1]) <= 1e-8
    assert np.all(np.diff(sp.lambdas) > 0)
    assert np.all(np.diff(sp.ratios()[1:]) > 0)
    assert sp.K == 64


def test_convolution_eigenfunction(crit, cfg):
    # P_R * e_k sampled at s = 0 through the periodized kernel
    for k in (0, 1, 2, 5):
        per = scipy_quad(lambda t: quad.periodized_kernel("P_R", crit, t, cfg) * math.cos(k * t),
                         0, 2 * math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        osc = quad.oscillatory_cos_integral(spectrum.pr_kernel(crit), k, cfg)
        assert osc == pytest.approx(per, abs=1e-8)


def test_apply_L(crit, cfg):
    z = spectrum.apply_L(crit, CosineSeries.basis(1), cfg)
    assert np.max(np.abs(z.coeffs)) < 1e-8
    e0 = spectrum.apply_L(crit, CosineSeries.basis(0), cfg)
    assert e0.coeffs[0] < 0
    w = CosineSeries([0.2, -0.4, 0.1, 0.05, -0.02, 0.01])
    Lw = spectrum.apply_L(crit, w, cfg)
    s = np.linspace(0.05, 2 * math.pi - 0.05, 16)
    ref = graph_nmc.dphi_dvarphi(crit, 0.0, 1.0, CosineSeries.basis(1), w, s, cfg)
    assert np.max(np.abs(Lw(s) - ref)) < 1e-6


def test_solve_L_on_V2(crit, cfg, rng):
    assert np.all(spectrum.solve_L_on_V2(crit, CosineSeries.zeros(4), cfg).coeffs == 0)
    with pytest.raises(DomainError):
        spectrum.solve_L_on_V2(crit, CosineSeries.basis(1), cfg)
    c = rng.normal(size=12)
    c[1] = 0.0
    f = CosineSeries(c)
    w = spectrum.solve_L_on_V2(crit, f, cfg)
    assert w.c1 == 0.0
    assert np.max(np.abs(spectrum.apply_L(crit, w, cfg).coeffs - f.coeffs)) <= 1e-12


def test_inverse_dense_solve(crit, cfg):
    # sample the operator on modes {0, 2, ..., 5} at midpoint nodes and solve densely
    modes = [0, 2, 3, 4, 5]
    s = math.pi * (np.arange(6) + 0.5) / 6
    A = np.column_stack([graph_nmc.dphi_dvarphi(crit, 0.0, 1.0, CosineSeries.basis(1), CosineSeries.basis(k), s, cfg)
                         for k in modes])
    x = np.linalg.lstsq(A, np.cos(2 * s), rcond=None)[0]
    w = spectrum.solve_L_on_V2(crit, CosineSeries.basis(2), cfg)
    assert w.coeffs[2] == pytest.approx(1 / spectrum.lambda_k(crit, 2, cfg), rel=1e-14)
    assert x[1] == pytest.approx(w.coeffs[2], rel=1e-7)
    assert np.max(np.abs(np.delete(x, 1))) < 1e-7


def test_degenerate_eigenvalue(cfg):
    # choose R so that lambda_2 vanishes
    R2 = brentq(lambda R: lambda_oracle(0.5, R, 2), 1e-3, 10.0, xtol=1e-15)
    ctx = KernelContext(0.5, R2)
    assert abs(spectrum.lambda_k(ctx, 2, cfg)) < 1e-9
    with pytest.raises(DegenerateEigenvalueError):
        spectrum.solve_L_on_V2(ctx, CosineSeries.basis(2), cfg, tiny=1e-8)
    with pytest.raises(DegenerateEigenvalueError):
        spectrum.solve_L_on_V2(spectrum.critical_context(0.5), CosineSeries.basis(0), cfg, tiny=1e3)


def test_dlambda_projection(crit, cfg):
    from nmc.branch import _projector

    P = _projector(32)
    proj = P.dct @ graph_nmc.dphi_dlambda(crit, 0.0, 1.0, CosineSeries.basis(1), P.nodes, cfg)
    g = spectrum.gamma_const(crit, cfg)
    assert proj[1] == pytest.approx(g, abs=1e-8)
    assert np.max(np.abs(np.delete(proj, 1))) < 1e-10
