from __future__ import annotations

import math

import numpy as np
import pytest

from nmc import graph_nmc, spectrum
from nmc.errors import DomainError, PositivityError
from nmc.graph_nmc import dphi_da, dphi_dlambda, dphi_dvarphi, nmc_of_graph, phi, phi_system, straight_band_h
from nmc.kernels import KernelContext
from nmc.series import CosineSeries

COS = CosineSeries.basis(1)


def test_straight_band_positive_and_scaling(cfg):
    for alpha in (0.25, 0.5, 0.75):
        ctx = KernelContext(alpha, 0.8)
        h = straight_band_h(ctx, cfg)
        assert h > 0
        assert straight_band_h(ctx.with_R(1.6), cfg) == pytest.approx(2 ** -alpha * h, rel=1e-12)


def test_straight_band_matches_constant_graph(ctx_half, cfg):
    h = straight_band_h(ctx_half, cfg)
    g = nmc_of_graph(ctx_half, CosineSeries.constant(1.0), np.array([0.0, 1.0, 2.5]), cfg)
    assert np.max(np.abs(g - h)) < 1e-9


def test_graph_positivity_guard(ctx_half, cfg):
    with pytest.raises(PositivityError):
        nmc_of_graph(ctx_half, CosineSeries([0.1, 0.2]), 0.0, cfg)


def test_graph_scaling_law(ctx_half, cfg):
    R = ctx_half.R
    w = CosineSeries([R, 0.1])
    s = np.linspace(0.1, 2 * math.pi - 0.3, 8)
    for lam in (0.5, 2.0):
        wl = CosineSeries(lam * w.coeffs, freq=1.0 / lam)
        lhs = nmc_of_graph(ctx_half, wl, lam * s, cfg)
        rhs = lam ** -0.5 * nmc_of_graph(ctx_half, w, s, cfg)
        assert np.max(np.abs(lhs - rhs)) <= 1e-7


def test_graph_even_and_periodic(ctx_half, cfg):
    u = CosineSeries([0.9, 0.1, -0.05, 0.02])
    s = np.array([0.3, 1.2, 2.8])
    a = nmc_of_graph(ctx_half, u, s, cfg)
    assert np.allclose(a, nmc_of_graph(ctx_half, u, -s, cfg), atol=1e-11, rtol=0)
    assert np.allclose(a, nmc_of_graph(ctx_half, u, s + 2 * math.pi, cfg), atol=1e-11, rtol=0)


def test_phi_vanishes_at_bifurcation(crit, cfg):
    s = np.linspace(0, math.pi, 7)
    assert np.max(np.abs(phi(crit, 0.0, 1.0, COS, s, cfg))) <= 10 * cfg.abs_tol


def test_phi1_zero_for_constants(crit, cfg):
    for a in (0.0, 0.05, -0.03):
        sys = phi_system(crit, a, 1.0, CosineSeries.constant(0.7), np.array([0.0, 1.0]), cfg, want_jac=False)
        assert np.max(np.abs(sys.phi1)) == 0.0


def test_phi_matches_rescaled_identity(crit, cfg):
    direct = phi(crit, 0.02, 1.0, COS, 0.0, cfg)
    oracle = float(graph_nmc.rescaled_identity_phi(crit, 0.02, 1.0, COS, 0.0, cfg))
    assert abs(direct - oracle) <= 1e-6


def test_phi_general_point_identity(crit, cfg):
    vp = CosineSeries([0.1, 1.0, 0.2, -0.1])
    s = np.array([0.0, 0.9, 2.2])
    direct = phi(crit, -0.04, 1.1, vp, s, cfg)
    oracle = graph_nmc.rescaled_identity_phi(crit, -0.04, 1.1, vp, s, cfg)
    assert np.max(np.abs(direct - oracle)) <= 1e-6


def test_phi_evenness_and_translation(crit, cfg):
    vp = CosineSeries([0.0, 1.0, 0.3, 0.1])
    s = np.array([0.4, 1.7, 3.0])
    v = phi(crit, 0.05, 0.9, vp, s, cfg)
    assert np.allclose(v, phi(crit, 0.05, 0.9, vp, -s, cfg), atol=1e-10, rtol=0)
    assert np.allclose(v, phi(crit, 0.05, 0.9, vp, s + 4 * math.pi, cfg), atol=1e-10, rtol=0)
    for f in (dphi_dlambda, dphi_da):
        d = f(crit, 0.05, 0.9, vp, s, cfg)
        assert np.allclose(d, f(crit, 0.05, 0.9, vp, -s, cfg), atol=1e-10, rtol=0)


@pytest.mark.parametrize("a", [0.0, 0.03])
def test_symmetrized_vs_naive(crit, cfg, a):
    vp = CosineSeries([0.0, 0.6, 0.15, -0.05])
    assert vp.c1_norm() <= 2.0
    s = np.array([0.0, 1.3])
    sym = graph_nmc.phi1_symmetrized(crit, a, vp, s, cfg)
    naive = graph_nmc.phi1_naive(crit, a, vp, s)
    assert np.max(np.abs(sym - naive)) <= 1e-6
    split = phi_system(crit, a, 1.0, vp, s, cfg, want_jac=False).phi1
    assert np.max(np.abs(sym - split)) <= 1e-9


def test_guards(crit, cfg):
    with pytest.raises(DomainError):
        phi(crit, 0.2, 1.0, COS, 0.0, cfg)
    with pytest.raises(DomainError):
        phi(crit, 0.0, 1.6, COS, 0.0, cfg)
    with pytest.raises(DomainError):
        phi(crit, 0.0, 1.0, CosineSeries.basis(3, scale=2.0), 0.0, cfg)
    assert np.isfinite(phi(crit, 0.0, 1.0, CosineSeries.basis(3, scale=2.0), 0.0, cfg, ball=100.0))
    with pytest.raises(DomainError):
        phi(crit, 0.0, 1.0, CosineSeries([0.0, 1.0], freq=2.0), 0.0, cfg)
    with pytest.raises(PositivityError):
        phi(crit, 0.09, 0.6, CosineSeries([0.0, 9.0]), 0.0, cfg, ball=100.0)


def test_kernel_direction_and_eigenfunctions(crit, cfg):
    s = np.linspace(0, math.pi, 5)
    assert np.max(np.abs(dphi_dvarphi(crit, 0.0, 1.0, COS, COS, s, cfg))) < 1e-9
    for k in (0, 2, 5, 9):
        lam_k = spectrum.lambda_k(crit, k, cfg)
        d = dphi_dvarphi(crit, 0.0, 1.0, COS, CosineSeries.basis(k), s, cfg)
        assert np.max(np.abs(d - lam_k * np.cos(k * s))) < 1e-7


def test_dlambda_at_bifurcation(crit, cfg):
    g = spectrum.gamma_const(crit, cfg)
    assert abs(dphi_dlambda(crit, 0.0, 1.0, COS, 0.5 * math.pi, cfg)) < 1e-12
    assert dphi_dlambda(crit, 0.0, 1.0, COS, 0.0, cfg) == pytest.approx(g, abs=1e-8)
    assert g > 0


def _fd(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def test_derivatives_vs_finite_differences(crit, cfg):
    vp = CosineSeries([0.05, 1.0, 0.1, -0.05, 0.02])
    psi = CosineSeries([0.3, -0.2, 0.5, 0.1])
    s = np.array([0.0, 0.7, 2.1])
    a, lam, h = 0.04, 1.05, 1e-5
    d = dphi_dvarphi(crit, a, lam, vp, psi, s, cfg)
    fd = _fd(lambda e: phi(crit, a, lam, vp + psi * e, s, cfg), 0.0, h)
    assert np.max(np.abs(d - fd) / np.maximum(np.abs(fd), 1e-3)) < 1e-5
    d = dphi_dlambda(crit, a, lam, vp, s, cfg)
    fd = _fd(lambda x: phi(crit, a, x, vp, s, cfg), lam, h)
    assert np.max(np.abs(d - fd) / np.maximum(np.abs(fd), 1e-3)) < 1e-6
    d = dphi_da(crit, a, lam, vp, s, cfg)
    fd = _fd(lambda x: phi(crit, x, lam, vp, s, cfg), a, h)
    assert np.max(np.abs(d - fd) / np.maximum(np.abs(fd), 1e-3)) < 1e-5


def test_da_at_zero(crit, cfg):
    s = np.array([0.0, 1.0, 2.0])
    d = dphi_da(crit, 0.0, 1.0, COS, s, cfg)
    h = 1e-5
    fd = (phi(crit, h, 1.0, COS, s, cfg) - phi(crit, -h, 1.0, COS, s, cfg)) / (2 * h)
    assert np.max(np.abs(d - fd)) < 1e-5 * max(1.0, np.max(np.abs(fd)))
    # Phi1 is even in a, so its a-derivative vanishes at a = 0
    p = lambda x: phi_system(crit, x, 1.0, COS, s, cfg, want_jac=False).phi1
    assert np.max(np.abs(p(h) - p(-h))) / (2 * h) < 1e-8


def test_graph_vs_set(cfg):
    from nmc.setgeom import PlanarSet, nmc_of_set

    ctx = KernelContext(0.5, 1.0)
    u = CosineSeries([1.0, 0.05])
    E = PlanarSet.graph_band(u)
    for s in (0.0, math.pi / 4, math.pi / 2):
        g = nmc_of_graph(ctx, u, s, cfg)
        v = nmc_of_set(ctx, E, (s, u(s)), cfg)
        assert abs(g - v) / abs(g) < 1e-5
