from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.special import zeta

from nmc import quad
from nmc.errors import DomainError, NonIntegrableSingularityError
from nmc.kernels import KernelContext, eval_PR
from nmc.quad import AlgebraicKernel, QuadratureConfig, oscillatory_cos_integral, periodized_kernel, pv_symmetric_integral
from nmc.verify import mu_inf_closed_form, pr_cos_closed_form


def test_config_invariants():
    for kw in ({"abs_tol": 0.0}, {"trunc_T": 5.0}, {"graded_levels": 4}, {"periodization_M": 2}):
        with pytest.raises(DomainError):
            QuadratureConfig(**kw)
    assert QuadratureConfig().with_tol(1e-6).abs_tol == 1e-6


def test_inverse_sqrt(cfg):
    v = pv_symmetric_integral(lambda t: np.where(t <= 1.0, t ** -0.5, 0.0), cfg, -0.5, tail=0.0, upper=1.0)
    assert v == pytest.approx(2.0, abs=1e-10)


def test_nonintegrable_exponent(cfg):
    with pytest.raises(NonIntegrableSingularityError):
        pv_symmetric_integral(lambda t: t ** -1.2, cfg, -1.2)


def _frac_integrand(alpha):
    def g(t):
        return 2.0 * np.sin(0.5 * t) ** 2 / t ** (2.0 + alpha)

    def tail(T):
        p = 2.0 + alpha
        return T ** (1.0 - p) / (p - 1.0) - float(quad.power_exp_tail(1.0, p, T)[0].real)

    return g, tail


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_fractional_symbol(cfg, alpha):
    g, tail = _frac_integrand(alpha)
    v = pv_symmetric_integral(g, cfg, -alpha, tail=tail)
    assert v == pytest.approx(0.5 * mu_inf_closed_form(alpha), abs=1e-8)


def test_fractional_symbol_fine_grid_oracle(cfg):
    # independent route: scipy on [0, T] plus the same closed tail
    g, tail = _frac_integrand(0.5)
    T = 60.0
    head = scipy_quad(g, 0, T, limit=2000, epsabs=1e-13, epsrel=1e-13)[0]
    assert pv_symmetric_integral(g, cfg, -0.5, tail=tail) == pytest.approx(head + tail(T), abs=1e-8)


def test_tolerance_ladder():
    g, tail = _frac_integrand(0.5)
    prev_tol, prev = None, None
    for tol in (1e-6, 1e-8, 1e-10, 1e-12):
        v = pv_symmetric_integral(g, QuadratureConfig(abs_tol=tol), -0.5, tail=tail)
        if prev is not None:
            assert abs(v - prev) <= prev_tol
        prev_tol, prev = tol, v


def test_power_tail_exact():
    kern = quad.kernel_for("mu_alpha_plus_one", KernelContext(0.5, 1.0))
    for T in (10.0, 50.0, 123.0):
        assert kern.tail(T) == T ** -1.5 / 1.5


def test_power_exp_tail_vs_scipy():
    for om, p in ((1.0, 2.5), (3.0, 1.5), (0.2, 2.0)):
        T = 10.0
        re = scipy_quad(lambda t: t ** -p, T, np.inf, weight="cos", wvar=om)[0]
        im = scipy_quad(lambda t: t ** -p, T, np.inf, weight="sin", wvar=om)[0]
        v = quad.power_exp_tail(om, p, T)[0]
        assert abs(v - complex(re, im)) < 1e-10


@pytest.mark.parametrize("k", [0, 1, 3, 16, 64, 200])
def test_cos_integral_of_PR(cfg, k):
    ctx = KernelContext(0.5, 0.6)
    num = oscillatory_cos_integral(quad.kernel_for("P_R", ctx), k, cfg)
    assert num == pytest.approx(pr_cos_closed_form(0.5, 0.6, k), abs=1e-10)


def test_cos_integral_k_zero_is_line_integral(cfg):
    ctx = KernelContext(0.5, 0.8)
    w = quad.kernel_for("P_R", ctx)
    direct = 2.0 * pv_symmetric_integral(lambda t: eval_PR(ctx, t), cfg, 0.0, tail=w.tail)
    assert oscillatory_cos_integral(w, 0, cfg) == pytest.approx(direct, abs=1e-10)
    assert direct > 0


def test_cos_integral_even_in_k(cfg):
    w = quad.kernel_for("P_R", KernelContext(0.5, 0.8))
    assert oscillatory_cos_integral(w, 5, cfg) == oscillatory_cos_integral(w, -5, cfg)


def test_cos_integral_riemann_lebesgue(cfg):
    ctx = KernelContext(0.5, 0.3)
    w = quad.kernel_for("P_R", ctx)
    vals = [oscillatory_cos_integral(w, k, cfg) for k in (16, 32, 64)]
    refs = [pr_cos_closed_form(0.5, 0.3, k) for k in (16, 32, 64)]
    assert np.allclose(vals, refs, rtol=0, atol=1e-10)
    assert vals[0] > vals[1] > vals[2] > 0


def test_cos_integral_k_limit(cfg):
    with pytest.raises(DomainError):
        oscillatory_cos_integral(quad.kernel_for("P_R", KernelContext(0.5, 1.0)), 5000, cfg)


@pytest.mark.parametrize("kid", ["mu_alpha", "mu_alpha_plus_one", "P_R"])
def test_periodized_symmetry(cfg, kid):
    ctx = KernelContext(0.5, 0.7)
    for t in (0.3, 1.0, 2.9):
        a = periodized_kernel(kid, ctx, t, cfg)
        b = periodized_kernel(kid, ctx, 2 * math.pi - t, cfg)
        assert a == pytest.approx(b, rel=1e-13)


def test_periodized_domain(cfg):
    with pytest.raises(DomainError):
        periodized_kernel("mu_alpha", KernelContext(0.5, 1.0), 0.0, cfg)
    with pytest.raises(DomainError):
        periodized_kernel("nope", KernelContext(0.5, 1.0), 1.0, cfg)


def test_periodized_lattice_sum(cfg):
    ctx = KernelContext(0.5, 1.0)
    v = periodized_kernel("mu_alpha", ctx, math.pi, cfg)
    # brute force over |m| <= 1e6, the remainder by the midpoint integral
    M = 10 ** 6
    m = np.arange(-M, M + 1, dtype=float)
    brute = math.fsum(np.abs(math.pi + 2 * math.pi * m) ** -1.5)
    rem = 2.0 * 2.0 * (2 * math.pi * (M + 1)) ** -0.5 / (2 * math.pi)
    assert v == pytest.approx(brute + rem, abs=1e-9)
    # and the Hurwitz zeta closed form
    exact = 2.0 * (2 * math.pi) ** -1.5 * zeta(1.5, 0.5)
    assert v == pytest.approx(exact, rel=1e-12)


def test_periodized_PR_bound(cfg):
    ctx = KernelContext(0.5, 0.6)
    j = np.arange(1, 200001)
    bound = eval_PR(ctx, 0.0) + np.sum(eval_PR(ctx, math.pi * j)) + 1e-6
    for t in np.linspace(0.1, 6.1, 13):
        assert periodized_kernel("P_R", ctx, t, cfg) <= bound


def test_periodization_consistency(cfg):
    ctx = KernelContext(0.5, 1.0)
    alpha = 0.5
    for k in (1, 2, 3):
        per = scipy_quad(lambda t: periodized_kernel("mu_alpha", ctx, t, cfg) * (1 - np.cos(k * t)),
                         0, 2 * math.pi, epsabs=1e-12, epsrel=1e-12, limit=400)[0]
        # int_R |t|^(-1-alpha)(1 - cos k t) dt = 2 k^alpha int_0^inf (1 - cos u) u^(-1-alpha) du
        g = lambda t: 2.0 * np.sin(0.5 * t) ** 2 / t ** (1 + alpha)
        tail = lambda T: T ** -alpha / alpha - float(quad.power_exp_tail(1.0, 1 + alpha, T)[0].real)
        line = 2.0 * k ** alpha * pv_symmetric_integral(g, cfg, 1 - alpha, tail=tail)
        assert per == pytest.approx(line, abs=1e-8)


def test_half_line_grid_weights():
    alpha = 0.5
    t, ws, wr = quad.half_line_grid(alpha, 0.25, 40)
    T = 0.25 * 40
    assert np.sum(wr) == pytest.approx(T, rel=1e-13)
    # t^(-1-alpha) * t integrates to T^(1-alpha)/(1-alpha)
    assert np.sum(ws * t) == pytest.approx(T ** (1 - alpha) / (1 - alpha), rel=1e-12)


def test_algebraic_kernel_line_integral():
    k = AlgebraicKernel(1.25, 2.0)
    ref = scipy_quad(lambda t: (t * t + 4) ** -1.25, -np.inf, np.inf, epsabs=1e-14)[0]
    assert k.line_integral() == pytest.approx(ref, rel=1e-11)
    with pytest.raises(DomainError):
        AlgebraicKernel(1.25).line_integral()
