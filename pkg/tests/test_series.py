from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nmc.series import CosineSeries, increments

coeff_lists = st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=7)


def test_basic_evaluation():
    u = CosineSeries([1.0, 0.5, -0.25])
    s = np.linspace(-3, 3, 7)
    assert np.allclose(u(s), 1 + 0.5 * np.cos(s) - 0.25 * np.cos(2 * s), atol=1e-15)
    assert u.derivative(0.7) == pytest.approx(-0.5 * math.sin(0.7) + 0.5 * math.sin(1.4), abs=1e-15)
    assert isinstance(u(0.3), float)


def test_immutable_and_validated():
    u = CosineSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        u.coeffs[0] = 5.0
    with pytest.raises(ValueError):
        CosineSeries([np.nan])
    with pytest.raises(ValueError):
        CosineSeries([1.0], freq=0.0)


def test_algebra_and_projections():
    u = CosineSeries([1.0, 2.0, 3.0])
    v = CosineSeries.basis(4, scale=2.0)
    w = u + v
    assert w.K == 4 and np.allclose(w.coeffs, [1, 2, 3, 0, 2])
    assert np.allclose((u - u).coeffs, 0)
    assert np.allclose((2 * u).coeffs, [2, 4, 6])
    assert u.project_V1().c1 == 2.0 and u.project_V2().c1 == 0.0
    assert u.project_V2().in_V2() and not u.in_V2()
    assert np.allclose((u.project_V1() + u.project_V2()).coeffs, u.coeffs)
    assert CosineSeries.constant(2.0).is_positive()
    assert not CosineSeries([1.0, 0.6, 0.5]).is_positive()


@given(coeff_lists, st.floats(-10, 10))
def test_even_and_periodic(c, s):
    u = CosineSeries(c)
    assert u(s) == pytest.approx(u(-s), abs=1e-12)
    assert u(s) == pytest.approx(u(s + 2 * math.pi), abs=1e-12)
    assert abs(u(s)) <= u.sup_bound() + 1e-12


@given(coeff_lists, st.floats(-4, 4), st.floats(0.01, 6))
def test_increment_identities_and_bounds(c, s, t):
    u = CosineSeries(c)
    a = increments(u, s, t)
    b = increments(u, s, -t)
    assert a.delta_plus == pytest.approx(b.delta_minus, abs=1e-12)
    assert a.delta_zero == pytest.approx(u(s) + u(s - t), abs=1e-12)
    # Lipschitz-grade bounds with norms taken from the coefficients
    assert abs(a.delta_minus) + abs(a.delta_plus) <= 2 * u.c1_norm() + 1e-12
    assert abs(a.delta_minus + a.delta_plus) <= 2 * u.lipschitz_norm() * abs(t) + 1e-12


def test_increments_at_zero():
    with pytest.raises(ValueError):
        increments(CosineSeries([1.0]), 0.0, 0.0)
