from __future__ import annotations

import math

import numpy as np
import pytest

from nmc import setgeom
from nmc.errors import CrossingError, DomainError, OffBoundaryError
from nmc.graph_nmc import nmc_of_graph, straight_band_h
from nmc.kernels import KernelContext
from nmc.series import CosineSeries
from nmc.setgeom import PlanarSet, nmc_boundary_form, nmc_of_set, tangential_derivative

CTX = KernelContext(0.5, 1.0)


def _pt(E, th):
    return E.boundary_param(th)[0]


SHAPES = [PlanarSet.disc(1.3, (0.2, -0.4)), PlanarSet.ellipse(2.0, 1.0),
          PlanarSet.graph_band(CosineSeries([1.0, 0.2, 0.05]))]


@pytest.mark.parametrize("E", SHAPES, ids=["disc", "ellipse", "band"])
def test_boundary_param_consistency(E):
    h = 1e-6
    for th in (0.3, 1.1, 2.5, 4.0):
        p, n = E.boundary_param(th)
        tang = (E.boundary_param(th + h)[0] - E.boundary_param(th - h)[0]) / (2 * h)
        assert abs(tang @ n) / np.linalg.norm(tang) < 1e-8
        assert np.linalg.norm(tang) == pytest.approx(E.arc_speed(th), rel=1e-8)
        assert E.boundary_tangent(th) @ tang > 0
        # outward: a small step along n leaves the set, a step against n enters it
        assert E.indicator(*(p + 1e-6 * n)) == -1 and E.indicator(*(p - 1e-6 * n)) == 1


def test_indicator_values():
    D = PlanarSet.disc(1.0)
    v = D.indicator(np.array([0.0, 2.0, 0.5]), np.array([0.0, 0.0, 0.5]))
    assert list(v) == [1, -1, 1]
    B = PlanarSet.straight_band(0.5)
    assert B.indicator(3.0, 0.4) == 1 and B.indicator(3.0, -0.6) == -1


def test_constructor_guards():
    with pytest.raises(DomainError):
        PlanarSet.disc(0.0)
    with pytest.raises(DomainError):
        PlanarSet.ellipse(1.0, -1.0)
    with pytest.raises(DomainError):
        PlanarSet.straight_band(0.0)
    with pytest.raises(DomainError):
        PlanarSet.graph_band(CosineSeries([0.1, 0.3]))


def test_off_boundary(cfg):
    with pytest.raises(OffBoundaryError):
        nmc_of_set(CTX, PlanarSet.disc(1.0), (0.5, 0.0), cfg)
    with pytest.raises(OffBoundaryError):
        nmc_of_set(CTX, PlanarSet.straight_band(1.0), (0.0, 0.9), cfg)
    with pytest.raises(OffBoundaryError):
        nmc_boundary_form(CTX, PlanarSet.ellipse(2.0, 1.0), (1.0, 1.0), cfg)


def test_crossing_budget(cfg, monkeypatch):
    u = CosineSeries([1.0, 0.3], freq=30.0)
    E = PlanarSet.graph_band(u)
    with pytest.raises(CrossingError):
        nmc_of_set(CTX, E, (0.0, u(0.0)), cfg)
    monkeypatch.setattr(setgeom, "MAX_CROSSINGS", 0)
    with pytest.raises(CrossingError):
        nmc_of_set(CTX, PlanarSet.disc(1.0), (1.0, 0.0), cfg)


def test_disc_constant(cfg):
    D = PlanarSet.disc(1.0)
    v = [nmc_of_set(CTX, D, _pt(D, th), cfg) for th in np.linspace(0, 2 * math.pi, 6, endpoint=False)]
    assert (max(v) - min(v)) / v[0] < 1e-8
    assert v[0] > 0


@pytest.mark.parametrize("s", [0.5, 2.0])
def test_dilation(cfg, s):
    for E, Es in ((PlanarSet.disc(1.0), PlanarSet.disc(s)), (PlanarSet.ellipse(1.5, 1.0), PlanarSet.ellipse(1.5 * s, s))):
        for th in (0.0, 0.9):
            x = _pt(E, th)
            assert nmc_of_set(CTX, Es, s * x, cfg) == pytest.approx(s ** -0.5 * nmc_of_set(CTX, E, x, cfg), rel=1e-4)


def test_straight_band(cfg):
    for R in (0.5, 1.0, 2.0):
        E = PlanarSet.straight_band(R)
        ref = straight_band_h(CTX.with_R(R), cfg)
        assert nmc_of_set(CTX, E, (0.3, R), cfg) == pytest.approx(ref, rel=1e-5)
        assert nmc_of_set(CTX, E, (0.3, -R), cfg) == pytest.approx(ref, rel=1e-5)


def test_boundary_form_disc(cfg):
    D = PlanarSet.disc(1.0)
    vals = [nmc_boundary_form(CTX, D, _pt(D, th), cfg) for th in (0.0, 1.0, 2.0, 4.0)]
    assert (max(vals) - min(vals)) / vals[0] < 1e-4
    assert vals[0] == pytest.approx(nmc_of_set(CTX, D, (1.0, 0.0), cfg), rel=1e-4)


def test_boundary_form_ellipse(cfg):
    E = PlanarSet.ellipse(2.0, 1.0)
    a = [nmc_boundary_form(CTX, E, p, cfg) for p in ((2.0, 0.0), (0.0, 1.0))]
    b = [nmc_of_set(CTX, E, p, cfg) for p in ((2.0, 0.0), (0.0, 1.0))]
    assert abs(a[0] - a[1]) / abs(a[0]) > 1e-2
    for x, y in zip(a, b):
        assert x == pytest.approx(y, rel=1e-4)


def test_boundary_form_bands_not_offered(cfg):
    with pytest.raises(DomainError):
        nmc_boundary_form(CTX, PlanarSet.straight_band(1.0), (0.0, 1.0), cfg)


def test_tangential_disc(cfg):
    D = PlanarSet.disc(1.0)
    for th in (0.2, 2.0):
        assert abs(tangential_derivative(CTX, D, _pt(D, th), D.boundary_tangent(th), cfg)) < 1e-5


def test_tangential_ellipse(cfg):
    E = PlanarSet.ellipse(2.0, 1.0)
    th, h = 0.7, 1e-4
    fd = (nmc_of_set(CTX, E, _pt(E, th + h), cfg) - nmc_of_set(CTX, E, _pt(E, th - h), cfg)) / (2 * h)
    fd /= E.arc_speed(th)
    v = E.boundary_tangent(th)
    d = tangential_derivative(CTX, E, _pt(E, th), v, cfg)
    assert d == pytest.approx(fd, rel=1e-3)
    assert tangential_derivative(CTX, E, _pt(E, th), -v, cfg) == pytest.approx(-d, rel=1e-12)


def test_tangential_graph_band(cfg):
    u = CosineSeries([1.0, 0.05])
    E = PlanarSet.graph_band(u)
    s, h = 0.5 * math.pi, 1e-4
    fd = (nmc_of_graph(CTX, u, s + h, cfg) - nmc_of_graph(CTX, u, s - h, cfg)) / (2 * h)
    fd /= math.hypot(1.0, u.derivative(s))
    d = tangential_derivative(CTX, E, (s, u(s)), E.boundary_tangent(s), cfg)
    assert d == pytest.approx(fd, rel=1e-3)


def test_tangential_near_inflection(cfg):
    # nearly tangent directions dominate here; Richardson FD as reference
    u = CosineSeries([0.6, 0.05])
    E = PlanarSet.graph_band(u)
    s = 1.6

    def fd(h):
        return (nmc_of_graph(CTX, u, s + h, cfg) - nmc_of_graph(CTX, u, s - h, cfg)) / (2 * h)

    ref = (4 * fd(5e-4) - fd(1e-3)) / 3 / math.hypot(1.0, u.derivative(s))
    d = tangential_derivative(CTX, E, (s, u(s)), E.boundary_tangent(s), cfg)
    assert d == pytest.approx(ref, rel=1e-7)


def test_tangential_guards(cfg):
    D = PlanarSet.disc(1.0)
    with pytest.raises(DomainError):
        tangential_derivative(CTX, D, (1.0, 0.0), (1.0, 0.0), cfg)
    with pytest.raises(DomainError):
        tangential_derivative(CTX, D, (1.0, 0.0), (0.0, 2.0), cfg)


def test_ellipse_rigidity(cfg):
    E = PlanarSet.ellipse(1.5, 1.0)
    v = [nmc_of_set(CTX, E, _pt(E, th), cfg) for th in np.linspace(0, 2 * math.pi, 16, endpoint=False)]
    assert (max(v) - min(v)) / np.mean(v) > 100 * 1e-4


def test_graph_band_vs_graph(cfg):
    u = CosineSeries([0.6, 0.05, 0.02])
    E = PlanarSet.graph_band(u)
    for s in (0.0, 1.0, 2.0):
        g = nmc_of_graph(CTX, u, s, cfg)
        assert nmc_of_set(CTX, E, (s, u(s)), cfg) == pytest.approx(g, rel=1e-5)
        assert nmc_of_set(CTX, E, (s, -u(s)), cfg) == pytest.approx(g, rel=1e-5)
