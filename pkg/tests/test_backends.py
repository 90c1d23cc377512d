"""The numba and numpy kernels must agree to rounding."""

from __future__ import annotations

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from nmc import _backend
from nmc.graph_nmc import dphi_dvarphi, nmc_of_graph, phi
from nmc.kernels import KernelContext
from nmc.series import CosineSeries
from nmc.setgeom import PlanarSet, nmc_of_set, tangential_derivative

CTX = KernelContext(0.5, 1.0)
pytestmark = pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")


def both(monkeypatch, fn):
    out = []
    for flag in (True, False):
        monkeypatch.setattr(_backend, "USE_NUMBA", flag)
        out.append(fn())
    return out


def test_selector(monkeypatch):
    assert _backend.kernels("numpy").__name__.endswith("_np")
    assert _backend.kernels("numba").__name__.endswith("_nb")
    with pytest.raises(ValueError):
        _backend.kernels("fortran")
    monkeypatch.setattr(_backend, "USE_NUMBA", False)
    assert _backend.active() == "numpy"


def test_graph_kernel(monkeypatch, cfg):
    u = CosineSeries([1.0, 0.1, -0.03])
    s = np.linspace(0.0, math.pi, 5)
    a, b = both(monkeypatch, lambda: nmc_of_graph(CTX, u, s, cfg))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)


def test_phi_kernel(monkeypatch, crit, cfg):
    v = CosineSeries([0.0, 0.0, 0.2, -0.05])
    s = np.array([0.0, 0.7, 2.0])
    a, b = both(monkeypatch, lambda: phi(crit, 0.03, 1.1, v, s, cfg))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)
    w = CosineSeries([0.1, 0.0, 0.0, 1.0])
    a, b = both(monkeypatch, lambda: dphi_dvarphi(crit, 0.03, 1.1, v, w, s, cfg))
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-11)


def test_ray_kernel_ellipse(monkeypatch, cfg):
    E = PlanarSet.ellipse(2.0, 1.0)
    x, _ = E.boundary_param(0.4)
    T = E.boundary_tangent(0.4)
    a, b = both(monkeypatch, lambda: nmc_of_set(CTX, E, x, cfg))
    assert a == pytest.approx(b, rel=1e-11)
    a, b = both(monkeypatch, lambda: tangential_derivative(CTX, E, x, T, cfg))
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_ray_kernel_band():
    # whole band integrals are slow on the numpy path; compare the ray sums
    coef = np.array([0.6, 0.05, 0.02])
    s = 1.0
    x2 = float(coef @ np.cos(np.arange(3) * s))
    du = float(-(coef * np.arange(3)) @ np.sin(np.arange(3) * s))
    T = np.array([1.0, du]) / math.hypot(1.0, du)
    n = np.array([T[1], -T[0]])
    betas = np.concatenate([np.geomspace(1e-12, 1e-3, 6), np.linspace(0.01, math.pi - 0.01, 30)])
    for mode in (0, 1):
        for beta in betas:
            args = (3, np.array([0.6]), coef, 1.0, s, x2, T[0], T[1], n[0], n[1], math.cos(beta),
                    math.sin(beta), 0.5, mode, 5.4, 0.67, math.inf, 6.7e-13, 0.013, 64)
            a = _backend.kernels("numba").pair_value(*args)
            b = _backend.kernels("numpy").pair_value(*args)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_env_flag_subprocess():
    code = ("from nmc import _backend, nmc_of_graph, KernelContext, CosineSeries;"
            "print(_backend.active());"
            "print(repr(float(nmc_of_graph(KernelContext(0.5, 1.0), CosineSeries([1.0, 0.1]), 0.3))))")
    env = dict(os.environ, NMC_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
    name, value = res.stdout.split()
    assert name == "numpy"
    ref = nmc_of_graph(CTX, CosineSeries([1.0, 0.1]), 0.3)
    assert float(value) == pytest.approx(ref, rel=1e-12)
