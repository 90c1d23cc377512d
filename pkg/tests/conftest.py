from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nmc import spectrum
from nmc.kernels import KernelContext
from nmc.quad import DEFAULT

settings.register_profile("nmc", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nmc")


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT


@pytest.fixture(scope="session")
def ctx_half():
    """alpha = 0.5, R = 1."""
    return KernelContext(0.5, 1.0)


@pytest.fixture(scope="session")
def crit():
    """alpha = 0.5 at the critical half-width."""
    return spectrum.critical_context(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


TWO_PI = 2.0 * math.pi
