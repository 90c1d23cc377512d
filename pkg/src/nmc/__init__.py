"""Nonlocal mean curvature of planar sets and periodic bands.

Main entry points:

- :mod:`nmc.kernels` special functions of the curvature integrands,
- :mod:`nmc.quad` principal-value, tail and oscillatory quadratures,
- :mod:`nmc.graph_nmc` curvature of graph bands and the rescaled operator,
- :mod:`nmc.spectrum` eigenvalues of the linearization and the critical width,
- :mod:`nmc.branch` continuation of the bifurcating constant-curvature bands,
- :mod:`nmc.setgeom` curvature computed directly from a set,
- :mod:`nmc.cli` the ``nmc`` command.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (BracketError, CrossingError, DegenerateEigenvalueError, DomainError, NMCError,
                     NonConvergenceError, NonIntegrableSingularityError, OffBoundaryError, PositivityError)
from .kernels import PLUS_INFINITY, KernelContext, eval_F, eval_F1, eval_F2, eval_F3
from .quad import DEFAULT as DEFAULT_QUAD, QuadratureConfig
from .series import CosineSeries, Increments, increments
from .graph_nmc import dphi_da, dphi_dlambda, dphi_dvarphi, nmc_of_graph, phi, straight_band_h
from .spectrum import Spectrum, compute_spectrum, lambda_k, mu_inf, solve_R
from .branch import Band, BranchPoint, continue_branch, newton_solve, reconstruct_band
from .setgeom import PlanarSet, nmc_boundary_form, nmc_of_set, tangential_derivative

__all__ = [
    "__version__", "NMCError", "DomainError", "PositivityError", "NonIntegrableSingularityError",
    "NonConvergenceError", "BracketError", "DegenerateEigenvalueError", "CrossingError", "OffBoundaryError",
    "KernelContext", "PLUS_INFINITY", "eval_F", "eval_F1", "eval_F2", "eval_F3", "QuadratureConfig",
    "DEFAULT_QUAD", "CosineSeries", "Increments", "increments", "nmc_of_graph", "straight_band_h", "phi",
    "dphi_dvarphi", "dphi_dlambda", "dphi_da", "Spectrum", "compute_spectrum", "lambda_k", "mu_inf",
    "solve_R", "BranchPoint", "Band", "newton_solve", "continue_branch", "reconstruct_band", "PlanarSet",
    "nmc_of_set", "nmc_boundary_form", "tangential_derivative",
]
