"""Numerical constructions and checks for biminimal curves and surfaces.

Curves satisfy ``k'' - k^3 + k G = lam k`` on a surface of Gaussian curvature
``G`` (with a torsion term in 3-dimensional space forms); hypersurfaces
satisfy ``Delta H = (|B|^2 - Ric(N) + lam) H``.  The submodules build the
catalogued examples and measure these residuals with finite differences.
"""
from . import catalog, conformal, curves, geometry, io, numerics, presets, surfaces, verify
from .catalog import build_catalog_surface, correspondence_check, hopf_map
from .conformal import RadialProfile, biharmonic_profile_residual, free_biminimal_check_radial
from .curves import (
    CurvatureProfile,
    fit_lambda_curve,
    frenet,
    integrate_reduced,
    reconstruct_plane_curve,
    reconstruct_space_curve,
    reconstruct_surface_curve,
    residual_planar,
    residual_space3,
)
from .errors import *  # noqa: F401,F403
from .geometry import AmbientSpace, CurveSamples, Kind
from .numerics import GridSpec
from .surfaces import (
    ImmersedSurface,
    biminimal_residual_spaceform,
    biminimal_residual_surface,
    lemma_mean_curvature,
    oneill_check,
    shape_data,
    strip_gauss,
)
from .verify import ResidualReport, convergence_study, fit_lambda_surface

__version__ = "0.1.0"
