"""Named curves and the verification suite behind ``verify --suite paper``."""
from __future__ import annotations

import math

import numpy as np

from . import catalog as ct
from . import conformal as cf
from . import curves as cv
from . import surfaces as sf
from .curves import CurvatureProfile
from .errors import IndeterminateMultiplier
from .numerics import GridSpec, rigid_align
from .verify import ResidualReport, convergence_study, fit_lambda_surface, summarize

__all__ = ["curve_preset", "CURVE_PRESETS", "example_suite", "spiral_alignment", "SURFACE_CASES"]


def _reduced(k0, dk0, beta, length, h, lam, c, base, alpha=0.0, name=""):
    g = GridSpec.from_step(0.0, length, h)
    p = cv.integrate_reduced(k0, dk0, alpha, beta, g)
    p.lam, p.c = lam, c
    p.meta.update(base=base, preset=name)
    return p


def curve_preset(name: str, h: float = 1e-3, **kw) -> CurvatureProfile:
    """Curvature profile of a named example.

    ``spiral``: ``k = sqrt(2)/s`` (free in the plane); ``sphere-parallel``:
    ``k = 1`` on S^2 (biharmonic); ``greatcircle``: ``k = 0``; the others
    integrate ``k'' = k^3 - beta k`` from ``k(0) = k0, k'(0) = 0`` so that the
    curve is biminimal for the stated multiplier on its base surface.
    """
    if name == "spiral":
        s0, s1 = kw.get("s0", 1.0), kw.get("s1", 3.0)
        g = GridSpec.from_step(s0, s1, h)
        return CurvatureProfile(g, cv.spiral_curvature(g.s), lam=0.0, c=0.0, meta={"base": "euclidean-plane", "preset": name})
    if name == "sphere-parallel":
        g = GridSpec.from_step(0.0, kw.get("length", 2 * math.pi / math.sqrt(2)), h)
        return CurvatureProfile(g, np.ones(g.n), lam=0.0, c=1.0, meta={"base": "sphere2", "preset": name})
    if name == "constant-k":
        k, G = float(kw.get("k", 1.0)), float(kw.get("G", 0.0))
        g = GridSpec.from_step(0.0, kw.get("length", 2.0), h)
        return CurvatureProfile(g, np.full(g.n, k), lam=G - k**2, c=G, meta={"base": "", "preset": name})
    if name == "greatcircle":
        g = GridSpec.from_step(0.0, kw.get("length", 2.0), h)
        return CurvatureProfile(g, np.zeros(g.n), c=0.0, meta={"base": "", "preset": name})
    if name == "envelope":
        s0, s1 = kw.get("s0", 1.0), kw.get("s1", 3.0)
        g = GridSpec.from_step(s0, s1, h)
        return CurvatureProfile(g, 1 / g.s, tau=1 / g.s, lam=0.0, meta={"base": "euclidean3", "preset": name})
    if name in CURVE_PRESETS:
        k0, beta, lam, c, base, length = CURVE_PRESETS[name]
        return _reduced(kw.get("k0", k0), 0.0, beta, kw.get("length", length), h, lam, c, base, name=name)
    raise KeyError(f"unknown curve preset {name!r}")


# name: (k0, beta, lam_curve, base curvature, base, length); beta = c - lam
CURVE_PRESETS = {
    "r2-shifted": (0.5, -1.0, 1.0, 0.0, "euclidean-plane", 1.2),  # k'' = k^3 + k
    "h2-free": (0.5, -1.0, 0.0, -1.0, "hyperbolic-plane", 1.2),  # k'' = k^3 + k
    "s2-free": (0.6, 1.0, 0.0, 1.0, "sphere2", 2.0),  # k'' = k^3 - k
    "s2half-free": (1.0, 4.0, 0.0, 4.0, "sphere2(r=0.5)", 1.5),  # k'' = k^3 - 4k
    "h2-constant": (0.5, -1.0 - (-1.25), -1.25, -1.0, "hyperbolic-plane", 1.2),  # k0^2 = -1 - lam
}


def spiral_alignment(s0=0.1, s1=10.0, h=1e-3):
    """Reconstructed spiral vs the closed form: ``(max distance after alignment, max |speed - 1|)``."""
    g = GridSpec.from_step(s0, s1, h)
    exact = cv.spiral_curve(g.s)
    phi0 = math.sqrt(2) * math.log(g.s[0])  # tangent angle of the closed form
    rec = cv.reconstruct_plane_curve(cv.spiral_curvature, g, init=(exact[0, 0], exact[0, 1], phi0))
    _, dist = rigid_align(rec.points, exact)
    speed = np.linalg.norm(cv.central_diff(exact, g.h, accuracy=4), axis=1)
    return dist, float(np.nanmax(np.abs(speed - 1)))


# kind, preset, surface lambda, s-grid, stride
SURFACE_CASES = [
    ("r3-cylinder", "spiral", 0.0, (-1.0, 1.0, 81), 10),
    ("r3-cone", "sphere-parallel", 0.0, (0.5, 2.0, 81), 10),
    ("h3-vertical", "spiral", -2.0, (-1.0, 1.0, 81), 10),
    ("h3-tube", "h2-free", -2.0, (-1.0, 1.0, 81), 10),
    ("s3-longitude", "s2-free", 2.0, (math.pi / 4, 3 * math.pi / 4, 81), 10),
    ("hopf", "s2half-free", -4.0, (0.0, 1.0, 81), 10),
    ("s2xr", "s2-free", 0.0, (-1.0, 1.0, 81), 10),
    ("h2xr", "h2-constant", -1.25, (-1.0, 1.0, 81), 10),
    ("heisenberg", "r2-shifted", 0.0, (-1.0, 1.0, 81), 10),
    ("sl2r", "h2-free", -1.0, (-1.0, 1.0, 81), 10),
]


def _surface_case(kind, preset, lam, sgrid, stride, tol=1e-3, accuracy=4):
    prof = curve_preset(preset)
    crep, srep = ct.correspondence_check(kind, prof, lam, GridSpec(*sgrid), stride, accuracy, tol)
    surf = ct.build_catalog_surface(kind, prof, GridSpec(*sgrid), stride)
    try:
        lf, se, _ = fit_lambda_surface(surf, accuracy)
        srep.lambda_fit, srep.lambda_stderr = lf, se
    except IndeterminateMultiplier:
        srep.flags.append("Minimal")
    srep.extra["curve_residual_max"] = crep.residual_max
    srep.extra["curve_lambda"] = crep.lambda_used
    srep.extra["lemma_error"] = ct.lemma_error(surf, accuracy)
    if crep.residual_max > tol:
        srep.flags.append("CurveResidual")
    srep.tolerance = tol
    srep.construction = f"{kind}/{preset}"
    return srep


def example_suite() -> list[ResidualReport]:
    """Every worked example as a residual report with its tolerance."""
    out = []
    # planar spiral
    g = GridSpec.from_step(0.5, 10.0, 1e-3)
    r = cv.residual_planar(cv.spiral_curvature(g.s), g.h)

    def spiral_err(h):
        gg = GridSpec.from_step(0.5, 10.0, h)
        return float(np.max(np.abs(cv.residual_planar(cv.spiral_curvature(gg.s), gg.h))))

    conv = convergence_study(spiral_err, [4e-3, 2e-3, 1e-3])
    out.append(summarize("spiral-curve", r, g.as_dict(), lambda_used=0.0, tolerance=1e-4,
                         convergence_slope=conv.slope, flags=conv.flags))
    dist, speed = spiral_alignment()
    out.append(ResidualReport("spiral-reconstruction", {"s_min": 0.1, "s_max": 10.0, "h": 1e-3},
                              dist, dist, tolerance=1e-5, extra={"closed_form_speed_error": speed}))
    # first integral along a bounded trajectory
    p = cv.integrate_reduced(1.1, 0.0, 1.0, 2.0, GridSpec.from_step(0.0, 10.0, 1e-4))
    out.append(ResidualReport("first-integral", p.grid.as_dict(), p.drift, p.drift, tolerance=1e-8,
                              extra={"A": p.A}))
    # parallel of latitude pi/4
    pp = curve_preset("sphere-parallel")
    lam, rms = cv.fit_lambda_curve(pp.k, pp.grid.h, G=1.0)
    out.append(summarize("sphere-parallel", cv.residual_planar(pp.k, pp.grid.h, G=1.0), pp.grid.as_dict(),
                         lambda_used=0.0, lambda_fit=lam, tolerance=1e-6))
    # conformal plane
    rr = np.linspace(0, 5, 501)
    out.append(summarize("enneper-profile", cf.biharmonic_profile_residual(cf.RadialProfile.analytic(1, 0, 1), rr),
                         {"r_min": 0.0, "r_max": 5.0, "n": 501}, tolerance=1e-9))
    for label, prof in (("ln(r^2+1)", cf.RadialProfile.analytic(1, 0, 1)), ("r", cf.RadialProfile.polynomial([0, 1]))):
        chk = cf.free_biminimal_check_radial(prof, GridSpec.from_step(0.2, 5.0, 1e-3), direction=(1.0, 1.0))
        out.append(summarize(f"radial-line f={label}", chk.normal, chk.grid.as_dict(), tolerance=1e-6,
                             extra={"tangential_error": chk.tangential_error}))
    # strip geometry
    gs = GridSpec.from_step(-2.0, 2.0, 1e-3)
    s = gs.s
    out.append(summarize("strip-gauss sech", sf.strip_gauss(1 / np.cosh(s), gs.h, 4) + 1, gs.as_dict(), tolerance=1e-6))
    out.append(summarize("strip-gauss exp", sf.strip_gauss(np.exp(s), gs.h, 4) + 1, gs.as_dict(), tolerance=1e-6))
    out.append(summarize("oneill H3->R2", sf.oneill_check(np.exp(s), gs.h, -1.0, 0.0, 4), gs.as_dict(), tolerance=1e-6))
    out.append(summarize("oneill H3->H2", sf.oneill_check(1 / np.cosh(s), gs.h, -1.0, -1.0, 4), gs.as_dict(), tolerance=1e-6))
    gt = GridSpec.from_step(0.3, 2.8, 1e-3)
    out.append(summarize("oneill S3->S2", sf.oneill_check(1 / np.sin(gt.s), gt.h, 1.0, 1.0, 4), gt.as_dict(), tolerance=1e-6))
    # surfaces
    for case in SURFACE_CASES:
        out.append(_surface_case(*case))
    env = ct.build_catalog_surface("r3-envelope", curve_preset("envelope"), GridSpec(-0.5, 0.5, 81), t_stride=10)
    sd = sf.shape_data(env, 4)
    res = sf.surface_laplacian(env, sd.H, 4) - 4 * sd.H**3
    out.append(summarize("r3-envelope", res, {"t": env.t_grid.as_dict(), "s": env.s_grid.as_dict()},
                         lambda_used=0.0, tolerance=1e-3, extra={"H_minus_k": ct.lemma_error(env, 4)}))
    return out
