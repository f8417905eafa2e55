"""Preimage surfaces of curves under the submersions of the catalogued geometries.

Each construction maps a unit-speed base curve ``gamma(t)`` and a fibre
arclength ``s`` to ``psi(t, s)`` on the preimage ``pi^{-1}(gamma)``:

==============  ===================  =====================================  ==============
kind            base                 psi(t, s)                              Lambda(s)
==============  ===================  =====================================  ==============
r3-cylinder     R^2                  (x, y, s)                              1
r3-cone         S^2                  s gamma                                1/s
r3-envelope     k = tau curve in R^3 alpha(t) + s (T + B)                   (none)
h3-vertical     R^2                  (x, y, e^s)                            e^s
h3-tube         H^2 (x, r)           (x, r tanh s, r sech s)                sech s
s3-longitude    S^2                  (sin s gamma, cos s)                   1/sin s
hopf            S^2(1/2)             e^{is} lift(gamma)                     1
product         S^2 or H^2           (gamma, s)                             1
heisenberg      R^2                  (x, y, z_h + s),  z_h' = x y'          1
sl2r            H^2 (y, z)           (x_h + s, y, z),  x_h' = -y'/z         1
==============  ===================  =====================================  ==============

Warped constructions have a fixed surface multiplier ``2c`` (for a free
biminimal base curve); Riemannian submersions shift the multiplier, the
surface being biminimal for ``lam`` exactly when the curve is for
``lam + shift``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import curves as cv
from . import geometry as geo
from .curves import CurvatureProfile
from .errors import IndeterminateMultiplier, UnsupportedPair
from .geometry import CurveSamples, Kind
from .numerics import GridSpec, gradient
from .surfaces import ImmersedSurface, StripSurface, biminimal_residual_surface, shape_data
from .verify import ResidualReport, summarize

__all__ = [
    "KINDS",
    "KindInfo",
    "kind_info",
    "base_space",
    "projection",
    "hopf_map",
    "hopf_section",
    "hopf_lift",
    "build_catalog_surface",
    "correspondence_check",
    "lemma_error",
]


@dataclass(frozen=True)
class KindInfo:
    name: str
    ambient: str
    base: tuple
    shift: float | None  # lam_curve = lam_surface + shift
    fixed: float | None  # surface multiplier of the warped constructions
    default_s: tuple


KINDS = {
    "r3-cylinder": KindInfo("r3-cylinder", "euclidean3", ("euclidean-plane",), 0.0, None, (-1.0, 1.0)),
    "r3-cone": KindInfo("r3-cone", "euclidean3", ("sphere2",), None, 0.0, (0.5, 2.0)),
    "r3-envelope": KindInfo("r3-envelope", "euclidean3", ("euclidean3",), None, 0.0, (-0.5, 0.5)),
    "h3-vertical": KindInfo("h3-vertical", "hyperbolic3", ("euclidean-plane",), None, -2.0, (-1.0, 1.0)),
    "h3-tube": KindInfo("h3-tube", "hyperbolic3", ("hyperbolic-plane",), None, -2.0, (-1.0, 1.0)),
    "s3-longitude": KindInfo("s3-longitude", "sphere3", ("sphere2",), None, 2.0, (math.pi / 4, 3 * math.pi / 4)),
    "hopf": KindInfo("hopf", "sphere3", ("sphere2(r=0.5)",), 4.0, None, (0.0, 2 * math.pi)),
    "product": KindInfo("product", "s2xr|h2xr", ("sphere2", "hyperbolic-plane"), 0.0, None, (-1.0, 1.0)),
    "heisenberg": KindInfo("heisenberg", "heisenberg", ("euclidean-plane",), 1.0, None, (-1.0, 1.0)),
    "sl2r": KindInfo("sl2r", "sl2r", ("hyperbolic-plane",), 1.0, None, (-1.0, 1.0)),
}

_ALIASES = {"s2xr": "product", "h2xr": "product", "cylinder": "r3-cylinder", "cone": "r3-cone",
            "envelope": "r3-envelope"}


def kind_info(kind: str) -> KindInfo:
    key = _ALIASES.get(kind, kind)
    if key not in KINDS:
        raise UnsupportedPair(f"unknown construction {kind!r}; choose from {sorted(KINDS)}")
    return KINDS[key]


def base_space(kind: str, product_base: str = "sphere2") -> geo.AmbientSpace:
    info = kind_info(kind)
    if info.name == "product":
        return geo.sphere2() if product_base.startswith("s") else geo.hyperbolic_plane()
    if info.name == "hopf":
        return geo.sphere2(0.5)
    return {"euclidean-plane": geo.euclidean_plane, "sphere2": geo.sphere2,
            "hyperbolic-plane": geo.hyperbolic_plane, "euclidean3": geo.euclidean3}[info.base[0]]()


def base_curvature(space: geo.AmbientSpace) -> float:
    c = space.curvature
    if c is None:
        raise UnsupportedPair(f"{space.name} is not a base surface")
    return c


# -- Hopf fibration ----------------------------------------------------------
def hopf_map(p) -> np.ndarray:
    """``(z w-bar, (|z|^2 - |w|^2) / 2)`` as a point of S^2(1/2) in R^3."""
    p = np.asarray(p, dtype=float)
    z = p[..., 0] + 1j * p[..., 1]
    w = p[..., 2] + 1j * p[..., 3]
    q = z * np.conj(w)
    return np.stack([q.real, q.imag, (abs(z) ** 2 - abs(w) ** 2) / 2], axis=-1)


def hopf_section(q) -> np.ndarray:
    """A point of S^3 over ``q`` in S^2(1/2): ``z = sqrt(1/2 + q_3)`` real, ``w = conj(zeta)/z``."""
    q = np.asarray(q, dtype=float)
    zz = 0.5 + q[..., 2]
    if np.any(zz <= 1e-12):
        raise UnsupportedPair("the Hopf section is singular at the south pole of S^2(1/2)")
    z = np.sqrt(zz)
    w = (q[..., 0] - 1j * q[..., 1]) / z
    return np.stack([z, np.zeros_like(z), w.real, w.imag], axis=-1)


def _complex(p):
    return p[..., 0] + 1j * p[..., 1], p[..., 2] + 1j * p[..., 3]


def hopf_lift(curve: CurveSamples, order: int = 2) -> np.ndarray:
    """Horizontal lift ``e^{i theta(t)} sigma(t)`` of a curve on S^2(1/2).

    ``theta' = -Im<sigma', sigma>`` is integrated by the trapezoid rule
    (``order=2``) or by forward Euler (``order=1``, a first-order fixture).
    """
    sig = hopf_section(curve.points)
    h = curve.grid.h
    dsig = gradient(sig, h)
    z, w = _complex(sig)
    dz, dw = _complex(dsig)
    rate = -np.imag(dz * np.conj(z) + dw * np.conj(w))
    if order == 2:
        theta = cumulative_trapezoid(rate, dx=h, initial=0.0)
    elif order == 1:
        theta = np.concatenate([[0.0], np.cumsum(rate[:-1]) * h])
    else:
        raise ValueError("order must be 1 or 2")
    ph = np.exp(1j * theta)
    z, w = ph * z, ph * w
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def _hopf_fibre(lift, s):
    z, w = _complex(lift)
    e = np.exp(1j * s)[None, :]
    Z, W = z[:, None] * e, w[:, None] * e
    return np.stack([Z.real, Z.imag, W.real, W.imag], axis=-1)


# -- projections ---------------------------------------------------------------
def projection(kind: str, p) -> np.ndarray:
    """The submersion ``pi`` of a construction, on ambient coordinates."""
    p = np.asarray(p, dtype=float)
    name = kind_info(kind).name
    if name in ("r3-cylinder", "h3-vertical", "heisenberg"):
        return p[..., :2]
    if name == "r3-cone":
        return p / np.linalg.norm(p, axis=-1, keepdims=True)
    if name == "s3-longitude":
        return p[..., :3] / np.linalg.norm(p[..., :3], axis=-1, keepdims=True)
    if name == "h3-tube":
        return np.stack([p[..., 0], np.hypot(p[..., 1], p[..., 2])], axis=-1)
    if name == "hopf":
        return hopf_map(p)
    if name == "product":
        return p[..., :-1]
    if name == "sl2r":
        return p[..., 1:]
    raise UnsupportedPair(f"{kind} has no submersion")


# -- construction ------------------------------------------------------------
def _as_curve(gamma, base: geo.AmbientSpace, init=None):
    """Return ``(CurveSamples, k_gamma or None, profile or None)``."""
    if isinstance(gamma, CurveSamples):
        if gamma.space.kind is not base.kind or (base.kind is Kind.SPHERE2 and gamma.space.radius != base.radius):
            raise UnsupportedPair(f"curve lives in {gamma.space.name}, construction needs {base.name}")
        return gamma, None, None
    if isinstance(gamma, CurvatureProfile):
        g = gamma.grid
        if base.kind is Kind.EUCLIDEAN_PLANE:
            curve = cv.reconstruct_plane_curve(gamma.k, g, init=init or (0.0, 0.0, 0.0))
        elif base.kind in (Kind.SPHERE2, Kind.HYPERBOLIC_PLANE):
            curve = cv.reconstruct_surface_curve(gamma.k, base, g, init=init)
        else:
            raise UnsupportedPair(f"cannot reconstruct a planar profile in {base.name}")
        return curve, gamma.k, gamma
    raise TypeError("gamma must be CurveSamples or CurvatureProfile")


def _subsample(curve: CurveSamples, k, stride: int):
    if stride == 1:
        return curve, k
    g = curve.grid.subgrid(stride)
    pts = curve.points[::stride][: g.n]
    kk = None if k is None else np.asarray(k)[::stride][: g.n]
    return CurveSamples(curve.space, g, pts, curve.unit_speed), kk


def _envelope(gamma, s, stride):
    if isinstance(gamma, CurvatureProfile):
        if gamma.tau is None:
            raise UnsupportedPair("the envelope needs a space-curve profile with torsion")
        curve, fr = cv.reconstruct_space_curve(gamma.k, gamma.tau, gamma.grid, return_frame=True)
        k = gamma.k
    elif isinstance(gamma, CurveSamples) and gamma.space.kind is Kind.EUCLIDEAN3:
        F = cv.frenet(gamma)
        curve, fr, k = gamma, F.frames, F.k
    else:
        raise UnsupportedPair("the envelope needs a curve in euclidean3")
    curve, k = _subsample(curve, k, stride)
    fr = fr[::stride][: curve.grid.n]
    T, N, B = fr[:, 0], fr[:, 1], fr[:, 2]
    psi = curve.points[:, None, :] + s[None, :, None] * (T + B)[:, None, :]
    return curve, k, psi, N


def build_catalog_surface(kind: str, gamma, s_grid: GridSpec | None = None, t_stride: int = 1,
                          lift_order: int = 2, init=None, n_s: int = 201) -> ImmersedSurface:
    """Preimage surface of ``gamma`` (curve samples or a curvature profile).

    The returned surface carries its dilation (``surface.strip``), the base
    curvature ``k_gamma`` on the t-grid, the expected multiplier and, in
    ``provenance``, the construction tag, orientation and multiplier rule.
    """
    info = kind_info(kind)
    if s_grid is None:
        s_grid = GridSpec(*info.default_s, n_s)
    s = s_grid.s
    name = info.name
    if name == "r3-envelope":
        curve, k, psi, Nref = _envelope(gamma, s, t_stride)
        space = geo.euclidean3()
        nt = curve.grid.n
        surf = ImmersedSurface(space, psi, curve.grid, s_grid)
        sign = _orient(surf, Nref[nt // 2])
        prov = {"construction": name, "orientation": sign, "rule": "free",
                "normal": "principal normal of the curve"}
        surf = ImmersedSurface(space, psi, curve.grid, s_grid, sign, None, prov, 0.0)
        surf.provenance["k_curve"] = np.asarray(k, float)
        return surf

    if name == "product":
        if kind in ("s2xr", "h2xr"):
            bspace = geo.sphere2() if kind == "s2xr" else geo.hyperbolic_plane()
        elif isinstance(gamma, CurveSamples):
            bspace = gamma.space
        else:
            bspace = geo.sphere2() if gamma.meta.get("base", "sphere2").startswith("s") else geo.hyperbolic_plane()
        if bspace.kind not in (Kind.SPHERE2, Kind.HYPERBOLIC_PLANE) or bspace.radius != 1.0:
            raise UnsupportedPair(f"product cylinders need a curve in sphere2 or hyperbolic-plane, got {bspace.name}")
    else:
        bspace = base_space(name)
    curve, k, prof = _as_curve(gamma, bspace, init)
    curve, k = _subsample(curve, k, t_stride)
    F = cv.frenet(curve)
    if k is None:
        k = F.k
    k = np.asarray(k, dtype=float)
    P = curve.points
    nt, ns = curve.grid.n, s_grid.n
    one = np.ones(ns)

    if name in ("r3-cylinder", "h3-vertical"):
        space = geo.euclidean3() if name == "r3-cylinder" else geo.hyperbolic3()
        third = s if name == "r3-cylinder" else np.exp(s)
        psi = np.empty((nt, ns, 3))
        psi[..., 0] = P[:, None, 0]
        psi[..., 1] = P[:, None, 1]
        psi[..., 2] = third[None, :]
        Lam = one if name == "r3-cylinder" else np.exp(s)
    elif name == "r3-cone":
        if np.any(s <= 0):
            raise ValueError("cone fibre parameter must be positive")
        space = geo.euclidean3()
        psi = s[None, :, None] * P[:, None, :]
        Lam = 1 / s
    elif name == "h3-tube":
        space = geo.hyperbolic3()
        psi = np.empty((nt, ns, 3))
        psi[..., 0] = P[:, None, 0]
        psi[..., 1] = P[:, None, 1] * np.tanh(s)[None, :]
        psi[..., 2] = P[:, None, 1] / np.cosh(s)[None, :]
        Lam = 1 / np.cosh(s)
    elif name == "s3-longitude":
        if np.any((s <= 0) | (s >= math.pi)):
            raise ValueError("longitude parameter must lie in (0, pi)")
        space = geo.sphere3()
        psi = np.empty((nt, ns, 4))
        psi[..., :3] = np.sin(s)[None, :, None] * P[:, None, :]
        psi[..., 3] = np.cos(s)[None, :]
        Lam = 1 / np.sin(s)
    elif name == "hopf":
        space = geo.sphere3()
        psi = _hopf_fibre(hopf_lift(curve, lift_order), s)
        Lam = one
    elif name == "product":
        space = geo.s2xr() if bspace.kind is Kind.SPHERE2 else geo.h2xr()
        m = P.shape[1]
        psi = np.empty((nt, ns, m + 1))
        psi[..., :m] = P[:, None, :]
        psi[..., m] = s[None, :]
        Lam = one
    elif name == "heisenberg":
        space = geo.heisenberg()
        x, y = P[:, 0], P[:, 1]
        zh = cumulative_trapezoid(x * gradient(y, curve.grid.h), dx=curve.grid.h, initial=0.0)
        psi = np.empty((nt, ns, 3))
        psi[..., 0] = x[:, None]
        psi[..., 1] = y[:, None]
        psi[..., 2] = zh[:, None] + s[None, :]
        Lam = one
    elif name == "sl2r":
        space = geo.sl2r()
        y, z = P[:, 0], P[:, 1]
        xh = cumulative_trapezoid(-gradient(y, curve.grid.h) / z, dx=curve.grid.h, initial=0.0)
        psi = np.empty((nt, ns, 3))
        psi[..., 0] = xh[:, None] + s[None, :]
        psi[..., 1] = y[:, None]
        psi[..., 2] = z[:, None]
        Lam = one
    else:  # pragma: no cover
        raise UnsupportedPair(name)

    surf = ImmersedSurface(space, psi, curve.grid, s_grid)
    sign = _orient_projected(surf, name, curve, F.frames[:, 1])
    c = space.curvature
    bc = base_curvature(bspace)
    if info.fixed is not None:
        lam_exp, rule = info.fixed, f"fixed {info.fixed:g} for a free biminimal base curve"
    else:
        lam_exp, rule = None, f"lambda_curve = lambda_surface + {info.shift:g}"
        lam_c = prof.lam if prof is not None else None
        if lam_c is None and np.sum(k**2) > 1e-12:
            try:
                lam_c, _ = cv.fit_lambda_curve(k, curve.grid.h, G=bc)
            except IndeterminateMultiplier:
                lam_c = None
        if lam_c is not None:
            lam_exp = float(lam_c) - info.shift
    prov = {
        "construction": name,
        "space": space.name,
        "base": bspace.name,
        "base_curvature": bc,
        "ambient_curvature": c,
        "orientation": sign,
        "rule": rule,
        "shift": info.shift,
        "fixed": info.fixed,
        "lift_order": lift_order if name == "hopf" else None,
    }
    out = ImmersedSurface(space, psi, curve.grid, s_grid, sign, StripSurface(Lam, k), prov, lam_exp)
    out.provenance["base_curve"] = curve
    return out


def _center_normal(surf: ImmersedSurface):
    i, j = surf.t_grid.n // 2, surf.s_grid.n // 2
    ht, hs = surf.t_grid.h, surf.s_grid.h
    p = surf.psi
    pt = (p[i + 1, j] - p[i - 1, j]) / (2 * ht)
    ps = (p[i, j + 1] - p[i, j - 1]) / (2 * hs)
    return i, j, geo.complete_normal(surf.space, p[i, j], [pt, ps])


def _orient(surf: ImmersedSurface, ref) -> int:
    _, _, n = _center_normal(surf)
    return 1 if float(n @ np.asarray(ref)) >= 0 else -1


def _orient_projected(surf: ImmersedSurface, name: str, curve: CurveSamples, normals) -> int:
    """Sign making ``d pi(N)`` a positive multiple of the base curve's normal."""
    i, j, n = _center_normal(surf)
    p = surf.psi[i, j]
    eps = 1e-6
    dpi = (projection(name, p + eps * n) - projection(name, p - eps * n)) / (2 * eps)
    val = float(geo.inner(curve.space, curve.points[i], dpi, normals[i]))
    return 1 if val >= 0 else -1


def lemma_error(surface: ImmersedSurface, accuracy: int = 2) -> float:
    """``max |H - Lambda k_gamma / 2|`` over the valid grid."""
    from .surfaces import lemma_mean_curvature

    sd = shape_data(surface, accuracy)
    if surface.strip is not None:
        pred = lemma_mean_curvature(surface.strip.Lambda[None, :], surface.strip.k_gamma[:, None], 3)
    else:
        pred = np.broadcast_to(np.asarray(surface.provenance["k_curve"])[:, None], sd.H.shape)
    d = np.abs(sd.H - pred)
    return float(np.nanmax(d))


def correspondence_check(kind: str, gamma, lambda_surface: float, s_grid: GridSpec | None = None,
                         t_stride: int = 1, accuracy: int = 2, tol: float = 1e-3):
    """Curve residual at the shifted multiplier next to the surface residual at ``lambda_surface``.

    Returns ``(curve_report, surface_report)``.  For warped constructions the
    correspondence only exists at their fixed multiplier; at any other value
    both residuals are still reported and flagged ``NotPaired``.
    """
    info = kind_info(kind)
    if info.name == "r3-envelope":
        raise UnsupportedPair("the envelope has no submersion-side pairing")
    surf = build_catalog_surface(kind, gamma, s_grid, t_stride)
    curve = surf.provenance["base_curve"]
    bc = surf.provenance["base_curvature"]
    flags = []
    if info.fixed is not None:
        lam_c = 0.0
        if abs(lambda_surface - info.fixed) > 1e-12:
            flags.append("NotPaired")
    else:
        lam_c = lambda_surface + info.shift
    k = surf.strip.k_gamma
    rc = cv.residual_planar(k, curve.grid.h, G=bc, lam=lam_c)
    curve_rep = summarize(f"{info.name}:curve", rc, curve.grid.as_dict(), lambda_used=lam_c,
                          tolerance=tol, flags=list(flags))
    rs = biminimal_residual_surface(surf, lambda_surface, accuracy)
    surf_rep = summarize(f"{info.name}:surface", rs,
                         {"t": surf.t_grid.as_dict(), "s": surf.s_grid.as_dict()},
                         lambda_used=lambda_surface, tolerance=tol, flags=list(flags))
    return curve_rep, surf_rep
