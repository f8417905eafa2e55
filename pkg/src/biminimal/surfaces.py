"""Hypersurface geometry in 3-manifolds and the biminimal surface equation.

A surface is a sampled map ``psi(t, s)`` on a rectangular grid.  Everything
is computed from the samples with central differences and the ambient
Christoffel symbols: the unit normal, the second fundamental form ``B`` in a
Gram-Schmidt frame ``{e_1 ~ psi_t, e_2}``, the mean curvature ``H = tr(B)/2``,
``|B|^2`` and ``Ric(N)``.  The biminimal condition with multiplier ``lam`` is

    Delta H = (|B|^2 - Ric(N) + lam) H,

and in a space form of curvature ``c`` it becomes
``Delta H - 2H(2H^2 - G + lam/2) = 0`` with ``G`` the intrinsic curvature.

Preimage surfaces of a curve under a submersion carry a dilation profile
``Lambda(s)`` and the metric ``dt^2/Lambda^2 + ds^2``; for them the Laplacian
and Gauss curvature reduce to one-variable formulas in ``Lambda``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import NotSpaceForm, RankDeficient
from .geometry import AmbientSpace
from .numerics import GridSpec, central_diff

__all__ = [
    "StripSurface",
    "ImmersedSurface",
    "ShapeData",
    "shape_data",
    "induced_metric",
    "strip_laplacian",
    "laplace_beltrami",
    "surface_laplacian",
    "strip_gauss",
    "intrinsic_gauss",
    "biminimal_residual_surface",
    "biminimal_residual_spaceform",
    "lemma_mean_curvature",
    "oneill_check",
    "log_derivative",
]


@dataclass
class StripSurface:
    """Dilation ``Lambda(s)`` along the fibre and the base-curve curvature ``k_gamma(t)``."""

    Lambda: np.ndarray
    k_gamma: np.ndarray | None = None

    def __post_init__(self):
        self.Lambda = np.asarray(self.Lambda, dtype=float)
        if np.any(self.Lambda <= 0):
            raise ValueError("dilation must be positive")


@dataclass
class ImmersedSurface:
    """Samples ``psi[it, js, :]`` of a map into ``space`` over ``t_grid x s_grid``.

    ``orientation`` (+1 or -1) multiplies the cross-product normal.
    """

    space: AmbientSpace
    psi: np.ndarray
    t_grid: GridSpec
    s_grid: GridSpec
    orientation: int = 1
    strip: StripSurface | None = None
    provenance: dict = field(default_factory=dict)
    lambda_expected: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=float)
        if self.psi.shape != (self.t_grid.n, self.s_grid.n, self.space.ncoords):
            raise ValueError(f"psi has shape {self.psi.shape}, grids need "
                             f"{(self.t_grid.n, self.s_grid.n, self.space.ncoords)}")
        if self.space.dim != 3:
            raise ValueError("surfaces live in 3-dimensional spaces")
        self.space.check(self.psi)

    @property
    def shape(self):
        return self.psi.shape[:2]

    def with_orientation(self, sign: int) -> "ImmersedSurface":
        return ImmersedSurface(self.space, self.psi, self.t_grid, self.s_grid, int(sign), self.strip,
                               dict(self.provenance), self.lambda_expected)


@dataclass
class ShapeData:
    """Pointwise shape fields; NaN where a difference stencil leaves the grid."""

    N: np.ndarray
    B: np.ndarray
    H: np.ndarray
    B_norm2: np.ndarray
    ric_N: np.ndarray
    metric: np.ndarray
    frame: np.ndarray
    accuracy: int

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.H)


def _d(u, h, axis, order=1, accuracy=2):
    return central_diff(u, h, order=order, axis=axis, accuracy=accuracy)


def _mixed(u, ht, hs, accuracy=2):
    return _d(_d(u, ht, 0, accuracy=accuracy), hs, 1, accuracy=accuracy)


def induced_metric(surface: ImmersedSurface, accuracy: int = 2):
    """First derivatives of ``psi`` and the induced metric ``g_ab`` (shape ``(nt, ns, 2, 2)``)."""
    ht, hs = surface.t_grid.h, surface.s_grid.h
    p = surface.psi
    pt = _d(p, ht, 0, accuracy=accuracy)
    ps = _d(p, hs, 1, accuracy=accuracy)
    sp = surface.space
    g = np.empty(surface.shape + (2, 2))
    g[..., 0, 0] = geo.inner(sp, p, pt, pt)
    g[..., 0, 1] = g[..., 1, 0] = geo.inner(sp, p, pt, ps)
    g[..., 1, 1] = geo.inner(sp, p, ps, ps)
    return pt, ps, g


def shape_data(surface: ImmersedSurface, accuracy: int = 2, h_fd: float = geo.H_FD) -> ShapeData:
    """Normal, second fundamental form, ``H``, ``|B|^2`` and ``Ric(N)`` on the grid."""
    key = ("shape", accuracy, h_fd)
    if key in surface._cache:
        return surface._cache[key]
    sp = surface.space
    ht, hs = surface.t_grid.h, surface.s_grid.h
    p = surface.psi
    pt, ps, g = induced_metric(surface, accuracy)
    ptt = _d(p, ht, 0, order=2, accuracy=accuracy)
    pss = _d(p, hs, 1, order=2, accuracy=accuracy)
    pts = _mixed(p, ht, hs, accuracy)
    ok = np.all(np.isfinite(ptt) & np.isfinite(pss) & np.isfinite(pts), axis=-1)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    scale = g[..., 0, 0] * g[..., 1, 1]
    if np.any(ok & ~(det > 1e-12 * scale)):
        raise RankDeficient("tangent vectors psi_t, psi_s are dependent at some grid points")

    N = np.full(p.shape, np.nan)
    N[ok] = surface.orientation * geo.complete_normal(sp, p[ok], [pt[ok], ps[ok]])
    G = sp._christoffel(p)

    def second(a, b, ab):
        return geo.inner(sp, p, ab + np.einsum("...kij,...i,...j->...k", G, a, b), N)

    h_ab = np.empty(surface.shape + (2, 2))
    h_ab[..., 0, 0] = second(pt, pt, ptt)
    h_ab[..., 0, 1] = h_ab[..., 1, 0] = second(pt, ps, pts)
    h_ab[..., 1, 1] = second(ps, ps, pss)
    # Gram-Schmidt: e1 = A11 psi_t, e2 = A21 psi_t + A22 psi_s
    A = np.zeros(surface.shape + (2, 2))
    nt = np.sqrt(g[..., 0, 0])
    A[..., 0, 0] = 1 / nt
    proj = g[..., 0, 1] / g[..., 0, 0]
    n2 = np.sqrt(det / g[..., 0, 0])
    A[..., 1, 0] = -proj / n2
    A[..., 1, 1] = 1 / n2
    B = np.einsum("...ia,...ab,...jb->...ij", A, h_ab, A)
    H = 0.5 * (B[..., 0, 0] + B[..., 1, 1])
    B2 = np.sum(B**2, axis=(-1, -2))
    ric = np.full(surface.shape, np.nan)
    ric[ok] = geo.ricci_normal(sp, p[ok], N[ok], h=h_fd)
    out = ShapeData(N, B, H, B2, ric, g, A, accuracy)
    surface._cache[key] = out
    return out


def log_derivative(Lambda, h: float, accuracy: int = 2) -> np.ndarray:
    """``d/ds log(Lambda)`` by central differences."""
    return central_diff(np.log(np.asarray(Lambda, float)), h, accuracy=accuracy)


def strip_laplacian(Lambda, u, ht: float, hs: float, accuracy: int = 2) -> np.ndarray:
    """``Lambda^2 u_tt + u_ss - (log Lambda)' u_s`` for ``u[it, js]`` and ``Lambda[js]``.

    The gradient of ``log Lambda`` is the s-derivative, since ``Lambda`` is
    constant along the horizontal direction ``t``.
    """
    u = np.asarray(u, dtype=float)
    Lam = np.asarray(Lambda, dtype=float)
    dlog = log_derivative(Lam, hs, accuracy)
    utt = _d(u, ht, 0, order=2, accuracy=accuracy)
    uss = _d(u, hs, 1, order=2, accuracy=accuracy)
    us = _d(u, hs, 1, accuracy=accuracy)
    return Lam**2 * utt + uss - dlog * us


def _metric_derivatives(g, ht, hs, accuracy):
    dg = np.stack([_d(g, ht, 0, accuracy=accuracy), _d(g, hs, 1, accuracy=accuracy)], axis=-1)
    return dg  # dg[..., a, b, c] = d_c g_ab


def laplace_beltrami(g, u, ht: float, hs: float, accuracy: int = 2) -> np.ndarray:
    """``g^{ab} (u_ab - Gamma^c_ab u_c)`` from a sampled metric ``g[it, js, 2, 2]``."""
    g = np.asarray(g, dtype=float)
    dg = _metric_derivatives(g, ht, hs, accuracy)
    ok = np.all(np.isfinite(g), axis=(-1, -2))
    ginv = np.full_like(g, np.nan)
    ginv[ok] = np.linalg.inv(g[ok])
    first = np.einsum("...cd,...bda->...cab", ginv, dg)
    second = np.einsum("...cd,...adb->...cab", ginv, dg)
    third = np.einsum("...cd,...abd->...cab", ginv, dg)
    Gam = 0.5 * (first + second - third)
    du = np.stack([_d(u, ht, 0, accuracy=accuracy), _d(u, hs, 1, accuracy=accuracy)], axis=-1)
    ddu = np.empty(np.shape(u) + (2, 2))
    ddu[..., 0, 0] = _d(u, ht, 0, order=2, accuracy=accuracy)
    ddu[..., 1, 1] = _d(u, hs, 1, order=2, accuracy=accuracy)
    ddu[..., 0, 1] = ddu[..., 1, 0] = _mixed(u, ht, hs, accuracy)
    hess = ddu - np.einsum("...cab,...c->...ab", Gam, du)
    return np.einsum("...ab,...ab->...", ginv, hess)


def surface_laplacian(surface: ImmersedSurface, u, accuracy: int = 2, general: bool | None = None):
    """Induced Laplacian of a field; the strip formula is used when a dilation is attached."""
    ht, hs = surface.t_grid.h, surface.s_grid.h
    if general is None:
        general = surface.strip is None
    if not general:
        return strip_laplacian(surface.strip.Lambda, u, ht, hs, accuracy)
    _, _, g = induced_metric(surface, accuracy)
    return laplace_beltrami(g, u, ht, hs, accuracy)


def strip_gauss(Lambda, h: float, accuracy: int = 2) -> np.ndarray:
    """``Delta Lambda / Lambda - ((log Lambda)')^2`` with ``Delta Lambda = Lambda'' - (log Lambda)' Lambda'``."""
    Lam = np.asarray(Lambda, dtype=float)
    dlog = log_derivative(Lam, h, accuracy)
    d1 = central_diff(Lam, h, accuracy=accuracy)
    d2 = central_diff(Lam, h, order=2, accuracy=accuracy)
    lap = d2 - dlog * d1
    return lap / Lam - dlog**2


def intrinsic_gauss(surface: ImmersedSurface, accuracy: int = 2) -> np.ndarray:
    """Gaussian curvature of the induced metric alone (Brioschi's formula)."""
    ht, hs = surface.t_grid.h, surface.s_grid.h
    _, _, g = induced_metric(surface, accuracy)
    E, F, G = g[..., 0, 0], g[..., 0, 1], g[..., 1, 1]
    Et, Es = _d(E, ht, 0, accuracy=accuracy), _d(E, hs, 1, accuracy=accuracy)
    Ft, Fs = _d(F, ht, 0, accuracy=accuracy), _d(F, hs, 1, accuracy=accuracy)
    Gt, Gs = _d(G, ht, 0, accuracy=accuracy), _d(G, hs, 1, accuracy=accuracy)
    Ess = _d(E, hs, 1, order=2, accuracy=accuracy)
    Gtt = _d(G, ht, 0, order=2, accuracy=accuracy)
    Fts = _mixed(F, ht, hs, accuracy)
    M1 = np.stack([
        np.stack([-Ess / 2 + Fts - Gtt / 2, Et / 2, Ft - Es / 2], axis=-1),
        np.stack([Fs - Gt / 2, E, F], axis=-1),
        np.stack([Gs / 2, F, G], axis=-1),
    ], axis=-2)
    zero = np.zeros_like(E)
    M2 = np.stack([
        np.stack([zero, Es / 2, Gt / 2], axis=-1),
        np.stack([Es / 2, E, F], axis=-1),
        np.stack([Gt / 2, F, G], axis=-1),
    ], axis=-2)
    ok = np.all(np.isfinite(M1), axis=(-1, -2)) & np.all(np.isfinite(M2), axis=(-1, -2))
    K = np.full(E.shape, np.nan)
    K[ok] = (np.linalg.det(M1[ok]) - np.linalg.det(M2[ok])) / (E[ok] * G[ok] - F[ok] ** 2) ** 2
    return K


def biminimal_residual_surface(surface: ImmersedSurface, lam: float, accuracy: int = 2,
                               general: bool | None = None, shape: ShapeData | None = None) -> np.ndarray:
    """``Delta H - (|B|^2 - Ric(N) + lam) H`` (NaN outside the interior)."""
    sd = shape if shape is not None else shape_data(surface, accuracy)
    lap = surface_laplacian(surface, sd.H, accuracy, general)
    return lap - (sd.B_norm2 - sd.ric_N + lam) * sd.H


def biminimal_residual_spaceform(surface: ImmersedSurface, lam: float, accuracy: int = 2,
                                 general: bool | None = None, shape: ShapeData | None = None) -> np.ndarray:
    """``Delta H - 2H (2H^2 - G + lam/2)`` with ``G`` from the induced metric."""
    if surface.space.curvature is None:
        raise NotSpaceForm(f"{surface.space.name} has no constant curvature")
    sd = shape if shape is not None else shape_data(surface, accuracy)
    lap = surface_laplacian(surface, sd.H, accuracy, general)
    G = intrinsic_gauss(surface, accuracy)
    H = sd.H
    return lap - 2 * H * (2 * H**2 - G + lam / 2)


def lemma_mean_curvature(Lambda, k_gamma, n: int = 3):
    """Mean curvature ``Lambda k_gamma / (n - 1)`` of the preimage of a curve."""
    if n < 2:
        raise ValueError("n must be at least 2")
    Lam = np.asarray(Lambda, dtype=float)
    if np.any(Lam <= 0):
        raise ValueError("dilation must be positive")
    return Lam * np.asarray(k_gamma, dtype=float) / (n - 1)


def oneill_check(Lambda, h: float, c: float, G_N: float, accuracy: int = 2) -> np.ndarray:
    """``(c + ((log Lambda)')^2) / Lambda^2 - G_N`` per sample."""
    Lam = np.asarray(Lambda, dtype=float)
    if np.any(Lam <= 0):
        raise ValueError("dilation must be positive")
    dlog = log_derivative(Lam, h, accuracy)
    return (c + dlog**2) / Lam**2 - G_N
