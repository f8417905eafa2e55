"""Model geometries: coordinate metrics, Levi-Civita connections, curvature.

Every evaluator is vectorised over leading axes: a point array of shape
``(..., ncoords)`` yields metrics of shape ``(..., ncoords, ncoords)`` and
Christoffel symbols ``gamma[..., k, i, j]`` (upper index first).

Curvature is returned in the usual convention
``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``; the
biminimal formulas downstream are written so that ``ricci_normal`` of a space
form of curvature ``c`` in dimension 3 is ``2c``.

Spheres, and the spherical factor of S^2 x R, are kept as embedded spheres in
Euclidean space.  Their "Christoffel symbols" ``delta_ij x^k / r^2`` extend the
connection of the sphere to a torsion-free connection of the ambient space for
which the sphere is auto-parallel, so covariant derivatives and curvature of
tangent fields come out right with the same formulas as for charts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateCurve, NonUnitVector, PointOutsideChart
from .numerics import GridSpec

__all__ = [
    "Kind",
    "AmbientSpace",
    "TangentData",
    "CurveSamples",
    "euclidean_plane",
    "sphere2",
    "hyperbolic_plane",
    "euclidean3",
    "sphere3",
    "hyperbolic3",
    "heisenberg",
    "sl2r",
    "s2xr",
    "h2xr",
    "conformal_plane",
    "metric_at",
    "christoffel_at",
    "christoffel_fd",
    "riemann_at",
    "ricci_normal",
    "gaussian_curvature",
    "tangent_frame",
    "complete_normal",
    "inner",
    "norm",
    "covariant_along",
    "arclength_reparam",
]

H_FD = 1e-4


class Kind(str, Enum):
    EUCLIDEAN_PLANE = "euclidean-plane"
    SPHERE2 = "sphere2"
    HYPERBOLIC_PLANE = "hyperbolic-plane"
    EUCLIDEAN3 = "euclidean3"
    SPHERE3 = "sphere3"
    HYPERBOLIC3 = "hyperbolic3"
    HEISENBERG = "heisenberg"
    SL2R = "sl2r"
    S2XR = "s2xr"
    H2XR = "h2xr"
    CONFORMAL_PLANE = "conformal-plane"


_DIMS = {
    Kind.EUCLIDEAN_PLANE: (2, 2),
    Kind.SPHERE2: (2, 3),
    Kind.HYPERBOLIC_PLANE: (2, 2),
    Kind.EUCLIDEAN3: (3, 3),
    Kind.SPHERE3: (3, 4),
    Kind.HYPERBOLIC3: (3, 3),
    Kind.HEISENBERG: (3, 3),
    Kind.SL2R: (3, 3),
    Kind.S2XR: (3, 4),
    Kind.H2XR: (3, 3),
    Kind.CONFORMAL_PLANE: (2, 2),
}

# index of the coordinate that must stay positive in half-space type charts
_POSITIVE_COORD = {
    Kind.HYPERBOLIC_PLANE: 1,
    Kind.HYPERBOLIC3: 2,
    Kind.SL2R: 2,
    Kind.H2XR: 1,
}


@dataclass(frozen=True)
class AmbientSpace:
    """One of the catalogued model geometries.

    ``radius`` is used by the sphere models, ``profile`` (an object with
    callables ``f, df, d2f, d3f`` of the distance ``r``) by the conformal plane
    ``e^{2 f(r)} (dx^2 + dy^2)`` centred at ``center``.
    """

    kind: Kind
    radius: float = 1.0
    profile: Any = field(default=None, compare=False)
    center: tuple = (0.0, 0.0)

    @property
    def dim(self) -> int:
        return _DIMS[self.kind][0]

    @property
    def ncoords(self) -> int:
        return _DIMS[self.kind][1]

    @property
    def embedded(self) -> bool:
        return self.kind in (Kind.SPHERE2, Kind.SPHERE3, Kind.S2XR)

    @property
    def curvature(self) -> float | None:
        """Constant sectional curvature, or None when the space is not a space form."""
        k = self.kind
        if k in (Kind.EUCLIDEAN_PLANE, Kind.EUCLIDEAN3):
            return 0.0
        if k in (Kind.SPHERE2, Kind.SPHERE3):
            return 1.0 / self.radius**2
        if k in (Kind.HYPERBOLIC_PLANE, Kind.HYPERBOLIC3):
            return -1.0
        return None

    @property
    def name(self) -> str:
        if self.kind is Kind.SPHERE2 and self.radius != 1.0:
            return f"{self.kind.value}(r={self.radius:g})"
        return self.kind.value

    # -- chart ---------------------------------------------------------------
    def positive_ok(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        idx = _POSITIVE_COORD.get(self.kind)
        if idx is None:
            return np.ones(p.shape[:-1], dtype=bool)
        return p[..., idx] > 0

    def embedding_normal(self, p) -> np.ndarray | None:
        """Unit normal of the embedded sphere factor at ``p`` (None for charts)."""
        p = np.asarray(p, dtype=float)
        if self.kind in (Kind.SPHERE2, Kind.SPHERE3):
            return p / np.linalg.norm(p, axis=-1, keepdims=True)
        if self.kind is Kind.S2XR:
            q = np.zeros_like(p)
            q[..., :3] = p[..., :3]
            return q / np.linalg.norm(q, axis=-1, keepdims=True)
        return None

    def in_chart(self, p, tol: float = 1e-6) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.ncoords:
            raise PointOutsideChart(
                f"{self.name} points need {self.ncoords} coordinates, got {p.shape[-1]}"
            )
        ok = self.positive_ok(p) & np.all(np.isfinite(p), axis=-1)
        if self.kind in (Kind.SPHERE2, Kind.SPHERE3):
            ok &= np.abs(np.linalg.norm(p, axis=-1) - self.radius) <= tol * self.radius
        elif self.kind is Kind.S2XR:
            ok &= np.abs(np.linalg.norm(p[..., :3], axis=-1) - 1.0) <= tol
        return ok

    def check(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if not np.all(self.in_chart(p)):
            raise PointOutsideChart(f"point(s) outside the {self.name} chart")
        return p

    def project(self, p) -> np.ndarray:
        """Snap points onto the embedded sphere factor (identity for charts)."""
        p = np.array(p, dtype=float)
        if self.kind in (Kind.SPHERE2, Kind.SPHERE3):
            return self.radius * p / np.linalg.norm(p, axis=-1, keepdims=True)
        if self.kind is Kind.S2XR:
            p[..., :3] /= np.linalg.norm(p[..., :3], axis=-1, keepdims=True)
        return p

    # -- raw evaluators (no chart check) -------------------------------------
    def _metric(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        n = self.ncoords
        g = np.zeros(p.shape[:-1] + (n, n))
        k = self.kind
        eye = np.eye(n)
        if k in (Kind.EUCLIDEAN_PLANE, Kind.EUCLIDEAN3) or self.embedded:
            g[...] = eye
        elif k is Kind.HYPERBOLIC_PLANE:
            g[...] = eye / p[..., 1, None, None] ** 2
        elif k is Kind.HYPERBOLIC3:
            g[...] = eye / p[..., 2, None, None] ** 2
        elif k is Kind.H2XR:
            y2 = p[..., 1] ** 2
            g[..., 0, 0] = 1 / y2
            g[..., 1, 1] = 1 / y2
            g[..., 2, 2] = 1.0
        elif k is Kind.HEISENBERG:
            x = p[..., 0]
            g[..., 0, 0] = 1.0
            g[..., 1, 1] = 1 + x**2
            g[..., 1, 2] = g[..., 2, 1] = -x
            g[..., 2, 2] = 1.0
        elif k is Kind.SL2R:
            z = p[..., 2]
            g[..., 0, 0] = 1.0
            g[..., 0, 1] = g[..., 1, 0] = 1 / z
            g[..., 1, 1] = 2 / z**2
            g[..., 2, 2] = 1 / z**2
        elif k is Kind.CONFORMAL_PLANE:
            r = np.linalg.norm(p - np.asarray(self.center), axis=-1)
            g[...] = eye * np.exp(2 * self.profile.f(r))[..., None, None]
        return g

    def _christoffel(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        n = self.ncoords
        G = np.zeros(p.shape[:-1] + (n, n, n))
        k = self.kind
        if k in (Kind.EUCLIDEAN_PLANE, Kind.EUCLIDEAN3):
            return G
        if k in (Kind.SPHERE2, Kind.SPHERE3, Kind.S2XR):
            m = 3 if k is Kind.S2XR else n
            r2 = 1.0 if k is Kind.S2XR else self.radius**2
            for i in range(m):
                G[..., :m, i, i] = p[..., :m] / r2
            return G
        if k in (Kind.HYPERBOLIC_PLANE, Kind.H2XR):
            iy = 1.0 / p[..., 1]
            G[..., 0, 0, 1] = G[..., 0, 1, 0] = -iy
            G[..., 1, 0, 0] = iy
            G[..., 1, 1, 1] = -iy
            return G
        if k is Kind.HYPERBOLIC3:
            iz = 1.0 / p[..., 2]
            G[..., 0, 0, 2] = G[..., 0, 2, 0] = -iz
            G[..., 1, 1, 2] = G[..., 1, 2, 1] = -iz
            G[..., 2, 0, 0] = iz
            G[..., 2, 1, 1] = iz
            G[..., 2, 2, 2] = -iz
            return G
        if k is Kind.HEISENBERG:
            x = p[..., 0]
            G[..., 0, 1, 1] = -x
            G[..., 0, 1, 2] = G[..., 0, 2, 1] = 0.5
            G[..., 1, 0, 1] = G[..., 1, 1, 0] = x / 2
            G[..., 1, 0, 2] = G[..., 1, 2, 0] = -0.5
            G[..., 2, 0, 1] = G[..., 2, 1, 0] = (x**2 - 1) / 2
            G[..., 2, 0, 2] = G[..., 2, 2, 0] = -x / 2
            return G
        if k is Kind.SL2R:
            z = p[..., 2]
            G[..., 0, 0, 2] = G[..., 0, 2, 0] = 1 / (2 * z)
            G[..., 0, 1, 2] = G[..., 0, 2, 1] = 1 / z**2
            G[..., 1, 0, 2] = G[..., 1, 2, 0] = -0.5
            G[..., 1, 1, 2] = G[..., 1, 2, 1] = -3 / (2 * z)
            G[..., 2, 0, 1] = G[..., 2, 1, 0] = 0.5
            G[..., 2, 1, 1] = 2 / z
            G[..., 2, 2, 2] = -1 / z
            return G
        if k is Kind.CONFORMAL_PLANE:
            d = p - np.asarray(self.center)
            r = np.linalg.norm(d, axis=-1)
            safe = np.where(r > 1e-14, r, 1.0)
            df = np.where(r > 1e-14, self.profile.df(r) / safe, 0.0)
            grad = d * df[..., None]  # Euclidean gradient of f
            eye = np.eye(n)
            # Gamma^k_ij = delta_ik f_j + delta_jk f_i - delta_ij f_k
            G += np.einsum("ki,...j->...kij", eye, grad)
            G += np.einsum("kj,...i->...kij", eye, grad)
            G -= np.einsum("ij,...k->...kij", eye, grad)
            return G
        raise NotImplementedError(k)


# -- constructors -------------------------------------------------------------
def euclidean_plane() -> AmbientSpace:
    return AmbientSpace(Kind.EUCLIDEAN_PLANE)


def sphere2(radius: float = 1.0) -> AmbientSpace:
    return AmbientSpace(Kind.SPHERE2, radius=float(radius))


def hyperbolic_plane() -> AmbientSpace:
    """Upper half-plane y > 0 with metric (dx^2 + dy^2) / y^2."""
    return AmbientSpace(Kind.HYPERBOLIC_PLANE)


def euclidean3() -> AmbientSpace:
    return AmbientSpace(Kind.EUCLIDEAN3)


def sphere3() -> AmbientSpace:
    return AmbientSpace(Kind.SPHERE3)


def hyperbolic3() -> AmbientSpace:
    """Upper half-space z > 0 with metric (dx^2 + dy^2 + dz^2) / z^2."""
    return AmbientSpace(Kind.HYPERBOLIC3)


def heisenberg() -> AmbientSpace:
    """Heisenberg group with dx^2 + dy^2 + (dz - x dy)^2."""
    return AmbientSpace(Kind.HEISENBERG)


def sl2r() -> AmbientSpace:
    """Universal cover of SL(2,R) on z > 0 with (dx + dy/z)^2 + (dy^2 + dz^2)/z^2."""
    return AmbientSpace(Kind.SL2R)


def s2xr() -> AmbientSpace:
    """S^2 x R with points (x, y, z, w), x^2 + y^2 + z^2 = 1."""
    return AmbientSpace(Kind.S2XR)


def h2xr() -> AmbientSpace:
    """H^2 x R with coordinates (x, y, w), y > 0."""
    return AmbientSpace(Kind.H2XR)


def conformal_plane(profile, center=(0.0, 0.0)) -> AmbientSpace:
    return AmbientSpace(Kind.CONFORMAL_PLANE, profile=profile, center=tuple(map(float, center)))


# -- metric, connection -------------------------------------------------------
def metric_at(space: AmbientSpace, p) -> np.ndarray:
    return space._metric(space.check(p))


def christoffel_at(space: AmbientSpace, p) -> np.ndarray:
    """Closed-form Christoffel symbols ``gamma[..., k, i, j]``."""
    return space._christoffel(space.check(p))


def _partials(fun, space: AmbientSpace, p, h: float) -> np.ndarray:
    """Central differences of ``fun`` in each coordinate direction.

    Falls back to a second-order one-sided stencil wherever the backward step
    would cross a positivity boundary.  Result has the coordinate index first.
    """
    p = np.asarray(p, dtype=float)
    out = []
    for l in range(space.ncoords):
        e = np.zeros(space.ncoords)
        e[l] = h
        fp, fm = fun(p + e), fun(p - e)
        central = (fp - fm) / (2 * h)
        bad_m = ~space.positive_ok(p - e)
        if np.any(bad_m):
            fwd = (-3 * fun(p) + 4 * fp - fun(p + 2 * e)) / (2 * h)
            mask = bad_m.reshape(bad_m.shape + (1,) * (central.ndim - bad_m.ndim))
            central = np.where(mask, fwd, central)
        out.append(central)
    return np.stack(out, axis=0)


def christoffel_fd(space: AmbientSpace, p, h: float = H_FD) -> np.ndarray:
    """Christoffel symbols from central differences of the metric.

    Independent of the hand-coded symbols; only meaningful for coordinate
    charts (the embedded spheres carry a flat ambient metric).
    """
    if space.embedded:
        raise ValueError("finite-difference Christoffels need a coordinate chart")
    p = space.check(p)
    dg = _partials(space._metric, space, p, h)  # dg[l, ..., i, j] = d_l g_ij
    dg = np.moveaxis(dg, 0, -1)  # dg[..., i, j, l] = d_l g_ij
    ginv = np.linalg.inv(space._metric(p))
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    first = np.einsum("...kl,...jli->...kij", ginv, dg)
    second = np.einsum("...kl,...ilj->...kij", ginv, dg)
    third = np.einsum("...kl,...ijl->...kij", ginv, dg)
    return 0.5 * (first + second - third)


def riemann_at(space: AmbientSpace, p, h: float = H_FD) -> np.ndarray:
    """Riemann tensor ``R[..., l, k, i, j]`` with ``R(d_i, d_j) d_k = R^l_kij d_l``.

    Built from central differences of the closed-form Christoffel symbols.
    """
    p = space.check(p)
    G = space._christoffel(p)
    dG = _partials(space._christoffel, space, p, h)  # dG[m, ..., k, i, j]
    dG = np.moveaxis(dG, 0, -1)  # (..., l, j, k, i) -> d_i Gamma^l_jk at [..., l, j, k, i]
    # R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    R = np.einsum("...ljki->...lkij", dG) - np.einsum("...likj->...lkij", dG)
    R += np.einsum("...lim,...mjk->...lkij", G, G)
    R -= np.einsum("...ljm,...mik->...lkij", G, G)
    return R


def inner(space: AmbientSpace, p, u, v) -> np.ndarray:
    return np.einsum("...i,...ij,...j->...", u, space._metric(p), v)


def norm(space: AmbientSpace, p, u) -> np.ndarray:
    return np.sqrt(inner(space, p, u, u))


def tangent_frame(space: AmbientSpace, p) -> np.ndarray:
    """Oriented orthonormal basis of the tangent space, shape ``(..., ncoords, dim)``."""
    p = np.asarray(p, dtype=float)
    if not space.embedded:
        L = np.linalg.cholesky(space._metric(p))
        return np.swapaxes(np.linalg.inv(L), -1, -2)
    nu = space.embedding_normal(p)
    m = space.ncoords
    e0 = np.zeros(m)
    e0[0] = 1.0
    # Householder reflection sending e0 to +-nu; its other columns span nu-perp.
    s = np.where(nu[..., :1] >= 0, 1.0, -1.0)
    v = nu + s * e0
    Hh = np.eye(m) - 2 * np.einsum("...i,...j->...ij", v, v) / np.einsum("...i,...i->...", v, v)[..., None, None]
    E = Hh[..., :, 1:].copy()
    # orientation: det[nu, E] > 0
    det = np.linalg.det(np.concatenate([nu[..., :, None], E], axis=-1))
    E[..., :, 0] *= np.sign(det)[..., None]
    return E


def _frame_coeffs(space, p, E, v):
    return np.einsum("...ia,...ij,...j->...a", E, space._metric(p), v)


def complete_normal(space: AmbientSpace, p, vectors) -> np.ndarray:
    """Unit vector orthogonal to ``dim - 1`` tangent vectors, positively oriented."""
    p = np.asarray(p, dtype=float)
    E = tangent_frame(space, p)
    c = [_frame_coeffs(space, p, E, np.asarray(v, float)) for v in vectors]
    if space.dim == 2:
        (a,) = c
        n = np.stack([-a[..., 1], a[..., 0]], axis=-1)
    elif space.dim == 3:
        n = np.cross(c[0], c[1])
    else:
        raise ValueError("normal completion needs a 2- or 3-dimensional space")
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    return np.einsum("...ia,...a->...i", E, n)


def covariant_along(space: AmbientSpace, p, velocity, field_vals, field_deriv) -> np.ndarray:
    """``nabla_{velocity} V = dV/dt + Gamma(velocity, V)`` along a curve."""
    G = space._christoffel(p)
    return field_deriv + np.einsum("...kij,...i,...j->...k", G, velocity, field_vals)


def ricci_normal(space: AmbientSpace, p, N, h: float = H_FD) -> np.ndarray:
    """Ricci curvature ``Ric(N, N)`` of a unit vector, summed over an orthonormal frame."""
    p = space.check(p)
    N = np.asarray(N, dtype=float)
    nn = norm(space, p, N)
    if not np.all(np.abs(nn - 1) <= 1e-8):
        raise NonUnitVector(f"|N| deviates from 1 by {np.nanmax(np.abs(nn - 1)):.3g}")
    nu = space.embedding_normal(p)
    if nu is not None and not np.all(np.abs(np.einsum("...i,...i->...", nu, N)) <= 1e-8):
        raise NonUnitVector("N is not tangent to the embedded sphere")
    R = riemann_at(space, p, h)
    g = space._metric(p)
    E = tangent_frame(space, p)
    # sum_a g(R(E_a, N) N, E_a)
    RN = np.einsum("...lkij,...ia,...j,...k->...la", R, E, N, N)
    return np.einsum("...la,...lm,...ma->...", RN, g, E)


def gaussian_curvature(space: AmbientSpace, p, h: float = H_FD) -> np.ndarray:
    if space.dim != 2:
        raise ValueError("Gaussian curvature is defined for 2-dimensional spaces")
    p = space.check(p)
    R = riemann_at(space, p, h)
    E = tangent_frame(space, p)
    e1, e2 = E[..., :, 0], E[..., :, 1]
    v = np.einsum("...lkij,...i,...j,...k->...l", R, e1, e2, e2)
    return inner(space, p, v, e1)


@dataclass(frozen=True)
class TangentData:
    base: np.ndarray
    vector: np.ndarray

    def norm(self, space: AmbientSpace) -> float:
        return float(norm(space, self.base, self.vector))

    def normalized(self, space: AmbientSpace) -> "TangentData":
        return TangentData(self.base, self.vector / self.norm(space))


@dataclass
class CurveSamples:
    """Curve sampled on a uniform grid in its parameter (arclength if ``unit_speed``)."""

    space: AmbientSpace
    grid: GridSpec
    points: np.ndarray
    unit_speed: bool = True

    @property
    def s(self) -> np.ndarray:
        return self.grid.s

    def speed(self) -> np.ndarray:
        from .numerics import gradient

        d = gradient(self.points, self.grid.h)
        return norm(self.space, self.points, d)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def arclength_reparam(samples, space: AmbientSpace, n: int | None = None) -> CurveSamples:
    """Resample a curve uniformly in metric arclength.

    The samples are interpolated by a cubic spline in cumulative chord length,
    metric speed is integrated by Gauss-Legendre quadrature, and arclength is
    inverted by Newton iteration.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or len(pts) < 5:
        raise DegenerateCurve("need at least 5 sample points")
    space.check(pts)
    chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(chord <= 1e-14 * max(1.0, float(np.max(np.abs(pts))))):
        raise DegenerateCurve("consecutive duplicate sample points")
    u = np.concatenate([[0.0], np.cumsum(chord)])
    spl = CubicSpline(u, pts, axis=0)
    dspl = spl.derivative()

    def speed(uu):
        q = spl(uu)
        d = dspl(uu)
        return np.sqrt(np.einsum("...i,...ij,...j->...", d, space._metric(q), d))

    def partial_length(a, b):
        mid, half = (a + b) / 2, (b - a) / 2
        nodes = mid[..., None] + half[..., None] * _GL_X
        return half * np.sum(_GL_W * speed(nodes), axis=-1)

    seg = partial_length(u[:-1], u[1:])
    S = np.concatenate([[0.0], np.cumsum(seg)])
    n_out = len(pts) if n is None else int(n)
    target = np.linspace(0.0, S[-1], n_out)
    idx = np.clip(np.searchsorted(S, target, side="right") - 1, 0, len(seg) - 1)
    a = u[idx]
    uu = a + (target - S[idx]) / seg[idx] * (u[idx + 1] - a)
    for _ in range(8):
        F = S[idx] + partial_length(a, uu) - target
        uu = np.clip(uu - F / speed(uu), u[idx], u[idx + 1])
    out = space.project(spl(uu))
    out[0], out[-1] = pts[0], pts[-1]
    return CurveSamples(space, GridSpec(0.0, float(S[-1]), n_out), out, unit_speed=True)
