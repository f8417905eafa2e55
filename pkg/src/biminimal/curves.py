"""Frenet apparatus, curve reconstruction, and the biminimal curve equations.

A unit-speed curve with curvature ``k`` and torsion ``tau`` in a 3-dimensional
space form of curvature ``c`` is biminimal for the multiplier ``lam`` when

    k'' - k^3 - k tau^2 + k c - lam k = 0,      (k^2 tau)' = 0.

With ``alpha = k^2 tau`` and ``beta = c - lam`` this collapses to the single
equation ``k'' = k^3 + alpha^2 / k^3 - beta k``, which has the first integral
``A = (k')^2 - k^4/2 + alpha^2/k^2 + beta k^2``.  Curves on surfaces are the
case ``tau = 0`` with ``c`` replaced by the Gaussian curvature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import geometry as geo
from .errors import (
    ChartExit,
    CurvatureUnderflow,
    DegenerateFrame,
    IndeterminateMultiplier,
    NonpositiveCurvature,
)
from .geometry import AmbientSpace, CurveSamples, Kind
from .numerics import GridSpec, central_diff, gradient, rk4, second_gradient

__all__ = [
    "K_FLOOR",
    "K_CEILING",
    "CurveSamples",
    "CurvatureProfile",
    "FrenetApparatus",
    "frenet",
    "reconstruct_plane_curve",
    "reconstruct_surface_curve",
    "reconstruct_space_curve",
    "interior",
    "residual_planar",
    "residual_space3",
    "reduced_rhs",
    "integrate_reduced",
    "u_polynomial",
    "fit_lambda_curve",
    "spiral_curvature",
    "spiral_curve",
]

K_FLOOR = 1e-8
K_CEILING = 1e6


@dataclass
class CurvatureProfile:
    """Curvature (and optionally torsion) sampled on a uniform arclength grid.

    ``alpha = k^2 tau`` and ``beta = c - lam`` are the constants of the reduced
    equation; ``A`` is the value of its first integral at the first sample.
    Trajectories produced by :func:`integrate_reduced` also carry ``dk``, the
    per-sample first integral and a ``halt_reason`` when integration stopped early.
    """

    grid: GridSpec
    k: np.ndarray
    tau: np.ndarray | None = None
    lam: float | None = None
    c: float = 0.0
    alpha: float = 0.0
    beta: float | None = None
    A: float | None = None
    dk: np.ndarray | None = None
    first_integral: np.ndarray | None = None
    halt_reason: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        if self.tau is not None:
            self.tau = np.asarray(self.tau, dtype=float)
            if np.any(self.k <= 0):
                raise NonpositiveCurvature("curvature must be positive where torsion is defined")
        if self.beta is None and self.lam is not None:
            self.beta = self.c - self.lam
        if self.lam is None and self.beta is not None:
            self.lam = self.c - self.beta

    @property
    def s(self) -> np.ndarray:
        return self.grid.s[: len(self.k)]

    @property
    def drift(self) -> float | None:
        if self.first_integral is None:
            return None
        return float(np.max(np.abs(self.first_integral - self.first_integral[0])))

    def classify(self, tol: float = 1e-8) -> str:
        """'geodesic' (k = 0), 'constant' (k' = 0: biharmonic when free) or 'general'."""
        if np.max(np.abs(self.k)) <= tol:
            return "geodesic"
        dk = self.dk if self.dk is not None else gradient(self.k, self.grid.h)
        if np.max(np.abs(dk)) <= tol * max(1.0, np.max(np.abs(self.k))):
            return "constant"
        return "general"

    @property
    def is_biharmonic_type(self) -> bool:
        return self.classify() in ("geodesic", "constant")


@dataclass
class FrenetApparatus:
    """Frames ``frames[n, m, ncoords]`` (B_1..B_m) and curvatures ``[n, m-1]``."""

    frames: np.ndarray
    curvatures: np.ndarray
    degenerate: np.ndarray

    @property
    def k(self) -> np.ndarray:
        return self.curvatures[:, 0]

    @property
    def tau(self) -> np.ndarray:
        return self.curvatures[:, 1]

    @property
    def T(self) -> np.ndarray:
        return self.frames[:, 0]


def frenet(curve: CurveSamples, k_floor: float = K_FLOOR, strict: bool = False) -> FrenetApparatus:
    """Frenet frame of a unit-speed sampled curve, using the ambient connection.

    In dimension 2 the normal completes the tangent to a positive basis and the
    curvature is signed.  In dimension 3 ``k >= 0``; where ``k < k_floor`` the
    normal and binormal are undefined, masked as degenerate and set to NaN.
    """
    space, h = curve.space, curve.grid.h
    p = curve.points
    d1 = gradient(p, h)
    d2 = second_gradient(p, h)
    speed = geo.norm(space, p, d1)
    T = d1 / speed[:, None]
    acc = geo.covariant_along(space, p, d1, d1, d2)
    acc = acc - geo.inner(space, p, acc, T)[:, None] * T
    m = space.dim
    if m == 2:
        N = geo.complete_normal(space, p, [T])
        k = geo.inner(space, p, acc, N)
        degenerate = np.abs(k) < k_floor
        if strict and np.any(degenerate):
            raise DegenerateFrame("curvature below floor")
        return FrenetApparatus(np.stack([T, N], axis=1), k[:, None], degenerate)
    if m != 3:
        raise ValueError("Frenet frames are implemented for dimension 2 and 3")
    k = geo.norm(space, p, acc)
    degenerate = k < k_floor
    if strict and np.any(degenerate):
        raise DegenerateFrame(f"k < {k_floor} at {int(degenerate.sum())} samples")
    with np.errstate(invalid="ignore", divide="ignore"):
        N = acc / k[:, None]
    N[degenerate] = np.nan
    B = geo.complete_normal(space, p, [T, N])
    dN = geo.covariant_along(space, p, T, N, gradient(N, h))
    tau = geo.inner(space, p, dN, B)
    k = np.where(degenerate, 0.0, k)
    return FrenetApparatus(np.stack([T, N, B], axis=1), np.stack([k, tau], axis=1), degenerate)


def _as_function(prof, grid: GridSpec):
    if callable(prof):
        return prof
    vals = np.asarray(prof, dtype=float)
    if vals.ndim == 0:
        return lambda s: float(vals)
    if len(vals) != grid.n:
        raise ValueError("profile samples must match the grid")
    return CubicSpline(grid.s, vals)


def reconstruct_plane_curve(k, grid: GridSpec, init=(0.0, 0.0, 0.0)) -> CurveSamples:
    """Integrate ``theta' = k, (x, y)' = (cos theta, sin theta)`` by RK4.

    ``k`` is a callable, a constant, or samples on ``grid``; ``init`` is
    ``(x0, y0, theta0)``.
    """
    kf = _as_function(k, grid)

    def rhs(s, y):
        return np.array([math.cos(y[2]), math.sin(y[2]), kf(s)])

    sol = rk4(rhs, np.asarray(init, float), grid.s)
    return CurveSamples(geo.euclidean_plane(), grid, sol[:, :2].copy())


def _sphere_project(r):
    def project(y):
        p, T = y[:3], y[3:]
        p = r * p / np.linalg.norm(p)
        u = p / r
        T = T - (T @ u) * u
        return np.concatenate([p, T / np.linalg.norm(T)])

    return project


def reconstruct_surface_curve(k, space: AmbientSpace, grid: GridSpec, init=None) -> CurveSamples:
    """Unit-speed curve of prescribed geodesic curvature on S^2(r) or H^2.

    On the sphere the frame equations ``p' = T, T' = k N - p / r^2`` are
    integrated in the embedding with ``N = (p / r) x T`` and the state is
    renormalised after every step; ``init = (p0, T0)``, default starting at
    ``(r, 0, 0)`` heading along ``+y``.

    In the half-plane the tangent angle ``theta`` of the Euclidean direction
    obeys ``theta' = k - cos(theta)`` with ``(x, y)' = y (cos theta, sin theta)``;
    ``init = (x0, y0, theta0)`` with default ``(0, 1, 0)``.
    """
    kf = _as_function(k, grid)
    if space.kind is Kind.SPHERE2:
        r = space.radius
        if init is None:
            init = (np.array([r, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
        p0, T0 = (np.asarray(v, float) for v in init)

        def rhs(s, y):
            p, T = y[:3], y[3:]
            N = np.cross(p / r, T)
            return np.concatenate([T, kf(s) * N - p / r**2])

        sol = rk4(rhs, np.concatenate([p0, T0]), grid.s, project=_sphere_project(r))
        return CurveSamples(space, grid, sol[:, :3].copy())
    if space.kind is Kind.HYPERBOLIC_PLANE:
        if init is None:
            init = (0.0, 1.0, 0.0)

        def rhs(s, y):
            if y[1] <= 0:
                raise ChartExit(f"curve reached the boundary y <= 0 near s={s:.6g}")
            return np.array([y[1] * math.cos(y[2]), y[1] * math.sin(y[2]), kf(s) - math.cos(y[2])])

        sol = rk4(rhs, np.asarray(init, float), grid.s)
        if np.any(sol[:, 1] <= 0):
            raise ChartExit("curve reached the boundary y <= 0")
        return CurveSamples(space, grid, sol[:, :2].copy())
    raise ValueError(f"surface reconstruction supports sphere2 and hyperbolic-plane, not {space.name}")


def _frame_project(y):
    T, N = y[3:6], y[6:9]
    T = T / np.linalg.norm(T)
    N = N - (N @ T) * T
    N = N / np.linalg.norm(N)
    return np.concatenate([y[:3], T, N, np.cross(T, N)])


def reconstruct_space_curve(k, tau, grid: GridSpec, init=None, return_frame: bool = False):
    """Integrate the Euclidean Frenet equations for prescribed ``k > 0`` and ``tau``.

    ``init = (p0, T0, N0)``; the binormal is ``T0 x N0``.  With ``return_frame``
    the integrated frames ``[n, 3, 3]`` (rows T, N, B) are returned as well.
    """
    kf, tf = _as_function(k, grid), _as_function(tau, grid)
    kmin = np.min([kf(s) for s in grid.s])
    if kmin <= 0:
        raise NonpositiveCurvature("space-curve reconstruction needs k > 0")
    if init is None:
        init = (np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    p0, T0, N0 = (np.asarray(v, float) for v in init)

    def rhs(s, y):
        T, N, B = y[3:6], y[6:9], y[9:12]
        ks, ts = kf(s), tf(s)
        return np.concatenate([T, ks * N, -ks * T + ts * B, -ts * N])

    y0 = _frame_project(np.concatenate([p0, T0, N0, np.zeros(3)]))
    sol = rk4(rhs, y0, grid.s, project=_frame_project)
    curve = CurveSamples(geo.euclidean3(), grid, sol[:, :3].copy())
    if return_frame:
        return curve, sol[:, 3:].reshape(-1, 3, 3)
    return curve


def interior(a):
    """Drop the two samples at each end, where second differences are not taken."""
    return np.asarray(a)[2:-2]


def _k2(k, h):
    return interior(central_diff(k, h, order=2))


def residual_planar(k, h: float, G=0.0, lam: float = 0.0) -> np.ndarray:
    """``k'' - k^3 + k G - lam k`` on the interior samples.

    ``G`` (Gaussian curvature of the surface) may be a constant or per-sample.
    """
    k = np.asarray(k, dtype=float)
    G = np.broadcast_to(np.asarray(G, dtype=float), k.shape)
    ki, Gi = interior(k), interior(G)
    return _k2(k, h) - ki**3 + ki * Gi - lam * ki


def residual_space3(k, tau, h: float, c: float = 0.0, lam: float = 0.0, k_floor: float = K_FLOOR):
    """Residuals ``(k'' - k^3 - k tau^2 + k c - lam k, (k^2 tau)')`` on interior samples."""
    k = np.asarray(k, dtype=float)
    tau = np.broadcast_to(np.asarray(tau, dtype=float), k.shape)
    if np.any((tau != 0) & (k <= k_floor)):
        raise NonpositiveCurvature("torsion is defined only where k > k_floor")
    ki, ti = interior(k), interior(tau)
    r1 = _k2(k, h) - ki**3 - ki * ti**2 + ki * c - lam * ki
    r2 = interior(central_diff(k**2 * tau, h))
    return r1, r2


def reduced_rhs(k: float, alpha: float, beta: float, k_floor: float = K_FLOOR) -> float:
    """Value of ``k''`` prescribed by the reduced equation: ``k^3 + alpha^2/k^3 - beta k``."""
    if alpha != 0 and abs(k) <= k_floor:
        raise CurvatureUnderflow(f"|k|={abs(k):.3g} <= k_floor, alpha^2/k^3 is singular")
    if alpha == 0:
        return k**3 - beta * k
    return k**3 + alpha**2 / k**3 - beta * k


def first_integral(k, dk, alpha, beta):
    k = np.asarray(k, dtype=float)
    extra = alpha**2 / k**2 if alpha != 0 else 0.0
    return dk**2 - k**4 / 2 + extra + beta * k**2


def integrate_reduced(
    k0: float,
    dk0: float,
    alpha: float,
    beta: float,
    grid: GridSpec,
    k_floor: float = K_FLOOR,
    k_ceiling: float = K_CEILING,
) -> CurvatureProfile:
    """Fixed-step RK4 for ``k'' = reduced_rhs(k)`` on ``grid``.

    Integration stops at the first sample where ``|k|`` falls to ``k_floor``
    (only when ``alpha != 0``; the equation is regular at ``k = 0`` otherwise)
    or exceeds ``k_ceiling``; the partial trajectory is returned with
    ``halt_reason`` set to ``"CurvatureUnderflow"`` or ``"Blowup"``.
    """
    if alpha != 0 and abs(k0) <= k_floor:
        raise CurvatureUnderflow("initial curvature below k_floor")
    a2, b, h = float(alpha) ** 2, float(beta), grid.h
    guard = alpha != 0

    if guard:
        def f(k):
            return k * k * k + a2 / (k * k * k) - b * k
    else:
        def f(k):
            return k * k * k - b * k

    ks, dks = [float(k0)], [float(dk0)]
    k, v = float(k0), float(dk0)
    halt = None
    for _ in range(grid.n - 1):
        try:
            a1, b1 = v, f(k)
            a2_, b2 = v + 0.5 * h * b1, f(k + 0.5 * h * a1)
            a3, b3 = v + 0.5 * h * b2, f(k + 0.5 * h * a2_)
            a4, b4 = v + h * b3, f(k + h * a3)
        except (ZeroDivisionError, OverflowError):
            halt = "CurvatureUnderflow" if guard and abs(k) < 1 else "Blowup"
            break
        k_new = k + h / 6 * (a1 + 2 * a2_ + 2 * a3 + a4)
        v_new = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        if not (math.isfinite(k_new) and math.isfinite(v_new)) or abs(k_new) > k_ceiling:
            halt = "Blowup"
            break
        if guard and abs(k_new) <= k_floor:
            halt = "CurvatureUnderflow"
            break
        k, v = k_new, v_new
        ks.append(k)
        dks.append(v)
    k_arr, dk_arr = np.array(ks), np.array(dks)
    fi = first_integral(k_arr, dk_arr, alpha, beta)
    n = len(k_arr)
    g = grid if n == grid.n else GridSpec(grid.s_min, grid.s_min + (max(n, 5) - 1) * h, max(n, 5))
    return CurvatureProfile(
        grid=g,
        k=k_arr,
        alpha=float(alpha),
        beta=float(beta),
        A=float(fi[0]),
        dk=dk_arr,
        first_integral=fi,
        halt_reason=halt,
    )


def u_polynomial(alpha: float, beta: float, A: float) -> np.ndarray:
    """Coefficients (degree 3 down to 0) of ``P(u) = 2u^3 - 4 beta u^2 + 4 A u - 4 alpha^2``.

    On solutions, ``u = k^2`` satisfies ``(u')^2 = P(u)``.
    """
    return np.array([2.0, -4.0 * beta, 4.0 * A, -4.0 * alpha**2])


def fit_lambda_curve(k, h: float, tau=None, G=0.0):
    """Least-squares multiplier for the curve equation; returns ``(lam, rms)``.

    ``G`` is the Gaussian curvature for curves on surfaces or the constant
    curvature ``c`` for space curves.
    """
    k = np.asarray(k, dtype=float)
    ki = interior(k)
    if np.sum(ki**2) < 1e-12:
        raise IndeterminateMultiplier("curve is a geodesic: every multiplier works")
    if tau is None:
        q = residual_planar(k, h, G=G, lam=0.0)
    else:
        q, _ = residual_space3(k, tau, h, c=G, lam=0.0)
    lam = float(np.sum(q * ki) / np.sum(ki**2))
    rms = float(np.sqrt(np.mean((q - lam * ki) ** 2)))
    return lam, rms


def spiral_curvature(s):
    """Curvature ``sqrt(2)/s`` of the free biminimal logarithmic spiral."""
    return math.sqrt(2) / np.asarray(s, dtype=float)


def spiral_curve(s) -> np.ndarray:
    """Closed-form unit-speed logarithmic spiral with curvature ``sqrt(2)/s``."""
    s = np.asarray(s, dtype=float)
    phi = math.sqrt(2) * np.log(s)
    c, si = np.cos(phi), np.sin(phi)
    r2 = math.sqrt(2)
    return np.stack([s / 3 * (c + r2 * si), s / 3 * (-r2 * c + si)], axis=-1)
