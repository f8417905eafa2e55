import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from biminimal import curves as cv
from biminimal import geometry as geo
from biminimal.curves import CurvatureProfile
from biminimal.errors import CurvatureUnderflow, IndeterminateMultiplier, NonpositiveCurvature
from biminimal.numerics import GridSpec, loglog_slope, rigid_align


def helix(a, b, s):
    w = math.hypot(a, b)
    u = s / w
    return np.stack([a * np.cos(u), a * np.sin(u), b * u], axis=1)


def test_frenet_helix():
    a, b = 1.0, 0.5
    g = GridSpec.from_step(0.0, 6.0, 1e-3)
    F = cv.frenet(geo.CurveSamples(geo.euclidean3(), g, helix(a, b, g.s)))
    w2 = a * a + b * b
    assert np.max(np.abs(cv.interior(F.k) - a / w2)) < 3e-6
    assert np.max(np.abs(cv.interior(F.tau) - b / w2)) < 3e-6


def test_space_curve_reconstruction_helix():
    a, b = 1.0, 0.5
    w2 = a * a + b * b
    g = GridSpec.from_step(0.0, 6.0, 1e-2)
    c = cv.reconstruct_space_curve(a / w2, b / w2, g)
    _, dist = rigid_align(c.points, helix(a, b, g.s))
    assert dist < 1e-6


def test_plane_circle_and_frame_return():
    g = GridSpec.from_step(0.0, 2 * math.pi, 1e-2)
    c = cv.reconstruct_plane_curve(1.0, g)
    # unit circle centred at (0, 1)
    assert np.max(np.abs(np.linalg.norm(c.points - [0, 1], axis=1) - 1)) < 1e-9
    curve, fr = cv.reconstruct_space_curve(1.0, 0.2, g, return_frame=True)
    assert fr.shape == (g.n, 3, 3)
    assert np.allclose(np.einsum("nij,nkj->nik", fr, fr), np.eye(3), atol=1e-12)


def test_round_trip_second_order():
    # curvature of the reconstructed curve, measured by finite differences, converges at order 2
    errs, hs = [], [4e-2, 2e-2, 1e-2]
    for h in hs:
        g = GridSpec.from_step(0.0, 3.0, h)
        kf = lambda s: 1 + 0.5 * np.sin(s)  # noqa: E731
        F = cv.frenet(cv.reconstruct_plane_curve(kf, g))
        errs.append(np.max(np.abs(cv.interior(F.k) - cv.interior(kf(g.s)))))
    assert loglog_slope(hs, errs) == pytest.approx(2.0, abs=0.3)


def test_sphere_parallel_radius():
    g = GridSpec.from_step(0.0, 2 * math.pi / math.sqrt(2), 1e-3)
    c = cv.reconstruct_surface_curve(1.0, geo.sphere2(), g)
    pts = c.points
    # plane of the circle from the smallest singular direction; radius from its offset
    n = np.linalg.svd(pts - pts.mean(axis=0))[2][-1]
    d = pts @ n
    assert np.ptp(d) < 1e-9
    assert np.max(np.abs(np.sqrt(1 - d**2) - 1 / math.sqrt(2))) < 1e-6
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) < 1e-12


def test_horocycle_in_half_plane():
    g = GridSpec.from_step(0.0, 2.0, 1e-3)
    c = cv.reconstruct_surface_curve(1.0, geo.hyperbolic_plane(), g)
    assert np.max(np.abs(c.points[:, 1] - 1)) < 1e-12
    F = cv.frenet(c)
    assert np.max(np.abs(cv.interior(F.k) - 1)) < 1e-6


def test_spiral_closed_form_is_unit_speed():
    g = GridSpec.from_step(0.5, 5.0, 1e-3)
    F = cv.frenet(geo.CurveSamples(geo.euclidean_plane(), g, cv.spiral_curve(g.s)))
    assert np.max(np.abs(cv.interior(F.k) - cv.interior(cv.spiral_curvature(g.s)))) < 1e-4


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
def test_space3_reduces_to_planar(k0, c, lam):
    g = GridSpec(0.0, 1.0, 101)
    k = k0 + 0.3 * np.sin(3 * g.s)
    r1, r2 = cv.residual_space3(k, 0.0, g.h, c=c, lam=lam)
    assert np.allclose(r1, cv.residual_planar(k, g.h, G=c, lam=lam), atol=1e-12)
    assert np.all(r2 == 0)


@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0))
def test_constant_curvature_multiplier(k, G):
    g = GridSpec(0.0, 1.0, 51)
    lam = G - k * k
    assert np.max(np.abs(cv.residual_planar(np.full(g.n, k), g.h, G=G, lam=lam))) < 1e-10
    fit, _ = cv.fit_lambda_curve(np.full(g.n, k), g.h, G=G)
    assert fit == pytest.approx(lam, abs=1e-10)


@given(st.floats(0.5, 2.0), st.floats(0.2, 0.8))
def test_scaling_covariance(a, k0):
    # K(s) = a k(a s) solves the reduced equation with beta a^2 (lam = c - beta, c = 0)
    beta = 1.0
    g = GridSpec.from_step(0.0, 2.0, 1e-3)
    sol = cv.integrate_reduced(k0, 0.0, 0.0, beta, g)
    gs = GridSpec.from_step(0.0, 2.0 / a, 1e-3 / a)
    K = a * sol.k[: gs.n]
    r = cv.residual_planar(K, gs.h, G=0.0, lam=-beta * a * a)
    assert np.max(np.abs(r)) < 1e-4 * a**3


bounded = st.tuples(
    st.floats(-0.5, 0.5),  # alpha
    st.floats(0.8, 2.0),  # beta
    st.floats(0.6, 1.0),  # k0
    st.floats(-0.2, 0.2),  # dk0
)


@given(bounded)
def test_first_integral_conserved(params):
    alpha, beta, k0, dk0 = params
    p = cv.integrate_reduced(k0, dk0, alpha, beta, GridSpec.from_step(0.0, 4.0, 2e-4))
    # bounded trajectories only: |k| stays away from 0 and from blowup
    assume(p.halt_reason is None and 0.25 < np.min(np.abs(p.k)) and np.max(np.abs(p.k)) < 3.0)
    assert p.drift < 1e-8
    u, du = p.k**2, 2 * p.k * p.dk
    P = np.polyval(cv.u_polynomial(alpha, beta, p.A), u)
    assert np.max(np.abs(du**2 - P)) < 1e-8


def test_reduced_equation_guards():
    with pytest.raises(CurvatureUnderflow):
        cv.reduced_rhs(1e-12, 0.5, 1.0)
    assert cv.reduced_rhs(0.0, 0.0, 1.0) == 0.0
    with pytest.raises(CurvatureUnderflow):
        cv.integrate_reduced(0.0, 1.0, 0.5, 1.0, GridSpec(0, 1, 11))
    # k'' = k^3 with k(0) = 2 blows up near s = 0.7
    p = cv.integrate_reduced(2.0, 2 * math.sqrt(2), 0.0, 0.0, GridSpec.from_step(0.0, 2.0, 1e-3))
    assert p.halt_reason == "Blowup"
    assert len(p.k) < 2001
    # signed curvature may change sign when alpha = 0
    q = cv.integrate_reduced(0.5, 0.0, 0.0, 1.0, GridSpec.from_step(0.0, 10.0, 1e-3))
    assert q.halt_reason is None and q.k.min() < 0 < q.k.max()


def test_geodesic_multiplier_is_indeterminate():
    g = GridSpec(0.0, 1.0, 21)
    with pytest.raises(IndeterminateMultiplier):
        cv.fit_lambda_curve(np.zeros(g.n), g.h)
    assert CurvatureProfile(g, np.zeros(g.n)).classify() == "geodesic"
    assert CurvatureProfile(g, np.ones(g.n)).classify() == "constant"
    assert CurvatureProfile(g, 1 + g.s).classify() == "general"


def test_torsion_needs_positive_curvature():
    g = GridSpec(0.0, 1.0, 21)
    with pytest.raises(NonpositiveCurvature):
        CurvatureProfile(g, np.zeros(g.n), tau=np.ones(g.n))
    with pytest.raises(NonpositiveCurvature):
        cv.residual_space3(np.zeros(g.n), 1.0, g.h)
