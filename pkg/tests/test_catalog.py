import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biminimal import catalog as ct
from biminimal import geometry as geo
from biminimal import presets as ps
from biminimal import surfaces as sf
from biminimal.curves import CurvatureProfile
from biminimal.errors import IndeterminateMultiplier, UnsupportedPair
from biminimal.numerics import GridSpec, loglog_slope
from biminimal.verify import fit_lambda_surface


def _s3(a, b, c, d):
    p = np.array([a, b, c, d])
    return p / np.linalg.norm(p)


quad = st.tuples(*[st.floats(-1, 1)] * 4).filter(lambda v: np.linalg.norm(v) > 0.1)


@given(quad, st.floats(0, 2 * math.pi))
def test_hopf_map_onto_half_sphere_and_fibre_invariant(v, th):
    p = _s3(*v)
    q = ct.hopf_map(p)
    assert np.linalg.norm(q) == pytest.approx(0.5, abs=1e-12)
    z, w = p[0] + 1j * p[1], p[2] + 1j * p[3]
    e = np.exp(1j * th)
    rot = np.array([(e * z).real, (e * z).imag, (e * w).real, (e * w).imag])
    assert np.allclose(ct.hopf_map(rot), q, atol=1e-12)


@given(st.floats(0.1, 3.0), st.floats(0, 2 * math.pi))
def test_hopf_section_is_a_section(theta, phi):
    q = 0.5 * np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    p = ct.hopf_section(q)
    assert np.linalg.norm(p) == pytest.approx(1.0)
    assert np.allclose(ct.hopf_map(p), q, atol=1e-12)


def _latitude(n):
    # polar angle varies along the curve so that the lift rate is not constant
    g = GridSpec(0.0, 2.0, n)
    phi = 1.0 + 0.3 * np.sin(2 * g.s)
    pts = 0.5 * np.stack([np.sin(phi) * np.cos(g.s), np.sin(phi) * np.sin(g.s), np.cos(phi)], axis=1)
    return geo.CurveSamples(geo.sphere2(0.5), g, pts, unit_speed=False)


def test_hopf_lift_horizontal_and_orders():
    ref = ct.hopf_lift(_latitude(6401), order=2)
    slopes = {}
    for order in (1, 2):
        errs, hs = [], []
        for n in (101, 201, 401):
            lift = ct.hopf_lift(_latitude(n), order=order)
            m = 6400 // (n - 1)
            errs.append(np.max(np.abs(lift - ref[::m])))
            hs.append(2.0 / (n - 1))
        slopes[order] = loglog_slope(hs, errs)
    assert slopes[1] == pytest.approx(1.0, abs=0.2)
    assert slopes[2] == pytest.approx(2.0, abs=0.3)
    lift = ct.hopf_lift(_latitude(801))
    assert np.allclose(ct.hopf_map(lift), _latitude(801).points, atol=1e-12)
    d = np.gradient(lift, 2.0 / 800, axis=0)
    z, w = lift[:, 0] + 1j * lift[:, 1], lift[:, 2] + 1j * lift[:, 3]
    dz, dw = d[:, 0] + 1j * d[:, 1], d[:, 2] + 1j * d[:, 3]
    assert np.max(np.abs(np.imag(dz * np.conj(z) + dw * np.conj(w))[2:-2])) < 1e-4


def test_clifford_torus_is_minimal():
    g = GridSpec(0.0, math.pi, 201)
    surf = ct.build_catalog_surface("hopf", CurvatureProfile(g, np.zeros(g.n)), GridSpec(0, 1, 101))
    assert np.nanmax(np.abs(sf.shape_data(surf).H)) < 1e-5
    with pytest.raises(IndeterminateMultiplier):
        fit_lambda_surface(surf)


def test_plane_over_straight_line_is_minimal():
    surf = ct.build_catalog_surface("r3-cylinder", ps.curve_preset("greatcircle", 1e-2), GridSpec(-1, 1, 41))
    assert np.nanmax(np.abs(sf.shape_data(surf).H)) < 1e-12


@pytest.mark.parametrize("case", ps.SURFACE_CASES, ids=[c[0] for c in ps.SURFACE_CASES])
def test_multiplier_fit_within_three_stderr(case):
    kind, preset, lam, sgrid, stride = case
    surf = ct.build_catalog_surface(kind, ps.curve_preset(preset), GridSpec(*sgrid), stride)
    assert surf.lambda_expected == pytest.approx(lam, abs=1e-3)
    for acc in (2, 4):
        fit, err, _ = fit_lambda_surface(surf, acc)
        assert abs(fit - lam) <= 3 * err


@pytest.mark.parametrize("case", ps.SURFACE_CASES, ids=[c[0] for c in ps.SURFACE_CASES])
def test_lemma_mean_curvature(case):
    kind, preset, _, sgrid, stride = case
    surf = ct.build_catalog_surface(kind, ps.curve_preset(preset), GridSpec(*sgrid), stride)
    assert ct.lemma_error(surf, 4) < 1e-4


@pytest.mark.parametrize("case", ps.SURFACE_CASES, ids=[c[0] for c in ps.SURFACE_CASES])
def test_orientation_flip_negates_H(case):
    kind, preset, _, sgrid, stride = case
    surf = ct.build_catalog_surface(kind, ps.curve_preset(preset), GridSpec(*sgrid), stride)
    a = sf.shape_data(surf).H
    b = sf.shape_data(surf.with_orientation(-surf.orientation)).H
    assert np.allclose(a, -b, equal_nan=True)
    # Ric(N) is even in N
    ra = sf.shape_data(surf).ric_N
    rb = sf.shape_data(surf.with_orientation(-surf.orientation)).ric_N
    assert np.allclose(ra, rb, equal_nan=True)


def test_thurston_second_fundamental_forms():
    for kind, preset, off, ric in (("heisenberg", "r2-shifted", -0.5, -0.5), ("sl2r", "h2-free", 0.5, -1.5)):
        surf = ct.build_catalog_surface(kind, ps.curve_preset(preset), GridSpec(-1, 1, 81), 10)
        sd = sf.shape_data(surf, 4)
        k = surf.strip.k_gamma[:, None]
        B = sd.B[4:-4, 4:-4]
        assert np.max(np.abs(B[..., 0, 0] - k[4:-4])) < 1e-4
        assert np.max(np.abs(B[..., 0, 1] - off)) < 1e-4
        assert np.max(np.abs(B[..., 1, 1])) < 1e-4
        assert np.nanmax(np.abs(sd.ric_N - ric)) < 2e-3


def test_shift_pairs_hold_and_break_together():
    prof = ps.curve_preset("r2-shifted")  # biminimal in the plane at lam = 1
    grid = GridSpec(-1, 1, 81)
    c, s = ct.correspondence_check("heisenberg", prof, 0.0, grid, 10, 4)
    assert c.residual_max < 1e-3 and s.residual_max < 1e-3
    c, s = ct.correspondence_check("heisenberg", prof, 0.5, grid, 10, 4)
    assert c.residual_max > 1e-2 and s.residual_max > 1e-2


def test_fixed_multiplier_kinds_flag_other_values():
    c, s = ct.correspondence_check("h3-vertical", ps.curve_preset("spiral"), 0.0, GridSpec(-1, 1, 41), 20)
    assert "NotPaired" in c.flags and "NotPaired" in s.flags


def test_unsupported_pairs():
    with pytest.raises(UnsupportedPair):
        ct.kind_info("sol")
    curve = geo.CurveSamples(geo.euclidean_plane(), GridSpec(0, 1, 11), np.zeros((11, 2)))
    with pytest.raises(UnsupportedPair):
        ct.build_catalog_surface("hopf", curve)
    with pytest.raises(UnsupportedPair):
        ct.correspondence_check("r3-envelope", ps.curve_preset("envelope"), 0.0)


def test_product_alias_picks_base():
    a = ct.build_catalog_surface("s2xr", ps.curve_preset("s2-free"), GridSpec(-1, 1, 21), 20)
    b = ct.build_catalog_surface("h2xr", ps.curve_preset("h2-constant"), GridSpec(-1, 1, 21), 20)
    assert a.space.kind is geo.Kind.S2XR and b.space.kind is geo.Kind.H2XR


def test_envelope_mean_curvature_equals_curvature():
    env = ct.build_catalog_surface("r3-envelope", ps.curve_preset("envelope"), GridSpec(-0.5, 0.5, 81), 10)
    assert ct.lemma_error(env, 4) < 1e-4
