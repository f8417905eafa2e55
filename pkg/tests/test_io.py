import json

import numpy as np
import pytest

from biminimal import catalog as ct
from biminimal import curves as cv
from biminimal import geometry as geo
from biminimal import io
from biminimal import presets as ps
from biminimal.errors import PointOutsideChart
from biminimal.numerics import GridSpec


def test_profile_round_trip(tmp_path):
    p = ps.curve_preset("envelope", 1e-2)
    q = io.read_profile_csv(io.write_profile_csv(p, tmp_path / "p.csv"))
    assert np.array_equal(p.k, q.k) and np.array_equal(p.tau, q.tau)
    assert q.grid == p.grid


def test_curve_round_trip_and_detection(tmp_path):
    g = GridSpec(0.0, 1.0, 21)
    c = cv.reconstruct_surface_curve(1.0, geo.sphere2(), g)
    path = io.write_curve_csv(c, tmp_path / "c.csv")
    back = io.read_curve_input(path, geo.sphere2())
    assert isinstance(back, geo.CurveSamples)
    assert np.allclose(back.points, c.points, atol=1e-15)
    prof = io.read_curve_input(io.write_profile_csv(ps.curve_preset("spiral", 1e-2), tmp_path / "k.csv"),
                               geo.euclidean_plane())
    assert isinstance(prof, cv.CurvatureProfile)


def test_nonuniform_arclength_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("s,k\n0,1\n0.1,1\n0.3,1\n0.4,1\n0.5,1\n")
    with pytest.raises(ValueError):
        io.read_profile_csv(path)


def test_obj_round_trip(tmp_path):
    surf = ct.build_catalog_surface("s3-longitude", ps.curve_preset("s2-free"), GridSpec(0.8, 2.3, 11), 40)
    path = io.write_obj(surf, tmp_path / "s.obj")
    text = path.read_text()
    nt, ns = surf.shape
    assert text.count("\nv ") == nt * ns and text.count("\nf ") == 2 * (nt - 1) * (ns - 1)
    back = io.read_obj(path)
    assert back.space == surf.space and back.orientation == surf.orientation
    assert back.t_grid == surf.t_grid and back.s_grid == surf.s_grid
    assert np.allclose(back.psi, surf.psi, atol=1e-15)
    assert back.lambda_expected == pytest.approx(surf.lambda_expected)


def test_obj_requires_header(tmp_path):
    path = tmp_path / "plain.obj"
    path.write_text("v 0 0 0\n")
    with pytest.raises(ValueError):
        io.read_obj(path)


def test_obj_chart_is_checked(tmp_path):
    path = tmp_path / "h.obj"
    meta = {"space": "hyperbolic3", "t_grid": [0, 1, 5], "s_grid": [0, 1, 5], "orientation": 1}
    path.write_text(f"# biminimal-surface {json.dumps(meta)}\n" + "v 0 0 -1\n" * 25)
    with pytest.raises(PointOutsideChart):
        io.read_obj(path)


def test_svg_polyline(tmp_path):
    pts = cv.spiral_curve(np.linspace(1, 3, 50))
    text = io.write_svg(pts, tmp_path / "a.svg", title="spiral").read_text()
    assert "<polyline" in text and "x=" in text and "<title>spiral</title>" in text
