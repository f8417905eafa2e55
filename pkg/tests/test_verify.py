import json
import math

import numpy as np
import pytest

from biminimal import catalog as ct
from biminimal import presets as ps
from biminimal import surfaces as sf
from biminimal.numerics import GridSpec
from biminimal.verify import (
    EXIT_DEGENERATE,
    EXIT_OK,
    EXIT_TOLERANCE,
    ResidualReport,
    convergence_study,
    fit_lambda_surface,
    summarize,
)


def test_summarize_ignores_nan():
    r = summarize("x", np.array([np.nan, 3.0, -4.0, np.nan]), {}, tolerance=5.0)
    assert r.residual_max == 4.0 and r.residual_rms == pytest.approx(math.sqrt(12.5))
    assert r.passed and r.exit_code == EXIT_OK
    with pytest.raises(ValueError):
        summarize("x", np.array([np.nan]), {})


def test_exit_codes():
    assert ResidualReport("a", {}, 1.0, 1.0, tolerance=0.5).exit_code == EXIT_TOLERANCE
    assert ResidualReport("a", {}, 0.0, 0.0, tolerance=0.5, flags=["Minimal"]).exit_code == EXIT_DEGENERATE
    assert ResidualReport("a", {}, 1.0, 1.0).exit_code == EXIT_OK


def test_json_schema_and_determinism():
    r = ResidualReport("c", {"n": 3}, 1e-4, 5e-5, lambda_used=0.0, lambda_fit=float("nan"), tolerance=1e-3,
                       flags=["b", "a"], extra={"z": np.float64(2.0)})
    text = r.to_json()
    assert text == r.to_json()
    d = json.loads(text)
    for key in ("construction", "lambda", "residual_max", "residual_rms", "lambda_fit", "lambda_stderr",
                "convergence_slope", "grid", "tolerance", "passed", "flags"):
        assert key in d
    assert d["lambda_fit"] is None and d["flags"] == ["a", "b"] and d["z"] == 2.0
    assert list(d) == sorted(d)


def test_convergence_study():
    res = convergence_study(lambda h: 3 * h**2, [0.1, 0.05, 0.025])
    assert res.slope == pytest.approx(2.0) and res.flags == []
    assert convergence_study(lambda h: 1e-15, [0.1, 0.05, 0.025]).flags == ["AtRoundoff"]
    assert "NonMonotone" in convergence_study(lambda h: 1 / h, [0.1, 0.05, 0.025]).flags
    with pytest.raises(ValueError):
        convergence_study(lambda h: h, [0.1, 0.05])


def test_surface_convergence_order():
    prof = ps.curve_preset("spiral")

    def err(n):
        surf = ct.build_catalog_surface("r3-cone", ps.curve_preset("sphere-parallel"), GridSpec(0.5, 2.0, int(n)), 10)
        return float(np.nanmax(np.abs(sf.biminimal_residual_surface(surf, 0.0, 2))))

    res = convergence_study(lambda h: err(round(1.5 / h) + 1), [1.5 / 40, 1.5 / 80, 1.5 / 160])
    assert res.slope == pytest.approx(2.0, abs=0.3)
    assert prof.lam == 0.0


def test_perturbation_breaks_the_fit():
    surf = ct.build_catalog_surface("r3-cylinder", ps.curve_preset("spiral"), GridSpec(-1, 1, 41), 20)
    lam, err, _ = fit_lambda_surface(surf, 4)
    assert abs(lam) < 1e-3
    rng = np.random.default_rng(3)
    noisy = sf.ImmersedSurface(surf.space, surf.psi + 1e-3 * rng.standard_normal(surf.psi.shape),
                               surf.t_grid, surf.s_grid, surf.orientation)
    r = sf.biminimal_residual_surface(noisy, 0.0, 4)
    assert np.nanmax(np.abs(r)) > 1.0


def test_example_suite_passes():
    reps = ps.example_suite()
    assert len(reps) >= 20
    bad = [r.construction for r in reps if r.exit_code != EXIT_OK]
    assert bad == []
