"""Residual reports, global multiplier fits and grid-convergence studies."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IndeterminateMultiplier
from .numerics import loglog_slope
from .surfaces import ImmersedSurface, shape_data, surface_laplacian

__all__ = [
    "ResidualReport",
    "summarize",
    "fit_lambda_surface",
    "convergence_study",
    "ConvergenceResult",
    "EXIT_OK",
    "EXIT_TOLERANCE",
    "EXIT_DEGENERATE",
]

EXIT_OK = 0
EXIT_TOLERANCE = 2
EXIT_DEGENERATE = 3


def _clean(x):
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


@dataclass
class ResidualReport:
    """Verification record for one construction."""

    construction: str
    grid: dict
    residual_max: float
    residual_rms: float
    lambda_used: float | None = None
    lambda_fit: float | None = None
    lambda_stderr: float | None = None
    convergence_slope: float | None = None
    tolerance: float | None = None
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.tolerance is None:
            return True
        return bool(self.residual_max <= self.tolerance)

    @property
    def exit_code(self) -> int:
        if any(f in ("Minimal", "IndeterminateMultiplier", "Degenerate", "CurvatureUnderflow", "Blowup")
               for f in self.flags):
            return EXIT_DEGENERATE
        return EXIT_OK if self.passed else EXIT_TOLERANCE

    def as_dict(self) -> dict:
        d = {
            "construction": self.construction,
            "lambda": self.lambda_used,
            "residual_max": self.residual_max,
            "residual_rms": self.residual_rms,
            "lambda_fit": self.lambda_fit,
            "lambda_stderr": self.lambda_stderr,
            "convergence_slope": self.convergence_slope,
            "grid": self.grid,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "flags": sorted(self.flags),
        }
        d.update(self.extra)
        return _clean(d)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def summarize(construction: str, residual, grid: dict, **kw) -> ResidualReport:
    """Report from a residual array; NaN samples (outside the stencil interior) are ignored."""
    r = np.asarray(residual, dtype=float)
    r = r[np.isfinite(r)]
    if r.size == 0:
        raise ValueError("residual has no finite samples")
    return ResidualReport(construction, grid, float(np.max(np.abs(r))), float(np.sqrt(np.mean(r**2))), **kw)


def fit_lambda_surface(surface: ImmersedSurface, accuracy: int = 2, general: bool | None = None,
                       minimal_tol: float | None = None):
    """Global least-squares multiplier in ``Delta H = (|B|^2 - Ric(N) + lam) H``.

    Returns ``(lam, stderr, rms)``.  ``stderr`` is ``|r| / |H|`` for the
    post-fit residual ``r``: the residual is smooth discretisation error rather
    than independent noise, so this is the bound a perturbation of ``lam`` by
    the residual would produce.  Surfaces whose ``H`` is at discretisation
    level (``max|H| <= minimal_tol``, default ``max(1e-10, h^2)``) are minimal
    and raise :class:`IndeterminateMultiplier`.
    """
    sd = shape_data(surface, accuracy)
    lap = surface_laplacian(surface, sd.H, accuracy, general)
    q = lap - (sd.B_norm2 - sd.ric_N) * sd.H
    ok = np.isfinite(q)
    H, q = sd.H[ok], q[ok]
    if minimal_tol is None:
        h = max(surface.t_grid.h, surface.s_grid.h)
        minimal_tol = max(1e-10, h**2)
    ss = float(np.sum(H**2))
    if ss < 1e-16 or float(np.max(np.abs(H))) <= minimal_tol:
        raise IndeterminateMultiplier(f"surface is minimal to discretisation accuracy (max|H|={np.max(np.abs(H)):.3g})")
    lam = float(np.sum(H * q) / ss)
    r = q - lam * H
    rms = float(np.sqrt(np.mean(r**2)))
    stderr = float(np.linalg.norm(r) / math.sqrt(ss))
    return lam, stderr, rms


@dataclass
class ConvergenceResult:
    h: list
    errors: list
    slope: float | None
    flags: list


def convergence_study(builder: Callable[[float], float], hs: Sequence[float], roundoff: float = 1e-12) -> ConvergenceResult:
    """Slope of ``log(error)`` against ``log(h)`` for ``error = builder(h)``.

    Needs at least three levels.  Flags ``AtRoundoff`` when every error is
    below ``roundoff`` (no slope reported) and ``NonMonotone`` when the error
    does not decrease with ``h``.
    """
    hs = [float(h) for h in hs]
    if len(hs) < 3:
        raise ValueError("a convergence study needs at least three grid levels")
    errs = [float(builder(h)) for h in hs]
    flags = []
    if all(e < roundoff for e in errs):
        return ConvergenceResult(hs, errs, None, ["AtRoundoff"])
    order = np.argsort(hs)[::-1]
    e_sorted = [errs[i] for i in order]
    if any(b >= a for a, b in zip(e_sorted, e_sorted[1:])):
        flags.append("NonMonotone")
    slope = loglog_slope([hs[i] for i in order], [max(e, 1e-300) for e in e_sorted])
    return ConvergenceResult(hs, errs, slope, flags)
