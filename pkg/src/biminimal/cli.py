"""Command line: ``biminimal solve-curve | build-surface | verify``.

Exit codes: 0 every check within tolerance, 2 tolerance exceeded, 3 degenerate
or indeterminate (minimal surface, geodesic, curvature underflow), 64 usage
error, 65 unsupported construction/curve pairing.
"""
from __future__ import annotations

import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import catalog as ct
from . import curves as cv
from . import geometry as geo
from . import io
from . import presets
from . import surfaces as sf
from .curves import CurvatureProfile
from .errors import (
    BiminimalError,
    ChartExit,
    CurvatureUnderflow,
    DegenerateCurve,
    IndeterminateMultiplier,
    UnsupportedPair,
)
from .geometry import CurveSamples, Kind
from .numerics import GridSpec, rigid_align
from .verify import EXIT_DEGENERATE, EXIT_OK, ResidualReport, convergence_study, fit_lambda_surface, summarize

EXIT_USAGE = 64
EXIT_UNSUPPORTED = 65
OUTDIR_ENV = "BIMINIMAL_OUTDIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- configuration -----------------------------------------------------------
def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _coerce(val, like):
    if isinstance(like, bool):
        return str(val).lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(val)
    if isinstance(like, float):
        return float(val)
    return val


def resolve(args, defaults: dict) -> argparse.Namespace:
    """Fill unset options: command-line flag, then environment (output directory), then config, then default."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key in cfg:
        if key not in defaults:
            raise UsageError(f"unknown config key {key!r}")
    for key, default in defaults.items():
        if getattr(args, key, None) is not None:
            continue
        if key == "out" and os.environ.get(OUTDIR_ENV):
            setattr(args, key, os.environ[OUTDIR_ENV])
            continue
        if key in cfg:
            try:
                setattr(args, key, _coerce(cfg[key], default) if default is not None else cfg[key])
            except ValueError as exc:
                raise UsageError(f"config key {key}: {exc}") from None
            continue
        setattr(args, key, default)
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    return args


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def parse_space(name: str) -> geo.AmbientSpace:
    """``euclidean-plane``, ``sphere2``, ``sphere2(r=0.5)``, ``hyperbolic-plane``, ``euclidean3``, ..."""
    m = re.fullmatch(r"\s*([a-z0-9-]+)\s*(?:\(\s*r\s*=\s*([0-9.eE+-]+)\s*\))?\s*", name)
    if not m:
        raise UsageError(f"cannot parse space {name!r}")
    try:
        kind = Kind(m.group(1))
    except ValueError:
        raise UsageError(f"unknown space {m.group(1)!r}; choose from {[k.value for k in Kind]}") from None
    if kind is Kind.CONFORMAL_PLANE:
        raise UsageError("the conformal plane is not available as a file space")
    return geo.AmbientSpace(kind, radius=float(m.group(2) or 1.0))


def _report_line(rep: ResidualReport) -> str:
    status = "PASS" if rep.exit_code == EXIT_OK else ("DEGENERATE" if rep.exit_code == EXIT_DEGENERATE else "FAIL")
    parts = [f"{status:10s} {rep.construction:28s} residual_max={rep.residual_max:.3e}"]
    if rep.tolerance is not None:
        parts.append(f"tol={rep.tolerance:.1e}")
    if rep.lambda_used is not None:
        parts.append(f"lambda={rep.lambda_used:.6g}")
    if rep.lambda_fit is not None:
        parts.append(f"lambda_fit={rep.lambda_fit:.6g}")
    if rep.flags:
        parts.append("flags=" + ",".join(sorted(rep.flags)))
    return " ".join(parts)


# -- solve-curve -------------------------------------------------------------
SOLVE_DEFAULTS = {
    "preset": None, "alpha": None, "beta": None, "k0": None, "dk0": 0.0, "s0": None, "s1": None,
    "h": 1e-3, "k": 1.0, "G": None, "c": None, "base": None, "out": ".", "tol": 1e-3, "seed": 0,
}


def _base_for(c: float, base: str | None) -> geo.AmbientSpace:
    if base:
        return parse_space(base)
    if c == 0:
        return geo.euclidean_plane()
    if c > 0:
        return geo.sphere2(1 / math.sqrt(c))
    if abs(c + 1) < 1e-12:
        return geo.hyperbolic_plane()
    raise UnsupportedPair(f"no base surface of constant curvature {c:g}; negative curvature is -1 only")


def _solve_profile(args):
    """Profile, base space, and a callable curvature when one is known in closed form."""
    if args.preset is not None:
        if args.preset == "spiral":
            s0 = 1.0 if args.s0 is None else args.s0
            s1 = 3.0 if args.s1 is None else args.s1
            if s0 <= 0:
                raise UsageError("the spiral needs s0 > 0")
            prof = presets.curve_preset("spiral", args.h, s0=s0, s1=s1)
            return prof, geo.euclidean_plane(), cv.spiral_curvature
        if args.preset == "sphere-parallel":
            prof = presets.curve_preset("sphere-parallel", args.h)
            return prof, geo.sphere2(), None
        if args.preset == "constant-k":
            G = 0.0 if args.G is None else args.G
            length = (args.s1 if args.s1 is not None else 2.0) - (args.s0 or 0.0)
            prof = presets.curve_preset("constant-k", args.h, k=args.k, G=G, length=length)
            return prof, _base_for(G, args.base), None
        raise UsageError(f"unknown preset {args.preset!r}")
    if args.beta is None or args.k0 is None:
        raise UsageError("give --preset or --beta and --k0 (with optional --alpha, --dk0)")
    alpha = args.alpha or 0.0
    c = args.c if args.c is not None else (args.G if args.G is not None else 0.0)
    s0 = 0.0 if args.s0 is None else args.s0
    s1 = 10.0 if args.s1 is None else args.s1
    if not s1 > s0:
        raise UsageError("--s1 must exceed --s0")
    prof = cv.integrate_reduced(args.k0, args.dk0, alpha, args.beta, GridSpec.from_step(s0, s1, args.h))
    prof.lam, prof.c = c - args.beta, c
    if alpha != 0:
        if c != 0:
            raise UnsupportedPair("space curves with torsion are reconstructed in euclidean3 only")
        prof.tau = alpha / prof.k**2
        return prof, geo.euclidean3(), None
    return prof, _base_for(c, args.base), None


def _reconstruct(prof: CurvatureProfile, base: geo.AmbientSpace, kfun, init=None):
    k = kfun if kfun is not None else prof.k
    if base.kind is Kind.EUCLIDEAN3:
        return cv.reconstruct_space_curve(prof.k, prof.tau, prof.grid)
    if base.kind is Kind.EUCLIDEAN_PLANE:
        return cv.reconstruct_plane_curve(k, prof.grid, init=init or (0.0, 0.0, 0.0))
    return cv.reconstruct_surface_curve(k, base, prof.grid)


def _curve_report(name, prof: CurvatureProfile, base: geo.AmbientSpace, tol: float) -> ResidualReport:
    """Residual scaled pointwise by ``max(1, |k|^3)`` so that tolerances are meaningful where ``k`` is large."""
    h, k = prof.grid.h, prof.k
    G = base.curvature
    flags = []
    lam_fit = None
    try:
        lam_fit, _ = cv.fit_lambda_curve(k, h, tau=prof.tau, G=G)
    except IndeterminateMultiplier:
        flags.append("IndeterminateMultiplier")
    lam = prof.lam if prof.lam is not None else lam_fit
    lam = 0.0 if lam is None else lam
    if prof.tau is None:
        r = cv.residual_planar(k, h, G=G, lam=lam)
        extra = {}
    else:
        r, r2 = cv.residual_space3(k, prof.tau, h, c=G, lam=lam)
        extra = {"torsion_residual_max": float(np.max(np.abs(r2)))}
    scale = np.maximum(1.0, np.abs(cv.interior(k)) ** 3)
    rep = summarize(name, r / scale, prof.grid.as_dict(), lambda_used=lam, lambda_fit=lam_fit,
                    tolerance=tol, flags=flags)
    extra["residual_abs_max"] = float(np.max(np.abs(r)))
    extra["residual_scaling"] = "max(1,|k|^3)"
    extra["base"] = base.name
    extra["classification"] = prof.classify()
    if prof.first_integral is not None:
        extra["A"] = prof.A
        extra["first_integral_drift"] = prof.drift
        u, du = prof.k**2, 2 * prof.k * prof.dk
        extra["u_polynomial_max"] = float(np.max(np.abs(du**2 - np.polyval(cv.u_polynomial(prof.alpha, prof.beta, prof.A), u))))
    if prof.halt_reason:
        rep.flags.append(prof.halt_reason)
        extra["halt_reason"] = prof.halt_reason
    rep.extra.update(extra)
    return rep


def cmd_solve_curve(args) -> int:
    args = resolve(args, SOLVE_DEFAULTS)
    if not args.h > 0:
        raise UsageError("--h must be positive")
    out = _outdir(args)
    prof, base, kfun = _solve_profile(args)
    init = None
    if args.preset == "spiral":
        s0 = prof.grid.s_min
        p0 = cv.spiral_curve(np.array([s0]))[0]
        init = (p0[0], p0[1], math.sqrt(2) * math.log(s0))
    try:
        curve = _reconstruct(prof, base, kfun, init)
    except ChartExit as exc:
        curve = None
        print(f"warning: {exc}", file=sys.stderr)
    rep = _curve_report(f"curve:{args.preset or 'reduced'}", prof, base, args.tol)
    if curve is None:
        rep.flags.append("ChartExit")
    if args.preset == "spiral" and curve is not None:
        _, dist = rigid_align(curve.points, cv.spiral_curve(prof.s))
        rep.extra["closed_form_distance"] = dist
    io.write_profile_csv(prof, out / "profile.csv")
    if curve is not None:
        io.write_curve_csv(curve, out / "curve.csv")
        io.write_svg(curve.points, out / "curve.svg", title=rep.construction)
    io.write_json(rep, out / "report.json")
    print(_report_line(rep))
    return rep.exit_code


# -- build-surface -----------------------------------------------------------
BUILD_DEFAULTS = {
    "kind": None, "curve": None, "lambda_": "any", "s0": None, "s1": None, "n_s": 81, "stride": 10,
    "accuracy": 4, "lift_order": 2, "base": None, "out": ".", "tol": 1e-3, "seed": 0,
}


def _curve_base(kind: str, base: str | None) -> geo.AmbientSpace:
    if base:
        return parse_space(base)
    info = ct.kind_info(kind)
    if info.name == "product":
        return ct.base_space(kind, kind if kind in ("s2xr", "h2xr") else "sphere2")
    return ct.base_space(kind)


def load_curve(spec: str, kind: str, base: str | None = None):
    """A file (profile CSV ``s,k[,tau]`` or points ``s,x,y[,z]``) or a preset name."""
    path = Path(spec)
    if path.suffix.lower() == ".csv" or path.exists():
        if not path.exists():
            raise UsageError(f"curve file {spec} does not exist")
        space = _curve_base(kind, base)
        try:
            return io.read_curve_input(path, space)
        except KeyError as exc:
            raise UnsupportedPair(f"{spec}: column {exc} missing for a curve in {space.name}") from None
        except ValueError as exc:
            raise UsageError(f"{spec}: {exc}") from None
    try:
        return presets.curve_preset(spec)
    except KeyError:
        names = ["spiral", "sphere-parallel", "constant-k", "greatcircle", "envelope", *presets.CURVE_PRESETS]
        raise UsageError(f"{spec!r} is neither a file nor a preset ({', '.join(names)})") from None


def _parse_lambda(val):
    if val is None or str(val).lower() == "any":
        return None
    try:
        return float(val)
    except ValueError:
        raise UsageError(f"--lambda must be a number or 'any', got {val!r}") from None


def _grid_dict(surf):
    return {"t": surf.t_grid.as_dict(), "s": surf.s_grid.as_dict()}


def surface_report(surf, lam, accuracy: int, tol: float, name: str):
    """Residual at ``lam`` (or at the fitted multiplier), fitted multiplier, and the residual field."""
    flags = []
    lam_fit = stderr = None
    try:
        lam_fit, stderr, _ = fit_lambda_surface(surf, accuracy)
    except IndeterminateMultiplier:
        flags.append("Minimal")
    if lam is None:
        lam = lam_fit if lam_fit is not None else (surf.lambda_expected or 0.0)
    sd = sf.shape_data(surf, accuracy)
    res = sf.biminimal_residual_surface(surf, lam, accuracy, shape=sd)
    rep = summarize(name, res, _grid_dict(surf), lambda_used=lam, lambda_fit=lam_fit, lambda_stderr=stderr,
                    tolerance=tol, flags=flags)
    rep.extra["lambda_expected"] = surf.lambda_expected
    rep.extra["H_max"] = float(np.nanmax(np.abs(sd.H)))
    return rep, sd, res


def cmd_build_surface(args) -> int:
    args = resolve(args, BUILD_DEFAULTS)
    if args.kind is None or args.curve is None:
        raise UsageError("build-surface needs --kind and --curve")
    if args.accuracy not in (2, 4):
        raise UsageError("--accuracy must be 2 or 4")
    if args.stride < 1 or args.n_s < 5:
        raise UsageError("--stride must be >= 1 and --n-s >= 5")
    info = ct.kind_info(args.kind)
    lam = _parse_lambda(args.lambda_)
    out = _outdir(args)
    gamma = load_curve(args.curve, args.kind, args.base)
    s0 = info.default_s[0] if args.s0 is None else args.s0
    s1 = info.default_s[1] if args.s1 is None else args.s1
    s_grid = GridSpec(s0, s1, args.n_s)
    surf = ct.build_catalog_surface(args.kind, gamma, s_grid, args.stride, lift_order=args.lift_order)
    rep, sd, res = surface_report(surf, lam, args.accuracy, args.tol, f"{info.name}:surface")
    reports = [rep]
    if info.name != "r3-envelope":
        crep, _ = ct.correspondence_check(args.kind, gamma, rep.lambda_used, s_grid, args.stride,
                                          args.accuracy, args.tol)
        if "NotPaired" in crep.flags:
            rep.flags.append("NotPaired")
        rep.extra["curve"] = crep.as_dict()
        rep.extra["curve_residual"] = crep.residual_max
        rep.extra["curve_lambda"] = crep.lambda_used
        rep.extra["lemma_error"] = ct.lemma_error(surf, args.accuracy)
        reports.append(crep)
    else:
        rep.extra["H_minus_k"] = ct.lemma_error(surf, args.accuracy)
    rep.extra["rule"] = surf.provenance.get("rule")
    rep.extra["orientation"] = surf.orientation
    io.write_obj(surf, out / "surface.obj", {"lambda_expected": rep.lambda_used} if lam is not None else None)
    T, S = np.meshgrid(surf.t_grid.s, surf.s_grid.s, indexing="ij")
    io.write_csv(out / "fields.csv", ["t", "s", "H", "B2", "ric_N", "residual"],
                 [T, S, sd.H, sd.B_norm2, sd.ric_N, res])
    io.write_json(rep, out / "report.json")
    for r in reports:
        print(_report_line(r))
    return max(r.exit_code for r in reports)


# -- verify ------------------------------------------------------------------
VERIFY_DEFAULTS = {
    "suite": None, "input": None, "lambda_": None, "space": None, "perturb": 0.0, "seed": 0,
    "convergence": False, "accuracy": 4, "out": ".", "tol": 1e-3,
}


def _coarsen(surf, m: int):
    tg, sg = surf.t_grid.subgrid(m), surf.s_grid.subgrid(m)
    psi = surf.psi[::m, ::m][: tg.n, : sg.n]
    return sf.ImmersedSurface(surf.space, psi, tg, sg, surf.orientation, None, dict(surf.provenance),
                              surf.lambda_expected)


def _verify_surface(args, rng):
    surf = io.read_obj(args.input)
    if args.perturb:
        noise = args.perturb * rng.standard_normal(surf.psi.shape)
        surf = sf.ImmersedSurface(surf.space, surf.space.project(surf.psi + noise), surf.t_grid, surf.s_grid,
                                  surf.orientation, None, dict(surf.provenance), surf.lambda_expected)
    lam = _parse_lambda(args.lambda_)
    if lam is None:
        lam = surf.lambda_expected
    rep, _, _ = surface_report(surf, lam, args.accuracy, args.tol, f"input:{Path(args.input).name}")
    if args.convergence:
        def err(m):
            s = _coarsen(surf, int(m))
            r = sf.biminimal_residual_surface(s, rep.lambda_used, args.accuracy)
            return float(np.nanmax(np.abs(r)))
        conv = convergence_study(err, [4, 2, 1])
        rep.convergence_slope = conv.slope
        rep.extra["convergence_errors"] = conv.errors
        rep.flags.extend(conv.flags)
    return rep


def _verify_curve(args):
    space = parse_space(args.space) if args.space else geo.euclidean_plane()
    obj = io.read_curve_input(args.input, space)
    if isinstance(obj, CurveSamples):
        if not obj.unit_speed:
            obj = geo.arclength_reparam(obj.points, space, obj.grid.n)
        F = cv.frenet(obj)
        tau = F.tau if space.dim == 3 else None
        prof = CurvatureProfile(obj.grid, F.k, tau=tau)
    else:
        prof = obj
    lam = _parse_lambda(args.lambda_)
    if lam is not None:
        prof.lam = lam
    rep = _curve_report(f"input:{Path(args.input).name}", prof, space, args.tol)
    if args.convergence:
        def err(m):
            m = int(m)
            g = prof.grid.subgrid(m)
            kk = prof.k[::m][: g.n]
            tt = None if prof.tau is None else prof.tau[::m][: g.n]
            if tt is None:
                r = cv.residual_planar(kk, g.h, G=space.curvature, lam=rep.lambda_used)
            else:
                r, _ = cv.residual_space3(kk, tt, g.h, c=space.curvature, lam=rep.lambda_used)
            return float(np.max(np.abs(r)))
        conv = convergence_study(err, [4, 2, 1])
        rep.convergence_slope = conv.slope
        rep.extra["convergence_errors"] = conv.errors
        rep.flags.extend(conv.flags)
    return rep


def cmd_verify(args) -> int:
    args = resolve(args, VERIFY_DEFAULTS)
    if (args.suite is None) == (args.input is None):
        raise UsageError("verify needs exactly one of --suite or --input")
    out = _outdir(args)
    if args.suite is not None:
        if args.suite not in ("paper", "examples"):
            raise UsageError(f"unknown suite {args.suite!r}; available: paper (alias examples)")
        reps = presets.example_suite()
        for r in reps:
            print(_report_line(r))
        io.write_json({"suite": args.suite, "reports": [r.as_dict() for r in reps]}, out / "suite.json")
        code = max(r.exit_code for r in reps)
        print(f"{sum(r.exit_code == EXIT_OK for r in reps)}/{len(reps)} checks passed")
        return code
    path = Path(args.input)
    if not path.exists():
        raise UsageError(f"input {path} does not exist")
    rng = np.random.default_rng(args.seed)
    if path.suffix.lower() == ".obj":
        rep = _verify_surface(args, rng)
    elif path.suffix.lower() == ".csv":
        rep = _verify_curve(args)
    else:
        raise UsageError("--input must be an .obj surface or a .csv curve")
    io.write_json(rep, out / "verify.json")
    print(_report_line(rep))
    return rep.exit_code


# -- entry point -------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="biminimal", description="Construct and verify biminimal curves and surfaces.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(q):
        q.add_argument("--out", help=f"output directory (default '.', or ${OUTDIR_ENV})")
        q.add_argument("--config", help="key=value file with defaults for any option")
        q.add_argument("--tol", type=float, help="pass/fail tolerance on the residual")
        q.add_argument("--seed", type=int, help="seed for randomised steps")

    q = sub.add_parser("solve-curve", help="integrate a curvature profile and reconstruct the curve")
    q.add_argument("--preset", choices=["spiral", "sphere-parallel", "constant-k"])
    q.add_argument("--alpha", type=float, help="k^2 tau (0 for curves on surfaces)")
    q.add_argument("--beta", type=float, help="c - lambda")
    q.add_argument("--k0", type=float)
    q.add_argument("--dk0", type=float)
    q.add_argument("--s0", type=float)
    q.add_argument("--s1", type=float)
    q.add_argument("--h", type=float, help="arclength step")
    q.add_argument("--k", type=float, help="curvature of the constant-k preset")
    q.add_argument("--G", type=float, help="Gaussian curvature of the base surface")
    q.add_argument("--c", type=float, help="curvature of the ambient space form")
    q.add_argument("--base", help="base surface, e.g. sphere2(r=0.5)")
    common(q)
    q.set_defaults(func=cmd_solve_curve)

    q = sub.add_parser("build-surface", help="build a catalog surface over a curve")
    q.add_argument("--kind", help=f"one of {', '.join(sorted(ct.KINDS))}, s2xr, h2xr")
    q.add_argument("--curve", help="curve CSV or preset name")
    q.add_argument("--lambda", dest="lambda_", help="surface multiplier or 'any' to fit it")
    q.add_argument("--s0", type=float)
    q.add_argument("--s1", type=float)
    q.add_argument("--n-s", dest="n_s", type=int)
    q.add_argument("--stride", "--ht", dest="stride", type=int, help="subsampling of the curve grid along t")
    q.add_argument("--accuracy", type=int, help="finite-difference order, 2 or 4")
    q.add_argument("--lift-order", dest="lift_order", type=int, help="Hopf horizontal lift order, 1 or 2")
    q.add_argument("--base", help="space of a curve file, when it differs from the construction's base")
    common(q)
    q.set_defaults(func=cmd_build_surface)

    q = sub.add_parser("verify", help="check a file or the built-in example suite")
    q.add_argument("--suite", help="'paper' runs every worked example")
    q.add_argument("--input", help=".obj surface or .csv curve")
    q.add_argument("--lambda", dest="lambda_", help="multiplier to test (default: expected or fitted)")
    q.add_argument("--space", help="space of a curve CSV (default euclidean-plane)")
    q.add_argument("--perturb", type=float, help="add Gaussian noise of this size to the input")
    q.add_argument("--convergence", action="store_true", default=None, help="report a grid-convergence slope")
    q.add_argument("--accuracy", type=int)
    common(q)
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return int(args.func(args))
    except UsageError as exc:
        print(f"biminimal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedPair as exc:
        print(f"biminimal: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (DegenerateCurve, CurvatureUnderflow, BiminimalError) as exc:
        print(f"biminimal: degenerate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
