"""File formats: CSV profiles and curves, OBJ meshes, SVG polylines, JSON reports."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import geometry as geo
from .curves import CurvatureProfile
from .geometry import CurveSamples, Kind
from .numerics import GridSpec
from .surfaces import ImmersedSurface

__all__ = [
    "write_csv",
    "read_csv",
    "write_profile_csv",
    "read_profile_csv",
    "write_curve_csv",
    "read_curve_csv",
    "read_curve_input",
    "write_obj",
    "read_obj",
    "write_svg",
    "write_json",
    "space_from_name",
]

_FMT = "{:.17g}"


def write_csv(path, header, columns) -> Path:
    path = Path(path)
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_FMT.format(v) for v in row])
    return path


def read_csv(path) -> dict:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    return {h: data[:, i] for i, h in enumerate(header)}


def _grid_from(s) -> GridSpec:
    s = np.asarray(s, dtype=float)
    g = GridSpec(float(s[0]), float(s[-1]), len(s))
    if not np.allclose(s, g.s, rtol=0, atol=1e-9 * max(1.0, abs(g.s_max))):
        raise ValueError("arclength column is not uniform")
    return g


def write_profile_csv(profile: CurvatureProfile, path) -> Path:
    header, cols = ["s", "k"], [profile.s, profile.k]
    if profile.tau is not None:
        header.append("tau")
        cols.append(profile.tau)
    return write_csv(path, header, cols)


def read_profile_csv(path, **kw) -> CurvatureProfile:
    d = read_csv(path)
    return CurvatureProfile(_grid_from(d["s"]), d["k"], tau=d.get("tau"), **kw)


def write_curve_csv(curve: CurveSamples, path) -> Path:
    names = ["x", "y", "z", "w"][: curve.points.shape[1]]
    return write_csv(path, ["s"] + names, [curve.s] + [curve.points[:, i] for i in range(len(names))])


def read_curve_csv(path, space: geo.AmbientSpace) -> CurveSamples:
    d = read_csv(path)
    names = ["x", "y", "z", "w"][: space.ncoords]
    pts = np.stack([d[n] for n in names], axis=1)
    return CurveSamples(space, _grid_from(d["s"]), space.project(pts))


def read_curve_input(path, space: geo.AmbientSpace):
    """A profile CSV (``s,k[,tau]``) or a curve CSV (``s,x,y[,z]``), detected from the header."""
    with open(Path(path), newline="") as fh:
        header = [h.strip() for h in next(csv.reader(fh))]
    if "k" in header:
        return read_profile_csv(path)
    return read_curve_csv(path, space)


def space_from_name(name: str, radius: float = 1.0) -> geo.AmbientSpace:
    kind = Kind(name.split("(")[0])
    return geo.AmbientSpace(kind, radius=radius) if kind is not Kind.CONFORMAL_PLANE else None


def write_obj(surface: ImmersedSurface, path, extra: dict | None = None) -> Path:
    """Mesh with one vertex per grid point (row-major in ``t``) and two triangles per cell.

    Header comments record the space, grids, orientation and expected
    multiplier so that :func:`read_obj` restores the sampled surface.  Points
    of S^3 or S^2 x R are written with their four embedding coordinates.
    """
    path = Path(path)
    nt, ns = surface.shape
    sp = surface.space
    meta = {
        "space": sp.kind.value,
        "radius": sp.radius,
        "t_grid": [surface.t_grid.s_min, surface.t_grid.s_max, nt],
        "s_grid": [surface.s_grid.s_min, surface.s_grid.s_max, ns],
        "orientation": surface.orientation,
        "lambda_expected": surface.lambda_expected,
        "construction": surface.provenance.get("construction", "input"),
    }
    if extra:
        meta.update(extra)
    lines = [f"# biminimal-surface {json.dumps(meta, sort_keys=True)}"]
    for v in surface.psi.reshape(-1, sp.ncoords):
        lines.append("v " + " ".join(_FMT.format(x) for x in v))
    for i in range(nt - 1):
        for j in range(ns - 1):
            a = i * ns + j + 1
            b, c, d = a + ns, a + ns + 1, a + 1
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path) -> ImmersedSurface:
    meta, verts = None, []
    with open(Path(path)) as fh:
        for line in fh:
            if line.startswith("# biminimal-surface "):
                meta = json.loads(line[len("# biminimal-surface "):])
            elif line.startswith("v "):
                verts.append([float(x) for x in line.split()[1:]])
    if meta is None:
        raise ValueError(f"{path}: missing biminimal-surface header")
    sp = space_from_name(meta["space"], meta.get("radius", 1.0))
    tg, sg = GridSpec(*meta["t_grid"]), GridSpec(*meta["s_grid"])
    psi = np.asarray(verts, dtype=float).reshape(tg.n, sg.n, sp.ncoords)
    prov = {"construction": meta.get("construction", "input"), "source": str(path)}
    return ImmersedSurface(sp, sp.project(psi), tg, sg, int(meta.get("orientation", 1)), None, prov,
                           meta.get("lambda_expected"))


def write_svg(points, path, width: int = 480, height: int = 480, title: str = "") -> Path:
    """Polyline of the first two coordinates with labelled axis extents."""
    p = np.asarray(points, dtype=float)[:, :2]
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    m = 40
    scale = (min(width, height) - 2 * m) / span
    x = m + (p[:, 0] - lo[0]) * scale
    y = height - m - (p[:, 1] - lo[1]) * scale
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))
    x1, y0 = m + (hi[0] - lo[0]) * scale, height - m - (hi[1] - lo[1]) * scale
    svg = f"""<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">
<title>{title}</title>
<line x1="{m}" y1="{height - m}" x2="{x1:.3f}" y2="{height - m}" stroke="gray"/>
<line x1="{m}" y1="{height - m}" x2="{m}" y2="{y0:.3f}" stroke="gray"/>
<text x="{m}" y="{height - m + 16}" font-size="11">x={lo[0]:.4g}</text>
<text x="{x1:.3f}" y="{height - m + 16}" font-size="11" text-anchor="end">x={hi[0]:.4g}</text>
<text x="{m - 4}" y="{height - m}" font-size="11" text-anchor="end">y={lo[1]:.4g}</text>
<text x="{m - 4}" y="{y0:.3f}" font-size="11" text-anchor="end">y={hi[1]:.4g}</text>
<polyline fill="none" stroke="black" stroke-width="1" points="{pts}"/>
</svg>
"""
    path = Path(path)
    path.write_text(svg)
    return path


def write_json(obj, path) -> Path:
    path = Path(path)
    text = obj.to_json() if hasattr(obj, "to_json") else json.dumps(obj, sort_keys=True, indent=2) + "\n"
    path.write_text(text)
    return path
