"""Shared numerical primitives: uniform grids, difference stencils, RK4, alignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "central_diff",
    "gradient",
    "second_gradient",
    "rk4",
    "rigid_align",
    "loglog_slope",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``s_min, s_min + h, ..., s_max`` with ``n`` samples."""

    s_min: float
    s_max: float
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise ValueError(f"grid needs at least 5 samples, got n={self.n}")
        if not self.s_max > self.s_min:
            raise ValueError("grid spacing must be positive (s_max > s_min)")

    @classmethod
    def from_step(cls, s_min: float, s_max: float, h: float) -> "GridSpec":
        """Grid with spacing as close to ``h`` as fits an integer number of steps."""
        n = int(round((s_max - s_min) / h)) + 1
        return cls(float(s_min), float(s_min + (n - 1) * h), n)

    @property
    def h(self) -> float:
        return (self.s_max - self.s_min) / (self.n - 1)

    @property
    def s(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.n)

    def subgrid(self, stride: int) -> "GridSpec":
        n = (self.n - 1) // stride + 1
        return GridSpec(self.s_min, self.s_min + (n - 1) * stride * self.h, n)

    def as_dict(self) -> dict:
        return {"s_min": self.s_min, "s_max": self.s_max, "n": self.n, "h": self.h}


_STENCILS = {
    # (order, accuracy): (offsets, weights) for (h ** order) * derivative
    (1, 2): ((-1, 1), (-0.5, 0.5)),
    (1, 4): ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
    (2, 2): ((-1, 0, 1), (1.0, -2.0, 1.0)),
    (2, 4): ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
}


def central_diff(y, h: float, order: int = 1, axis: int = 0, accuracy: int = 2) -> np.ndarray:
    """Central difference of ``y`` along ``axis``.

    Samples whose stencil would leave the array are set to NaN, so the output
    has the same shape as ``y`` and stays aligned with the grid.
    """
    try:
        offsets, weights = _STENCILS[(order, accuracy)]
    except KeyError:
        raise ValueError(f"no central stencil for order={order}, accuracy={accuracy}") from None
    y = np.moveaxis(np.asarray(y, dtype=float), axis, 0)
    n = y.shape[0]
    m = max(abs(o) for o in offsets)
    out = np.full_like(y, np.nan)
    if n > 2 * m:
        acc = np.zeros_like(y[m:n - m])
        for o, w in zip(offsets, weights):
            acc += w * y[m + o:n - m + o]
        out[m:n - m] = acc / h**order
    return np.moveaxis(out, 0, axis)


def gradient(y, h: float, axis: int = 0) -> np.ndarray:
    """Second-order first derivative on the full grid (one-sided at the ends)."""
    return np.gradient(np.asarray(y, dtype=float), h, axis=axis, edge_order=2)


def second_gradient(y, h: float, axis: int = 0) -> np.ndarray:
    """Second-order second derivative on the full grid (one-sided at the ends)."""
    y = np.moveaxis(np.asarray(y, dtype=float), axis, 0)
    out = np.empty_like(y)
    out[1:-1] = y[2:] - 2 * y[1:-1] + y[:-2]
    out[0] = 2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]
    out[-1] = 2 * y[-1] - 5 * y[-2] + 4 * y[-3] - y[-4]
    return np.moveaxis(out / h**2, 0, axis)


def rk4(f, y0, s, project=None) -> np.ndarray:
    """Classical fixed-step RK4 for ``y' = f(s, y)`` on the sample points ``s``.

    ``project`` (optional) maps each new state back onto a constraint set, e.g.
    renormalising a frame.  Returns an array of shape ``(len(s),) + y0.shape``.
    """
    y = np.array(y0, dtype=float)
    out = np.empty((len(s),) + y.shape)
    out[0] = y
    for i in range(len(s) - 1):
        a, h = s[i], s[i + 1] - s[i]
        k1 = f(a, y)
        k2 = f(a + h / 2, y + h / 2 * k1)
        k3 = f(a + h / 2, y + h / 2 * k2)
        k4 = f(a + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if project is not None:
            y = project(y)
        out[i + 1] = y
    return out


def rigid_align(points, target, allow_reflection: bool = True):
    """Best rigid motion (Kabsch) taking ``points`` onto ``target``.

    Returns ``(aligned, max_distance)``.  With ``allow_reflection`` the motion
    may be orientation reversing, i.e. any isometry of Euclidean space.
    """
    p = np.asarray(points, dtype=float)
    q = np.asarray(target, dtype=float)
    pc, qc = p.mean(axis=0), q.mean(axis=0)
    u, _, vt = np.linalg.svd((p - pc).T @ (q - qc))
    if not allow_reflection and np.linalg.det(u @ vt) < 0:
        u[:, -1] *= -1
    rot = u @ vt
    aligned = (p - pc) @ rot + qc
    return aligned, float(np.max(np.linalg.norm(aligned - q, axis=1)))


def loglog_slope(h, err) -> float:
    """Least-squares slope of ``log(err)`` against ``log(h)``."""
    lh, le = np.log(np.asarray(h, float)), np.log(np.asarray(err, float))
    return float(np.polyfit(lh, le, 1)[0])
