"""Straight lines through the centre of a radially conformal plane.

With metric e^{2f(r)}(dx^2 + dy^2) a line through the origin is a geodesic;
its bitension points along the line with coefficient f''' + 3f''f' + f'^3,
so it is always free biminimal, and biharmonic when the bracket vanishes.
f = ln(a r^2 + b r + c) makes the bracket vanish identically.
"""
import numpy as np

from biminimal import conformal as cf
from biminimal import geometry as geo
from biminimal.numerics import GridSpec

grid = GridSpec.from_step(0.2, 4.0, 1e-3)
for label, prof in [("ln(r^2+1)", cf.RadialProfile.analytic(1, 0, 1)),
                    ("r", cf.RadialProfile.polynomial([0, 1])),
                    ("r^2", cf.RadialProfile.polynomial([0, 0, 1]))]:
    chk = cf.free_biminimal_check_radial(prof, grid, direction=(1.0, 2.0))
    print(f"f={label:10s} normal part {chk.normal_max:.1e}   "
          f"tangential max {np.max(np.abs(chk.tangential)):.3g} (formula error {chk.tangential_error:.1e})")

off = cf.free_biminimal_check_radial(cf.RadialProfile.analytic(1, 0, 1), GridSpec.from_step(-1, 1, 1e-2),
                                     point=(0.0, 0.4))
print(f"line missing the centre: flags={off.flags}, normal part {off.normal_max:.2f}")

rng = np.random.default_rng(0)
r = np.linspace(0, 5, 501)
worst = 0.0
for _ in range(50):
    a, c = rng.uniform(0.1, 3, 2)
    b = rng.uniform(-1.8, 3) * np.sqrt(a * c)
    worst = max(worst, np.max(np.abs(cf.biharmonic_profile_residual(cf.RadialProfile.analytic(a, b, c), r))))
print(f"50 random ln(ar^2+br+c): worst bracket {worst:.1e}")

K0 = geo.gaussian_curvature(cf.enneper_metric(), np.zeros(2))
print(f"Gauss curvature of (r^2+1)^2 (dx^2+dy^2) at the origin: {K0:.6f}")
