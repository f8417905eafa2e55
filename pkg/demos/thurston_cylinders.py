"""Vertical cylinders in Thurston geometries and the multiplier shift.

Over a base curve gamma, the cylinder is biminimal for lam exactly when gamma
is biminimal for lam + 1 (Heisenberg, SL(2,R)), lam + 4 (Hopf) or lam
(products).  Both residuals are shown at the paired value and at a wrong one.
"""
from biminimal import catalog as ct
from biminimal import presets as ps
from biminimal import surfaces as sf
from biminimal.numerics import GridSpec

pairs = [("heisenberg", "r2-shifted", 0.0), ("sl2r", "h2-free", -1.0), ("hopf", "s2half-free", -4.0),
         ("s2xr", "s2-free", 0.0), ("h2xr", "h2-constant", -1.25)]
for kind, preset, lam in pairs:
    grid = GridSpec(0.0, 1.0, 81) if kind == "hopf" else GridSpec(-1, 1, 81)
    for trial in (lam, lam + 0.5):
        c, s = ct.correspondence_check(kind, ps.curve_preset(preset), trial, grid, 10, 4)
        print(f"{kind:10s} surface lam={trial:+.2f}: surface {s.residual_max:.1e}   "
              f"curve lam={c.lambda_used:+.2f}: {c.residual_max:.1e}")

for kind, preset in [("heisenberg", "r2-shifted"), ("sl2r", "h2-free")]:
    surf = ct.build_catalog_surface(kind, ps.curve_preset(preset), GridSpec(-1, 1, 41), 20)
    sd = sf.shape_data(surf, 4)
    i, j = surf.shape[0] // 2, surf.shape[1] // 2
    B = sd.B[i, j]
    print(f"{kind}: B = [[{B[0, 0]:.4f}, {B[0, 1]:.4f}], [{B[1, 0]:.4f}, {B[1, 1]:.4f}]] "
          f"(k = {surf.strip.k_gamma[i]:.4f}), Ric(N) = {sd.ric_N[i, j]:.4f}")
