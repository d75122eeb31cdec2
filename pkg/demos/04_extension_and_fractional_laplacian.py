"""Poisson extension and two routes to the fractional Laplacian in 1-D.

dtn reads (-Delta)^s u off the extension near y = 0; the direct route
integrates the symmetric second difference against |h|^{-1-2s}.
"""
import numpy as np

from fracnodal.extension import (BoundaryDatum, bump_datum, cns_const, dtn, dtn_constant, frac_laplacian_direct,
                                 gamma_const, poisson_extend)

for s in (0.25, 0.5, 0.75):
    print(f"s={s}: gamma(1,s)={gamma_const(1, s):.15f}  C(1,s)={cns_const(1, s):.15f}  "
          f"dtn constant={dtn_constant(1, s):.15f}")

print("\nthe extension of u = x is x at every height")
lin = BoundaryDatum.polynomial([0.0, 1.0])
print("  ", [round(poisson_extend(lin, 0.3, y, 0.4), 12) for y in (0.1, 1.0, 5.0)])

b = bump_datum(0.2, 1.0)
print("\nbump centred at 0.2: dtn vs direct")
for s in (0.25, 0.5, 0.75):
    for x in (-0.5, 0.3, 0.9):
        d1, d2 = dtn(b, x, s), frac_laplacian_direct(b, x, s)
        print(f"  s={s:4} x={x:5}  dtn={d1: .10f}  direct={d2: .10f}  rel={abs(d1 - d2) / abs(d2):.1e}")

# polynomial data grow too fast for the plain integral; finite parts take over
sq = BoundaryDatum.polynomial([0.0, 0.0, 1.0])
print("\nx^2 at s=0.75:", frac_laplacian_direct(sq, 0.5, 0.75), dtn(sq, 0.5, 0.75))
# at s = 1/2 (a = 0) the even extension of x^2 is x^2 - y^2
print("extension of x^2 at (0.5, 0.4), s=1/2:", poisson_extend(sq, 0.5, 0.4, 0.5), "exact", 0.5**2 - 0.4**2)
