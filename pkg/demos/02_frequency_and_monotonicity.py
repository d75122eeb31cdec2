"""Almgren frequency, doubling, Weiss and Monneau on exact fields.

A homogeneous solution has constant frequency equal to its degree.  Adding
higher-order terms makes N(r) increase from the order of vanishing at 0+
towards the top degree at large r.
"""
from fractions import Fraction

import numpy as np

from fracnodal.fields import poly_field
from fracnodal.monotonicity import (almgren, doubling_check, geometric_radii, logH_derivative_check, monneau,
                                    weiss)
from fracnodal.poly import MultiPoly, planar_even, planar_odd

a = Fraction(-1, 2)
af = float(a)
radii = geometric_radii(1.0, 8)
x = MultiPoly.variable(0, 2)

hom = poly_field(af, even=planar_even(4, a))
prof = almgren(hom, radii=radii)
print("planar_even(4): N(r) =", np.round(prof.N, 12))
print("  doubling ratios min/max:", doubling_check(prof, N_bound=4)["min_ratio"],
      doubling_check(prof, N_bound=4)["max_ratio"])

comp = poly_field(af, even=x + planar_even(2, a) + planar_odd(3, a))
prof = almgren(comp, radii=radii)
print("\nx + planar_even(2) + planar_odd(3):")
for r, N in zip(prof.radii, prof.N):
    print(f"  r={r:.5f}  N={N:.8f}")
print("  monotone:", prof.monotone())
print("  extrapolated N(0+):", prof.limit())
print("  log H identity, max relative deviation:", logH_derivative_check(prof)["max_rel_deviation"])

# Weiss at the matching order vanishes for homogeneous fields
print("\nWeiss W_4 on planar_even(4):", np.max(np.abs(weiss(hom, k=4, radii=radii).W)))
# Monneau against the order-2 blow-up of planar_even(2) + planar_even(4) grows like r^4
p2 = planar_even(2, a)
m = monneau(poly_field(af, even=p2 + planar_even(4, a)), None, p2, 2, radii=radii)
print("Monneau M(r)/r^4:", np.round(m.M / m.radii**4, 12))
