"""Nodal sets of planar solutions and their length.

For a homogeneous polynomial the zero set is a union of rays, so its length
in the unit disk is twice the number of real roots of p(t, 1).
"""
from fractions import Fraction

from fracnodal.corpus import harmonic_planar
from fracnodal.fields import poly_field
from fracnodal.nodal import (crossing_count, linear_fit_report, measure_boxcount, measure_vs_frequency,
                             real_root_count, split_regular_singular)
from fracnodal.poly import planar_even

Ns, lengths = [], []
for k in range(1, 7):
    u = poly_field(0.0, even=harmonic_planar(k))
    m = measure_boxcount(u, R=1.0)
    c = crossing_count(u, directions=32, lines=101)
    rep = measure_vs_frequency(u, R=1.0)
    Ns.append(rep["N"])
    lengths.append(m.value)
    print(f"harmonic k={k}: box-count {m.value:.4f}  Minkowski {m.extra['minkowski']:.4f}  "
          f"Crofton {c.value:.4f}  max crossings/line {c.extra['max_per_line']}")
print("length against N:", linear_fit_report(Ns, lengths))

a = Fraction(1, 3)
p = planar_even(4, a)
u = poly_field(float(a), even=p)
print(f"\nplanar_even(4, 1/3): {real_root_count(p)} real roots, length {measure_boxcount(u).value:.4f}")
reg, sing = split_regular_singular(u, N=201)
print(f"regular nodal vertices {len(reg)}, singular {len(sing)} near {sing.mean(axis=0) if len(sing) else None}")
