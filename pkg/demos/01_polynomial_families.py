"""Exact solutions of div(|y|^a grad u) = 0 built from rational arithmetic.

We build the planar even/odd families, check that the operator kills them
exactly (symbolically in a, too), extend an x-polynomial off the
hyperplane, and write one family member out as JSON.
"""
from fractions import Fraction

from fracnodal.poly import (MultiPoly, antisymmetric_from_symmetric, apply_La, garofalo_extend, planar_even,
                            planar_odd, poly_to_json, symbolic_a)

a = Fraction(1, 3)

print("planar_even(2, a) with a symbolic:")
A = symbolic_a()
p = planar_even(2, A)
print("  ", p, "\n   residual is zero:", apply_La(p, A).is_zero())

print("\nfamily members at a = 1/3 and their residuals")
for k in range(2, 9):
    q = planar_even(k, a) if k % 2 == 0 else planar_odd(k, a)
    print(f"  k={k}: {len(q)} terms, homogeneous={q.is_homogeneous(k)}, residual zero={apply_La(q, a).is_zero()}")

# extension of a trace: the series stops once the x-Laplacian vanishes
x1, x2 = MultiPoly.variable(0, 3), MultiPoly.variable(1, 3)
trace = x1 * x1 * x2 * x2
q = garofalo_extend(trace, a)
print("\nextension of x1^2 x2^2:\n  ", q)
print("   trace recovered:", q.trace() == trace, " residual zero:", apply_La(q, a).is_zero())

# antisymmetric solutions: v * y|y|^{-a} with v solving the 2 - a problem
odd = antisymmetric_from_symmetric(planar_even(2, 2 - a), a)
print("\nantisymmetric solution of homogeneity", odd.homogeneity)

print("\nJSON form of planar_even(4, 1/3):")
print(poly_to_json(planar_even(4, a), a))
