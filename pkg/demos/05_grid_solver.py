"""Finite-volume solver for the weighted equation on a half box.

Even solutions get a zero-flux condition on y = 0; odd ones vanish there.
We watch the error shrink at second order and read the conormal derivative
of an odd solution off the grid.
"""
from fractions import Fraction

import numpy as np

from fracnodal.poly import MultiPoly, QuasiPoly, planar_even
from fracnodal.solver import GridDomain, conormal_derivative, convergence_study, max_principle_holds, solve_extension

for a in (-0.5, 0.0, 0.5):
    p = planar_even(4, Fraction(a))
    st = convergence_study(p, a, Ns=(17, 33, 65, 129), method="direct")
    print(f"a={a:5}: errors {np.array2string(st['errors'], precision=3)}  orders {np.round(st['orders'], 3)}")

a = 1 / 3
q = QuasiPoly(MultiPoly.constant(1), Fraction(1, 3))
f = solve_extension(q, "antisymmetric", a, GridDomain.square(65), method="direct")
print("\nodd solution y|y|^-a: conormal derivative at x=0.2:", conormal_derivative(f, 0.2), "expected", 1 - a)

g = solve_extension(lambda P: np.sin(3 * P[:, 0]) * np.cos(P[:, 1]), a=a, grid=GridDomain.square(65))
print("generic data: maximum principle holds:", max_principle_holds(g), " residual history:", g.history[-1])
