"""Order of vanishing, tangent maps and strata at nodal points on y = 0."""
from fractions import Fraction

from fracnodal.blowup import classify_point, tangent_field, vanishing_order
from fracnodal.fields import poly_field
from fracnodal.poly import MultiPoly, garofalo_extend, planar_even

a = Fraction(1, 3)
af = float(a)
x = MultiPoly.variable(0, 2)
one = MultiPoly.constant(1)

cases = {
    "x": poly_field(af, even=x),
    "y|y|^-a": poly_field(af, odd=one),
    "x y|y|^-a": poly_field(af, odd=x),
    "planar_even(2)": poly_field(af, even=planar_even(2, a)),
    "planar_even(2) + x y|y|^-a": poly_field(af, even=planar_even(2, a), odd=x),
}
for name, u in cases.items():
    k_raw, k, parity = vanishing_order(u)
    c = classify_point(u)
    print(f"{name:28s} k_raw={k_raw:.6f} k={k:.4f} {parity:13s} {c.stratum:20s} spine={c.spine_dim}")

tf = tangent_field(cases["planar_even(2) + x y|y|^-a"])
print("\nper-part orders of the last field:", tf.k_even, tf.k_odd)

# in three dimensions the spine is the set of directions the trace ignores
x1, x2 = MultiPoly.variable(0, 3), MultiPoly.variable(1, 3)
for name, p in {"planar_even(2) in (x1, y)": planar_even(2, a).embed(3, [0, 2]),
                "extension of x1^2 - x2^2": garofalo_extend(x1 * x1 - x2 * x2, a)}.items():
    c = classify_point(poly_field(af, even=p))
    print(f"{name:28s} {c.stratum:12s} spine dimension {c.spine_dim}")
