"""s-harmonic functions on (-1, 1) vanishing at 0 to a prescribed order.

The exterior datum is (x^2 - 1)^s g(1/x) with a polynomial g; the
solution's Taylor coefficients at 0 are moments of g, so zeroing the first
k moments forces a zero of order k.
"""
import numpy as np

from fracnodal.sharm1d import construct_order, poisson_eval_1d, verify_order

for s in (0.25, 0.5, 0.75):
    for k in (1, 2, 3):
        td = construct_order(k, s)
        rep = verify_order(td, k, s)
        g = " + ".join(f"({c})t^{i}" for i, c in enumerate(td.coeffs) if c)
        print(f"s={s} k={k}: g = {g:28s} slope {rep['slope']:.4f} (target {2 * k}), "
              f"(-Delta)^s u / scale = {rep['frac_max_rel']:.1e}")

td = construct_order(2, 0.5)
xs = np.array([-0.6, -0.2, 0.0, 0.2, 0.6])
print("\nclosed form vs quadrature of the Poisson formula:")
print("  ", np.round(td(xs), 12))
print("  ", np.round([poisson_eval_1d(td, x, 0.5) for x in xs], 12))
