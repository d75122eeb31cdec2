"""The named corpus with its ground truth, and a look at the acceptance suite."""
import sys
from fractions import Fraction

from fracnodal.acceptance import matrix, run_acceptance
from fracnodal.blowup import classify_point
from fracnodal.corpus import build_corpus

import numpy as np

a = Fraction(1, 3)
for e in build_corpus(a, solver=False):
    if e.kind == "sharm1d":
        print(f"{e.name:30s} {e.kind:9s} order {e.degree}")
        continue
    for pt in e.points:
        c = classify_point(e.field(), np.array(pt.point))
        ok = (c.stratum, c.parity, c.spine_dim) == (pt.stratum, pt.parity, pt.spine_dim)
        print(f"{e.name:30s} {e.kind:9s} at {pt.point}: truth {pt.stratum:18s} found {c.stratum:18s} "
              f"{'ok' if ok else 'MISMATCH'}")

if "--acceptance" in sys.argv:
    print()
    print(matrix(run_acceptance()))
