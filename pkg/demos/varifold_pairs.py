"""Varifolds from polylines and the compactness experiment for pairs.

Two parallel segments carrying the values +1 and -1 collapse onto one
segment of multiplicity 2 carrying the half-half measure.  The variant
whose fiber runs off to infinity fails tightness, and the experiment says
so instead of reporting a failed convergence.

Run with ``python demos/varifold_pairs.py``.
"""

import numpy as np

from youngkit import convergence as C
from youngkit import varifold as V

for n in (4, 16, 256, 10_000):
    P = V.regular_polygon(n)
    print(f"{n:6d}-gon: mass {V.from_polyline(P).mass():.8f}  first variation {V.first_variation_mass(P):.8f}"
          f"  (2 pi = {2 * np.pi:.8f})")

for variant in C.PAIR_VARIANTS:
    rep = C.pairs_compactness_experiment(variant, steps=100)
    print(f"\n{variant}: {rep['status']}  mass + first variation <= {rep['mass_bound']:.3f}"
          f"  tight: {rep['tightness']['tight']}")
    if rep["convergences"]:
        for key, c in rep["convergences"].items():
            print(f"  {key:8s} final deviation {c['weak_deviation'][-1]:.2e}  slope {c['slope']}")
    if "cluster_estimate" in rep:
        print("  heuristic limit estimate:", rep["cluster_estimate"])
