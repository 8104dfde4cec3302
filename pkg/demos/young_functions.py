"""Young functions, their graph measures and disintegration.

Run with ``python demos/young_functions.py``.
"""

import numpy as np

from youngkit import graph as G
from youngkit import young as Y

sites = [((x,), 0.25) for x in (0.0, 0.25, 0.5, 0.75)]

# A two-valued function x -> {x, -x} becomes a Young function with half-half fibers.
two = Y.from_q_valued(sites, [lambda x: x, lambda x: -x])
for x, w, fib in two.sites():
    print(f"x={x[0]:.2f} base weight {w} fiber points {fib.points[:, 0].tolist()} weights {fib.weights.tolist()}")

# Its graph measure lives on the product space; disintegrating it gives the pair back.
graph = G.build(two)
base, again = G.disintegrate(graph)
print("graph atoms:", len(graph), "| roundtrip equal:", again == two)

# Sitewise convolution adds values; the Lipschitz constant is subadditive.
shift = Y.from_function(sites, lambda x: 2 * x + 1)
conv = Y.convolve_yf(two, shift)
print("lip(two) =", Y.lipschitz_bound(two), " lip(shift) =", Y.lipschitz_bound(shift),
      " lip(conv) =", Y.lipschitz_bound(conv))

# Tightness: a fixed amount of mass running off in the fiber direction is never tight.
escaping = [G.GraphMeasure([[0.0]], [[float(i)]], [0.3]) for i in range(1, 40)]
print(G.tightness_profile(escaping, [0.0], 1.0, np.geomspace(1, 32, 6), tolerance=0.1).to_csv())
