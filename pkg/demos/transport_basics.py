"""Transport distance between discrete measures, three ways.

Run with ``python demos/transport_basics.py``.
"""

import numpy as np

from youngkit import measure as M
from youngkit import testfunctions as T
from youngkit.transport import dual_lower_bound, w1_1d, w1_exact

# Two Dirac masses: the distance is the Euclidean distance of the points.
print("w1(delta_0, delta_(3,4)) =", w1_exact(M.dirac([0, 0]), M.dirac([3, 4]))[0])

# Against delta_0 the distance is the first moment.
mu = M.ProbabilityMeasure([[3, 4], [0, -1], [1, 0]], [0.5, 0.25, 0.25])
print("first moment", M.first_moment(mu), "== w1 to origin", w1_exact(M.dirac([0, 0]), mu)[0])

# On the line the quantile formula gives an independent value,
# and any 1-Lipschitz battery gives a lower bound.
rng = np.random.default_rng(0)
a = M.normalize(M.DiscreteMeasure(rng.normal(size=50), rng.random(50)))
b = M.normalize(M.DiscreteMeasure(rng.normal(2.0, 0.5, size=30), rng.random(30)))
cost, plan = w1_exact(a, b)
battery = T.truncated_linear_battery(1, indices=(2, 4, 8, 16))
print(f"network simplex {cost:.12f}")
print(f"quantile formula {w1_1d(a, b):.12f}")
print(f"dual lower bound {dual_lower_bound(a, b, battery):.12f}")
print("plan uses", len(plan.flow), "edges; first rows of its CSV:")
print("\n".join(plan.to_csv().splitlines()[:4]))
