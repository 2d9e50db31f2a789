"""
Faster agreement with a nonlinear protocol
==========================================

Both protocols below have sector bound 1/2: h(w) = w/2 and the odd map that
is sqrt(|w|) inside the unit interval and w^2 outside. Far from agreement
the squared branch pulls much harder, and close to agreement the square
root branch does, so the nonlinear run wins at every disagreement level.
"""

from pathlib import Path

import numpy as np

from nlconsensus import (Linear, PiecewisePowerRoot, WeightedDigraph, b_matrix, build_laplacian,
                         compare_rates, left_eigenvector, sector_inequality, simulate)
from nlconsensus.plotting import plot_comparison

out = Path("demo_out")
out.mkdir(exist_ok=True)

g = WeightedDigraph(np.array([[0, 1, 1], [0, 0, 1], [1, 0, 0]], dtype=float))
x0 = [-0.4, 4.0, 0.8]
fast = simulate(g, PiecewisePowerRoot(), x0)
slow = simulate(g, Linear(0.5), x0)

for eps in (1.0, 1e-1, 1e-2, 1e-3, 1e-4):
    c = compare_rates(fast, slow, eps)
    print(f"eps = {eps:g}: piecewise t = {c.time_a:.2f}, linear t = {c.time_b:.2f}")

c = compare_rates(fast, slow, 1e-3)
print(f"fitted rates: piecewise {c.rate_a:.3f}, linear {c.rate_b:.3f}")

# The sector bound gives V' <= alpha^2 sum b_ij (x_i - x_j)^2 at every state.
L = build_laplacian(g)
B = b_matrix(left_eigenvector(L), L)
slack = [rhs - lhs for lhs, rhs in
         (sector_inequality(B, PiecewisePowerRoot(), x, 0.5) for x in fast.x)]
print(f"sector inequality over {len(slack)} states, smallest slack {min(slack):.2e}")

plot_comparison(fast, slow, out / "example2.svg", labels=("piecewise", "linear"))
