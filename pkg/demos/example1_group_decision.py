"""
Group decision under h(w) = alpha w + sin w
===========================================

With alpha = 2 the map is strictly increasing and the agents agree on the
weighted average xi^T x0 = 2.25. With alpha = 0.5 the map folds back on
itself, and the same start gets stuck at an equilibrium that is not
consensus. Plots go to ``demo_out/``.
"""

from pathlib import Path

import numpy as np

from nlconsensus import (LinearPlusSine, WeightedDigraph, analyze, build_laplacian,
                         check_monotone, simulate)
from nlconsensus.plotting import plot_trajectory

out = Path("demo_out")
out.mkdir(exist_ok=True)

g = WeightedDigraph(np.array([[0, 1, 1], [0, 0, 1], [1, 0, 0]], dtype=float))
L = build_laplacian(g)
x0 = [1.0, 2.0, 3.0]

# Case 1: monotone protocol
p = LinearPlusSine(2.0)
print(check_monotone(p, -10, 10))
tr = simulate(g, p, x0)
print(f"{tr.terminated_by.value} at t = {tr.consensus_time:.3f}, x = {tr.x[-1]}")
rep = analyze(tr, tr.xi, L, p)
print(f"V monotone: {rep.v_monotone}, drift of xi^T x: {rep.max_conservation_drift:.1e}, "
      f"fitted rate: {rep.fitted_decay_rate:.3f}")
plot_trajectory(tr, out / "example1_case1.svg", "h(w) = 2w + sin w")

# Case 2: h decreases near w = pi, so certified mode would refuse it
p = LinearPlusSine(0.5)
mono = check_monotone(p, -10, 10)
print("\nmonotone:", mono.monotone_on_range, "witness:", mono.witness)
tr = simulate(g, p, x0, certified=False)
print(f"{tr.terminated_by.value}, final state {np.round(tr.x[-1], 4)}, "
      f"disagreement {tr.final_disagreement:.4f}")
# V still decreases: it is the agreement, not the descent, that fails
print("V monotone along the run:", analyze(tr, tr.xi, L, p).v_monotone)
plot_trajectory(tr, out / "example1_case2.svg", "h(w) = 0.5w + sin w")
