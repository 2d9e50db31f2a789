"""
Reading a graph: connectivity, left eigenvector and the B matrix
================================================================

A consensus run is only certified on a strongly connected digraph. This
script walks through the checks on the three-agent example graph and on a
leader-follower pair that has a spanning tree but is not strongly connected.
"""

import numpy as np

from nlconsensus import (WeightedDigraph, b_matrix, build_laplacian, connectivity,
                         left_eigenvector, rank_defect)

# a_ij = 1 means agent i listens to agent j
A = np.array([[0, 1, 1],
              [0, 0, 1],
              [1, 0, 0]], dtype=float)
g = WeightedDigraph(A)
L = build_laplacian(g)
print("Laplacian:\n", L)

report = connectivity(g)
print("strongly connected:", report.strongly_connected)
print("rank defect of L:", rank_defect(L))

# Positive, unit-sum left null vector. Agent 3 is heard by two agents, so it
# carries twice the weight of the others in the group decision.
xi = left_eigenvector(L)
print("xi =", xi)
x0 = np.array([1.0, 2.0, 3.0])
print("group decision xi^T x0 =", xi @ x0)

# B is symmetric with zero row sums, the Laplacian of an undirected graph.
B = b_matrix(xi, L)
print("B =\n", B)
print("eigenvalues of B:", np.round(np.linalg.eigvalsh(B), 12) + 0.0)

# Agent 2 follows agent 1 and nobody follows agent 2.
leader = WeightedDigraph.from_edges(2, [(1, 0, 1.0)])
rep = connectivity(leader)
print("\nleader-follower: strongly connected =", rep.strongly_connected,
      "| spanning tree =", rep.has_spanning_tree,
      "| root candidates (0-based) =", sorted(rep.root_candidates))
