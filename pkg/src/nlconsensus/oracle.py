"""Brute-force reference computations for cross-checking the main modules.

Each oracle uses a method unrelated to the code it checks: Warshall closure
instead of Tarjan, fully pivoted elimination instead of a bordered solve,
forward Euler instead of RK4. They favour clarity over speed.
"""

import numpy as np

from .errors import NonFiniteState


def reachability(g):
    """Transitive closure along information flow.

    ``reach[i, j]`` is true when node ``j``'s value can reach node ``i``,
    i.e. there is a chain of edges ``e_{i k1}, e_{k1 k2}, ..., e_{km j}``.
    The diagonal is always true.
    """
    w = np.asarray(g.weights)
    n = w.shape[0]
    reach = [[bool(w[i][j] > 0) or i == j for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            if not reach[i][k]:
                continue
            for j in range(n):
                if reach[k][j]:
                    reach[i][j] = True
    return np.array(reach, dtype=bool)


def is_strongly_connected(g):
    return bool(np.all(reachability(g)))


def nullspace_bruteforce(M, tol=1e-9):
    """Basis of the numerical null space of ``M`` by full-pivot elimination.

    Pivots with magnitude at or below ``tol * max|M|`` are treated as zero.
    Returns a list of vectors, one per free column, each with a unit entry
    in its free coordinate.
    """
    A = [list(map(float, row)) for row in np.asarray(M, dtype=float)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    big = max((abs(v) for row in A for v in row), default=0.0)
    thresh = tol * (big if big > 0 else 1.0)
    perm = list(range(cols))  # perm[k] = original column now at position k

    rank = 0
    for r in range(min(rows, cols)):
        best, bi, bj = 0.0, -1, -1
        for i in range(r, rows):
            for j in range(r, cols):
                if abs(A[i][j]) > best:
                    best, bi, bj = abs(A[i][j]), i, j
        if best <= thresh:
            break
        A[r], A[bi] = A[bi], A[r]
        for row in A:
            row[r], row[bj] = row[bj], row[r]
        perm[r], perm[bj] = perm[bj], perm[r]
        piv = A[r][r]
        A[r] = [v / piv for v in A[r]]
        for i in range(rows):
            if i != r and A[i][r] != 0.0:
                f = A[i][r]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        rank += 1

    basis = []
    for free in range(rank, cols):
        v = [0.0] * cols
        v[perm[free]] = 1.0
        for r in range(rank):
            v[perm[r]] = -A[r][free]
        basis.append(np.array(v))
    return basis


def euler_reference(L, protocol, x0, dt_fine, t_end):
    """Forward-Euler state of ``x' = -L h(x)`` at ``t_end``.

    The last step is shortened so the result lands exactly on ``t_end``.
    """
    L = np.asarray(L, dtype=float)
    x = np.array(x0, dtype=float)
    steps = int(np.floor(t_end / dt_fine + 1e-9))
    for _ in range(steps):
        x = x - dt_fine * (L @ protocol(x))
    rest = t_end - steps * dt_fine
    if rest > 1e-15:
        x = x - rest * (L @ protocol(x))
    if not np.all(np.isfinite(x)):
        raise NonFiniteState("Euler reference produced a non-finite state")
    return x
