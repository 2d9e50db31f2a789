"""Weighted digraphs, their Laplacians, and connectivity certificates.

Edge orientation: ``weights[i, j] = a_ij > 0`` means node ``i`` receives
information from node ``j``, so information flows ``j -> i``. Every
reachability statement in this module follows information flow.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNullspace, NonPositiveEntry, NotStronglyConnected

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Nonnegative adjacency matrix with zero diagonal.

    The stored array is a read-only copy, so instances are safe to share.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise ValueError(f"adjacency must be a nonempty square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("adjacency contains non-finite entries")
        if np.any(w < 0):
            i, j = np.argwhere(w < 0)[0]
            raise ValueError(f"negative weight a[{i},{j}] = {w[i, j]}")
        if np.any(np.diag(w) != 0):
            i = int(np.flatnonzero(np.diag(w))[0])
            raise ValueError(f"self-loop at node {i}: a[{i},{i}] = {w[i, i]}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.weights.shape[0]

    def edges(self):
        """List of ``(i, j, a_ij)`` for every present edge, row-major."""
        return [(int(i), int(j), float(self.weights[i, j]))
                for i, j in np.argwhere(self.weights > 0)]

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.weights.shape == other.weights.shape and bool(
            np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())

    @classmethod
    def from_edges(cls, n, edges):
        w = np.zeros((n, n))
        for i, j, a in edges:
            w[i, j] = a
        return cls(w)


@dataclass(frozen=True)
class ConnectivityReport:
    strongly_connected: bool
    has_spanning_tree: bool
    scc_count: int
    root_candidates: frozenset
    components: tuple = ()


def build_laplacian(g):
    """Graph Laplacian ``L = D - A``.

    The diagonal is the negated sum of the row's off-diagonal entries, so
    row sums vanish exactly for integer weights and to rounding otherwise.
    """
    L = np.subtract(0.0, g.weights)  # avoids -0.0 entries
    L[np.diag_indices_from(L)] = -L.sum(axis=1)
    return L


def _support_from_laplacian(L):
    L = np.asarray(L, dtype=float)
    A = -L.copy()
    np.fill_diagonal(A, 0.0)
    return A > 0


def strongly_connected_components(adj):
    """Tarjan's algorithm, iterative, on a boolean adjacency matrix.

    ``adj[u, v]`` true means an arc ``u -> v``. Components are returned in
    reverse topological order of the condensation (sinks first).
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[u]).tolist() for u in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, k = work.pop()
            if k == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for pos in range(k, len(succ[v])):
                w = succ[v][pos]
                if index[w] == -1:
                    work.append((v, pos + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def connectivity(g):
    """Strong connectivity and directed-spanning-tree certificate for ``g``.

    A root candidate is a node whose value reaches every other node along
    information flow. Such nodes exist iff the condensation has a single
    source component, and then they are exactly that component's members.
    """
    flow = (np.asarray(g.weights) > 0).T  # flow[j, i]: j -> i
    comps = strongly_connected_components(flow)
    label = np.empty(g.n, dtype=int)
    for c, members in enumerate(comps):
        label[list(members)] = c

    has_incoming = np.zeros(len(comps), dtype=bool)
    for j, i in np.argwhere(flow):
        if label[j] != label[i]:
            has_incoming[label[i]] = True
    sources = np.flatnonzero(~has_incoming)
    roots = frozenset(comps[sources[0]]) if len(sources) == 1 else frozenset()

    return ConnectivityReport(
        strongly_connected=len(comps) == 1,
        has_spanning_tree=bool(roots),
        scc_count=len(comps),
        root_candidates=roots,
        components=tuple(comps),
    )


def _scale(L):
    s = float(np.max(np.sum(np.abs(L), axis=1))) if L.size else 0.0
    return s if s > 0 else 1.0


def rank_defect(L, tol=DEFAULT_TOL):
    """``n`` minus the numerical rank of ``L``.

    Singular values at or below ``tol * ||L||_inf`` count as zero.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if not np.any(L):
        return n
    sv = np.linalg.svd(L, compute_uv=False)
    return int(n - np.count_nonzero(sv > tol * _scale(L)))


def left_eigenvector(L, tol=DEFAULT_TOL):
    """Positive left null vector of ``L`` normalized to unit sum.

    Solves ``L^T xi = 0`` with the last equation replaced by
    ``sum(xi) = 1``. ``tol`` is relative to ``||L||_inf`` and bounds the
    residual, the null-space dimension test and the positivity margin.

    Raises
    ------
    NotStronglyConnected
        The off-diagonal support of ``L`` is not strongly connected.
    DegenerateNullspace
        ``L^T`` does not have a one-dimensional numerical null space.
    NonPositiveEntry
        Some component of the normalized vector is ``<= tol``.
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if n == 1:
        return np.ones(1)

    support = _support_from_laplacian(L)
    if len(strongly_connected_components(support)) != 1:
        raise NotStronglyConnected("Laplacian support is not strongly connected")

    scale = _scale(L)
    defect = rank_defect(L.T, tol)
    if defect != 1:
        raise DegenerateNullspace(f"null space of L^T has dimension {defect}, expected 1")

    M = L.T.copy()
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    xi = np.linalg.solve(M, rhs)

    resid = np.max(np.abs(L.T @ xi))
    if resid > tol * scale:
        raise DegenerateNullspace(f"residual ||L^T xi||_inf = {resid:.3e} exceeds tolerance")
    if np.any(xi <= tol):
        raise NonPositiveEntry(f"left eigenvector has non-positive entry: {xi}")
    return xi
