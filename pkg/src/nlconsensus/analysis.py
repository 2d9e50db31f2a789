"""Lyapunov certificates and convergence-rate diagnostics for trajectories."""

from dataclasses import dataclass

import numpy as np

from .errors import Incomparable, InvariantViolation

B_TOL = 1e-12
V_TOL = 1e-9


@dataclass(frozen=True)
class AnalysisReport:
    v_monotone: bool
    first_violation: int | None
    max_conservation_drift: float
    consensus_time: float | None
    fitted_decay_rate: float | None
    sos_residual: float
    max_vdot: float

    def as_record(self):
        """Flat ``key -> str`` mapping for text serialization."""
        return {k: _fmt(v) for k, v in self.__dict__.items()}


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def lyapunov(xi, p, x):
    """``V(x) = sum_i xi_i * int_0^{x_i} h(s) ds``."""
    return float(np.dot(xi, p.integral(np.asarray(x, dtype=float))))


def b_matrix(xi, L):
    """Symmetrized weighted Laplacian ``(Xi L + L^T Xi) / 2``.

    Checks symmetry, zero row sums and nonpositive off-diagonals, relative
    to ``max(1, ||L||_inf)``, and raises ``InvariantViolation`` otherwise.
    """
    xi = np.asarray(xi, dtype=float)
    L = np.asarray(L, dtype=float)
    XL = xi[:, None] * L
    B = 0.5 * (XL + XL.T)

    scale = max(1.0, float(np.max(np.sum(np.abs(L), axis=1)))) if L.size else 1.0
    tol = B_TOL * scale
    asym = float(np.max(np.abs(B - B.T))) if B.size else 0.0
    rows = float(np.max(np.abs(B.sum(axis=1)))) if B.size else 0.0
    off = B - np.diag(np.diag(B))
    worst_off = float(np.max(off)) if B.size else 0.0
    if asym > tol:
        raise InvariantViolation(f"B is not symmetric (max deviation {asym:.3e})")
    if rows > tol:
        raise InvariantViolation(f"B has nonzero row sums (max {rows:.3e}); xi and L inconsistent?")
    if worst_off > tol:
        raise InvariantViolation(f"B has a positive off-diagonal entry {worst_off:.3e}")
    return B


def sos_sum(B, y):
    """``sum_{i>j} b_ij (y_i - y_j)^2`` by explicit pairwise expansion."""
    y = np.asarray(y, dtype=float)
    total = 0.0
    for i in range(1, len(y)):
        d = y[i] - y[:i]
        total += float(np.dot(B[i, :i], d * d))
    return total


def vdot_sos(B, p, x):
    """Time derivative of ``V`` along the flow, computed two ways.

    Returns the pairwise expansion and its absolute difference from the
    quadratic form ``-H^T B H``.
    """
    hx = p(np.asarray(x, dtype=float))
    quad = -float(hx @ B @ hx)
    sos = sos_sum(B, hx)
    return sos, abs(sos - quad)


def sector_inequality(B, p, x, alpha):
    """Both sides of the sector-bound comparison.

    Returns ``(lhs, rhs)`` with ``lhs = sum b_ij (h_i - h_j)^2`` and
    ``rhs = alpha^2 sum b_ij (x_i - x_j)^2``; a valid sector bound gives
    ``lhs <= rhs``.
    """
    x = np.asarray(x, dtype=float)
    return sos_sum(B, p(x)), alpha * alpha * sos_sum(B, x)


def first_crossing(traj, eps):
    """Earliest recorded time with disagreement ``<= eps``, or None."""
    hit = np.flatnonzero(traj.disagreement <= eps)
    return float(traj.t[hit[0]]) if hit.size else None


def fit_decay_rate(traj, floor=None):
    """Exponential rate of the disagreement by least squares on its log.

    Uses samples with ``10 * floor <= disagreement <= 0.5 * initial``,
    ``floor`` defaulting to the run's consensus tolerance. Needs at least
    three points in that window.
    """
    floor = traj.config.consensus_tol if floor is None else floor
    d = traj.disagreement
    if d.size == 0 or d[0] <= 0:
        return None
    mask = (d >= 10.0 * floor) & (d <= 0.5 * d[0])
    if np.count_nonzero(mask) < 3:
        return None
    slope = np.polyfit(traj.t[mask], np.log(d[mask]), 1)[0]
    return float(-slope)


def analyze(traj, xi, L, p, eps=None):
    """Check the Lyapunov, conservation and SOS certificates on ``traj``."""
    eps = traj.config.consensus_tol if eps is None else eps
    X = traj.x
    V = p.integral(X) @ xi
    allowance = V_TOL * (1.0 + abs(V[0]))
    rises = np.flatnonzero(np.diff(V) > allowance)
    first = int(rises[0] + 1) if rises.size else None

    x_xi = X @ xi
    drift = float(np.max(np.abs(x_xi - x_xi[0])))

    B = b_matrix(xi, L)
    residual = 0.0
    max_vdot = -np.inf
    for x in X:
        vdot, r = vdot_sos(B, p, x)
        residual = max(residual, r)
        max_vdot = max(max_vdot, vdot)

    return AnalysisReport(
        v_monotone=first is None,
        first_violation=first,
        max_conservation_drift=drift,
        consensus_time=first_crossing(traj, eps),
        fitted_decay_rate=fit_decay_rate(traj),
        sos_residual=float(residual),
        max_vdot=float(max_vdot),
    )


@dataclass(frozen=True)
class RateComparison:
    faster: str  # "A", "B" or "tie"
    time_a: float | None
    time_b: float | None
    rate_a: float | None
    rate_b: float | None
    eps: float

    @property
    def rate_ratio(self):
        if self.rate_a is None or self.rate_b is None or self.rate_b == 0:
            return None
        return self.rate_a / self.rate_b

    def as_record(self):
        return {k: (v if isinstance(v, str) else _fmt(v)) for k, v in self.__dict__.items()}


def compare_rates(traj_a, traj_b, eps):
    """Which run first brings the disagreement down to ``eps``.

    Crossing times are known only to the recording interval, so times
    closer than the coarser of the two intervals are declared a tie.
    """
    ta, tb = first_crossing(traj_a, eps), first_crossing(traj_b, eps)
    if ta is None and tb is None:
        raise Incomparable(f"neither run reaches disagreement {eps:g}")
    if tb is None:
        faster = "A"
    elif ta is None:
        faster = "B"
    else:
        resolution = max(traj_a.config.record_interval, traj_b.config.record_interval)
        if abs(ta - tb) < resolution:
            faster = "tie"
        else:
            faster = "A" if ta < tb else "B"
    return RateComparison(faster, ta, tb, fit_decay_rate(traj_a), fit_decay_rate(traj_b), eps)
