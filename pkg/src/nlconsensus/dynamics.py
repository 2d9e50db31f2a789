"""Fixed-step integration of ``x' = -L h(x)`` with consensus stopping."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonFiniteState, NotStronglyConnected
from .graph import build_laplacian, connectivity, left_eigenvector

DIVERGENCE_FACTOR = 1e6


class Termination(str, Enum):
    CONSENSUS = "ConsensusReached"
    TIME_LIMIT = "TimeLimit"
    DIVERGENCE = "Divergence"


@dataclass(frozen=True)
class SimulationConfig:
    dt: float = 1e-3
    t_max: float = 50.0
    consensus_tol: float = 1e-6
    record_every: int = 10
    integrator: str = "rk4"

    def __post_init__(self):
        object.__setattr__(self, "integrator", self.integrator.lower())
        if not (self.dt > 0 and self.t_max > 0 and self.dt < self.t_max):
            raise ValueError(f"need 0 < dt < t_max, got dt={self.dt}, t_max={self.t_max}")
        if not self.consensus_tol > 0:
            raise ValueError("consensus_tol must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be a positive integer")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}; use rk4 or euler")

    @property
    def record_interval(self):
        return self.dt * self.record_every


@dataclass(frozen=True)
class State:
    t: float
    x: np.ndarray


@dataclass(eq=False)
class Trajectory:
    """Recorded samples of one run.

    ``V`` and ``x_xi`` are NaN when the graph has no positive left
    eigenvector (unchecked runs on graphs that are not strongly connected).
    """

    t: np.ndarray
    x: np.ndarray
    V: np.ndarray
    x_xi: np.ndarray
    disagreement: np.ndarray
    terminated_by: Termination
    decision_value: float | None
    consensus_time: float | None
    config: SimulationConfig
    xi: np.ndarray | None = None
    steps: int = 0

    def __len__(self):
        return len(self.t)

    @property
    def n(self):
        return self.x.shape[1]

    @property
    def final_disagreement(self):
        return float(self.disagreement[-1])

    def oscillation_amplitude(self, fraction=0.1):
        """Peak-to-peak range of each agent over the last ``fraction`` of
        the run, maximised over agents."""
        t0 = self.t[-1] - fraction * (self.t[-1] - self.t[0])
        tail = self.x[self.t >= t0]
        return float(np.max(tail.max(axis=0) - tail.min(axis=0)))


def disagreement(x):
    return float(np.max(x) - np.min(x))


def weighted_average(xi, x):
    return float(np.dot(xi, x))


def derivative(L, p, x):
    return -(L @ p(x))


def _rk4(L, p, x, dt):
    k1 = -(L @ p(x))
    k2 = -(L @ p(x + 0.5 * dt * k1))
    k3 = -(L @ p(x + 0.5 * dt * k2))
    k4 = -(L @ p(x + dt * k3))
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _euler(L, p, x, dt):
    return x - dt * (L @ p(x))


_STEPPERS = {"rk4": _rk4, "euler": _euler}


def step(L, p, s, dt, integrator="rk4"):
    """Advance ``s`` by one step of length ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        x = _STEPPERS[integrator.lower()](np.asarray(L, dtype=float), p,
                                          np.asarray(s.x, dtype=float), dt)
    if not np.all(np.isfinite(x)):
        raise NonFiniteState(f"non-finite state after step at t={s.t + dt:g}")
    return State(s.t + dt, x)


def simulate(g, p, x0, cfg=None, certified=True):
    """Integrate the protocol on ``g`` from ``x0``.

    Stops at the first step whose disagreement ``max(x) - min(x)`` is at
    most ``cfg.consensus_tol``, at ``t_max``, or when the state blows up.
    Samples are recorded every ``cfg.record_every`` steps plus the final
    state. With ``certified=True`` the graph must be strongly connected.
    """
    cfg = cfg or SimulationConfig()
    x = np.array(x0, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"x0 has shape {x.shape}, graph has {g.n} nodes")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")

    report = connectivity(g)
    if certified and not report.strongly_connected:
        raise NotStronglyConnected(
            f"graph has {report.scc_count} strongly connected components")
    L = build_laplacian(g)
    xi = left_eigenvector(L) if report.strongly_connected else None

    advance = _STEPPERS[cfg.integrator]
    dt = cfg.dt
    n_steps = int(np.ceil(cfg.t_max / dt - 1e-9))
    bound = DIVERGENCE_FACTOR * (1.0 + float(np.max(np.abs(x))))
    tol = cfg.consensus_tol

    ts, xs = [0.0], [x.copy()]
    k = 0
    dis = float(x.max() - x.min())
    term = Termination.CONSENSUS if dis <= tol else None
    with np.errstate(over="ignore", invalid="ignore"):
        while term is None and k < n_steps:
            x = advance(L, p, x, dt)
            k += 1
            if not np.max(np.abs(x)) <= bound:  # also catches NaN
                term = Termination.DIVERGENCE
                break
            dis = float(x.max() - x.min())
            if dis <= tol:
                term = Termination.CONSENSUS
            if k % cfg.record_every == 0 or term is not None:
                ts.append(k * dt)
                xs.append(x.copy())
    if term is None:
        term = Termination.TIME_LIMIT
        if ts[-1] != k * dt:
            ts.append(k * dt)
            xs.append(x.copy())

    X = np.array(xs)
    dis_all = X.max(axis=1) - X.min(axis=1)
    if xi is not None:
        V = p.integral(X) @ xi
        x_xi = X @ xi
    else:
        V = np.full(len(ts), np.nan)
        x_xi = np.full(len(ts), np.nan)

    decision = float(np.mean(X[-1])) if term is Termination.CONSENSUS else None
    return Trajectory(
        t=np.array(ts), x=X, V=V, x_xi=x_xi, disagreement=dis_all,
        terminated_by=term, decision_value=decision,
        consensus_time=k * dt if term is Termination.CONSENSUS else None,
        config=cfg, xi=xi, steps=k,
    )
