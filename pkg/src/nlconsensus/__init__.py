"""Nonlinear consensus protocols on weighted directed graphs.

Agents follow ``x_i' = sum_j a_ij (h(x_j) - h(x_i))`` for a strictly
increasing ``h``. On a strongly connected digraph every agent converges to
``xi^T x(0)``, where ``xi`` is the positive, unit-sum left null vector of
the graph Laplacian. The package simulates the flow and checks the
Lyapunov and conservation certificates along each run.
"""

from .analysis import (
    AnalysisReport,
    RateComparison,
    analyze,
    b_matrix,
    compare_rates,
    fit_decay_rate,
    lyapunov,
    sector_inequality,
    vdot_sos,
)
from .dynamics import (
    SimulationConfig,
    State,
    Termination,
    Trajectory,
    derivative,
    simulate,
    step,
    weighted_average,
)
from .errors import (
    ConsensusError,
    DegenerateNullspace,
    Incomparable,
    InvariantViolation,
    NonFiniteState,
    NonMonotone,
    NonPositiveEntry,
    NotStronglyConnected,
    ParseError,
)
from .graph import (
    ConnectivityReport,
    WeightedDigraph,
    build_laplacian,
    connectivity,
    left_eigenvector,
    rank_defect,
)
from .protocol import (
    Linear,
    LinearPlusSine,
    MonotonicityReport,
    PiecewisePowerRoot,
    Protocol,
    TableDefined,
    check_monotone,
    parse_protocol,
    sector_bound,
)

__version__ = "0.1.0"
