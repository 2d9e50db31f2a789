import numpy as np
import pytest
from _support import EXAMPLE_L, EXAMPLE_XI, random_sc_digraph
from hypothesis import given, settings
from hypothesis import strategies as st

from nlconsensus import (
    Linear,
    LinearPlusSine,
    NonFiniteState,
    NotStronglyConnected,
    PiecewisePowerRoot,
    SimulationConfig,
    State,
    Termination,
    WeightedDigraph,
    build_laplacian,
    derivative,
    lyapunov,
    simulate,
    step,
    weighted_average,
)
from nlconsensus.protocol import Protocol


class Exploding(Protocol):
    def _h(self, w):
        return np.where(w == 0, 0.0, np.sign(w) * np.exp(np.abs(w) * 50))

    def _integral(self, a):
        return np.zeros_like(a)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(dt=0), dict(dt=2, t_max=1), dict(consensus_tol=0),
                                    dict(record_every=0), dict(record_every=1.5),
                                    dict(integrator="leapfrog")])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SimulationConfig(**kw)

    def test_defaults(self):
        cfg = SimulationConfig()
        assert (cfg.dt, cfg.t_max, cfg.consensus_tol, cfg.record_every, cfg.integrator) == (
            1e-3, 50.0, 1e-6, 10, "rk4")


class TestDerivative:
    @given(st.floats(-100, 100))
    def test_consensus_state_is_fixed(self, beta):
        for p in (Linear(1.0), LinearPlusSine(2.0), PiecewisePowerRoot()):
            np.testing.assert_allclose(derivative(EXAMPLE_L, p, np.full(3, beta)), 0,
                                       atol=1e-12 * max(1.0, p.evaluate(beta)))

    def test_example_identity_protocol(self):
        np.testing.assert_array_equal(derivative(EXAMPLE_L, Linear(1.0), np.array([1.0, 2, 3])),
                                      [3, 1, -2])

    def test_zero_state(self):
        assert not np.any(derivative(EXAMPLE_L, PiecewisePowerRoot(), np.zeros(3)))


class TestStep:
    def test_consensus_state_unchanged(self):
        s = step(EXAMPLE_L, LinearPlusSine(2.0), State(0.5, np.full(3, 1.25)), 0.01)
        assert s.t == pytest.approx(0.51)
        np.testing.assert_array_equal(s.x, np.full(3, 1.25))

    def test_euler_step(self):
        s = step(EXAMPLE_L, Linear(1.0), State(0.0, np.array([1.0, 2, 3])), 0.1, "euler")
        np.testing.assert_allclose(s.x, [1.3, 2.1, 2.8], atol=1e-15)

    def test_rk4_linear_matches_taylor(self):
        # for x' = A x one RK4 step is the degree-4 Taylor polynomial of exp(A dt)
        A, dt, x = -EXAMPLE_L, 0.1, np.array([1.0, 2, 3])
        taylor = x.copy()
        term = x.copy()
        for k in range(1, 5):
            term = dt * (A @ term) / k
            taylor += term
        np.testing.assert_allclose(step(EXAMPLE_L, Linear(1.0), State(0, x), dt).x, taylor, atol=1e-14)

    def test_rk4_step_halving_is_fifth_order(self, rng):
        L = build_laplacian(random_sc_digraph(rng, 5))
        p = LinearPlusSine(2.0)
        x0 = rng.uniform(-1, 1, 5)

        def gap(dt):
            one = step(L, p, State(0, x0), dt).x
            half = step(L, p, step(L, p, State(0, x0), dt / 2), dt / 2).x
            return np.max(np.abs(one - half))

        ratio = gap(0.02) / gap(0.01)
        assert 24 < ratio < 40  # 2**5 = 32

    def test_non_finite(self):
        with pytest.raises(NonFiniteState):
            step(EXAMPLE_L, Exploding(), State(0, np.array([20.0, 0.0, -20.0])), 0.1)

    def test_bad_dt(self):
        with pytest.raises(ValueError):
            step(EXAMPLE_L, Linear(1.0), State(0, np.zeros(3)), 0.0)


class TestWeightedAverage:
    def test_example_values(self):
        assert weighted_average(EXAMPLE_XI, [1, 2, 3]) == 2.25
        assert weighted_average(EXAMPLE_XI, [-0.4, 4, 0.8]) == pytest.approx(1.3, abs=1e-15)

    @given(st.floats(-1e6, 1e6))
    def test_consensus(self, beta):
        assert weighted_average(EXAMPLE_XI, np.full(3, beta)) == pytest.approx(beta, rel=1e-15)


class TestSimulate:
    def test_example1_case1(self, example_graph):
        tr = simulate(example_graph, LinearPlusSine(2.0), [1, 2, 3])
        assert tr.terminated_by is Termination.CONSENSUS
        assert tr.decision_value == pytest.approx(2.25, abs=1e-5)
        assert tr.final_disagreement <= 1e-6
        np.testing.assert_allclose(tr.xi, EXAMPLE_XI, atol=1e-12)

    @pytest.mark.parametrize("beta", [0.0, -3.5, 2.25])
    def test_start_in_agreement_space(self, example_graph, beta):
        tr = simulate(example_graph, PiecewisePowerRoot(), np.full(3, beta))
        assert tr.terminated_by is Termination.CONSENSUS
        assert tr.decision_value == beta and tr.consensus_time == 0
        assert len(tr) == 1

    def test_agreement_space_invariant_over_time(self):
        s = State(0.0, np.full(3, 0.7))
        for _ in range(1000):
            s = step(EXAMPLE_L, LinearPlusSine(2.0), s, 1e-3)
            assert np.all(s.x == 0.7)

    def test_example1_case2_persistent_disagreement(self, example_graph):
        tr = simulate(example_graph, LinearPlusSine(0.5), [1, 2, 3], certified=False)
        assert tr.terminated_by is Termination.TIME_LIMIT
        assert tr.decision_value is None
        assert tr.final_disagreement > 0.1
        assert tr.t[-1] == pytest.approx(50.0)

    def test_certified_requires_sc(self):
        g = WeightedDigraph([[0, 1], [0, 0]])
        with pytest.raises(NotStronglyConnected):
            simulate(g, Linear(1.0), [0, 1])

    def test_unchecked_leader_follower(self):
        # the follower converges to the leader; no left eigenvector, so V and x_xi are NaN
        g = WeightedDigraph([[0, 1], [0, 0]])
        tr = simulate(g, Linear(1.0), [0.0, 1.0], certified=False)
        assert tr.terminated_by is Termination.CONSENSUS
        assert tr.decision_value == pytest.approx(1.0, abs=1e-6)
        assert tr.xi is None and np.all(np.isnan(tr.V))

    def test_divergence(self, example_graph):
        tr = simulate(example_graph, Exploding(), [1.0, 0.0, -1.0],
                      SimulationConfig(dt=0.01, t_max=5), certified=False)
        assert tr.terminated_by is Termination.DIVERGENCE

    def test_sample_times_and_recording(self, example_graph):
        cfg = SimulationConfig(dt=0.01, t_max=1.0, record_every=7, consensus_tol=1e-12)
        tr = simulate(example_graph, Linear(1.0), [1, 2, 3], cfg)
        assert np.all(np.diff(tr.t) > 0)
        assert tr.t[0] == 0 and tr.t[-1] == pytest.approx(1.0)
        np.testing.assert_allclose(tr.t[1:-1], 0.07 * np.arange(1, len(tr) - 1))

    def test_diagnostic_columns(self, example_graph):
        p = LinearPlusSine(2.0)
        tr = simulate(example_graph, p, [1, 2, 3])
        for k in (0, len(tr) // 2, -1):
            assert tr.V[k] == pytest.approx(lyapunov(EXAMPLE_XI, p, tr.x[k]), rel=1e-14)
            assert tr.x_xi[k] == pytest.approx(EXAMPLE_XI @ tr.x[k], rel=1e-14)
            assert tr.disagreement[k] == np.ptp(tr.x[k])

    def test_x0_shape_checked(self, example_graph):
        with pytest.raises(ValueError):
            simulate(example_graph, Linear(1.0), [1, 2])

    def test_euler_integrator(self, example_graph):
        cfg = SimulationConfig(integrator="Euler")
        tr = simulate(example_graph, Linear(1.0), [1, 2, 3], cfg)
        assert tr.decision_value == pytest.approx(2.25, abs=1e-5)

    def test_bounded_and_lyapunov_on_random_instances(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            g = random_sc_digraph(rng, n)
            p = [Linear(1.0), LinearPlusSine(2.0), PiecewisePowerRoot()][int(rng.integers(3))]
            x0 = rng.uniform(-2, 2, n)
            tr = simulate(g, p, x0, SimulationConfig(dt=2e-3, t_max=20))
            assert np.max(np.abs(tr.x)) <= np.max(np.abs(x0)) + 1e-9
            assert np.all(np.diff(tr.V) <= 1e-9 * (1 + tr.V[0]))
            assert np.max(np.abs(tr.x_xi - tr.xi @ x0)) <= 1e-8
            if tr.terminated_by is Termination.CONSENSUS:
                assert abs(tr.decision_value - tr.xi @ x0) <= 10 * tr.config.consensus_tol

    def test_example_conservation_long_horizon(self, example_graph):
        # no early stop: conservation over the full t <= 50 window
        cfg = SimulationConfig(consensus_tol=1e-300)
        for p, x0 in ((LinearPlusSine(2.0), [1, 2, 3]), (PiecewisePowerRoot(), [-0.4, 4, 0.8])):
            tr = simulate(example_graph, p, x0, cfg)
            assert np.max(np.abs(tr.x_xi - EXAMPLE_XI @ np.array(x0))) <= 1e-8

    def test_oscillation_amplitude(self, example_graph):
        tr = simulate(example_graph, LinearPlusSine(0.5), [1, 2, 3], certified=False)
        assert tr.oscillation_amplitude() < 1e-3  # settles to a non-consensus equilibrium
