import numpy as np
import pytest
from _support import EXAMPLE_L, EXAMPLE_XI, random_sc_digraph
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nlconsensus import (
    Incomparable,
    InvariantViolation,
    Linear,
    LinearPlusSine,
    PiecewisePowerRoot,
    SimulationConfig,
    WeightedDigraph,
    analyze,
    b_matrix,
    build_laplacian,
    compare_rates,
    fit_decay_rate,
    left_eigenvector,
    lyapunov,
    sector_inequality,
    simulate,
    vdot_sos,
)
from nlconsensus.analysis import first_crossing, sos_sum

EXAMPLE_B = np.array([[1 / 2, -1 / 8, -3 / 8], [-1 / 8, 1 / 4, -1 / 8], [-3 / 8, -1 / 8, 1 / 2]])


def _random_sym_laplacian(rng, n):
    W = rng.uniform(0, 3, (n, n)) * (rng.random((n, n)) < 0.6)
    W = np.triu(W, 1)
    W = W + W.T
    return np.diag(W.sum(axis=1)) - W


class TestLyapunov:
    def test_zero(self):
        for p in (Linear(1.0), LinearPlusSine(2.0), PiecewisePowerRoot()):
            assert lyapunov(EXAMPLE_XI, p, np.zeros(3)) == 0.0

    def test_identity_protocol(self):
        assert lyapunov(EXAMPLE_XI, Linear(1.0), [1, 2, 3]) == pytest.approx(2.875, abs=1e-15)

    @settings(deadline=None)
    @given(arrays(float, 3, elements=st.floats(-10, 10)).filter(lambda x: np.any(np.abs(x) > 1e-6)))
    def test_positive_off_origin(self, x):
        for p in (Linear(0.5), LinearPlusSine(2.0), PiecewisePowerRoot()):
            assert lyapunov(EXAMPLE_XI, p, x) > 0


class TestBMatrix:
    def test_example(self):
        np.testing.assert_allclose(b_matrix(EXAMPLE_XI, EXAMPLE_L), EXAMPLE_B, atol=1e-15)
        np.testing.assert_allclose(EXAMPLE_B.sum(axis=1), 0, atol=1e-15)

    def test_symmetric_uniform(self, rng):
        L = _random_sym_laplacian(rng, 5)
        np.testing.assert_allclose(b_matrix(np.full(5, 0.2), L), L / 5, atol=1e-15)

    def test_zero(self):
        assert not np.any(b_matrix(np.full(3, 1 / 3), np.zeros((3, 3))))

    def test_inconsistent_pair(self):
        with pytest.raises(InvariantViolation):
            b_matrix(np.full(3, 1 / 3), EXAMPLE_L)

    def test_invariants_on_random_sc(self, rng):
        for _ in range(200):
            L = build_laplacian(random_sc_digraph(rng, int(rng.integers(2, 9))))
            B = b_matrix(left_eigenvector(L), L)
            assert np.array_equal(B, B.T)
            assert np.max(np.abs(B.sum(axis=1))) <= 1e-12 * max(1, np.abs(L).max())
            assert np.all(B[~np.eye(len(B), dtype=bool)] <= 1e-15)


class TestVdot:
    @given(st.floats(-50, 50))
    def test_consensus_state(self, beta):
        for p in (Linear(1.0), LinearPlusSine(2.0), PiecewisePowerRoot()):
            vdot, res = vdot_sos(EXAMPLE_B, p, np.full(3, beta))
            assert vdot == 0 and res <= 1e-12 * max(1, p.evaluate(beta) ** 2)

    def test_example_identity(self):
        vdot, res = vdot_sos(EXAMPLE_B, Linear(1.0), [1, 2, 3])
        assert vdot == pytest.approx(-1.75, abs=1e-15)
        assert res <= 1e-12

    def test_sos_identity_random(self, rng):
        for _ in range(300):
            n = int(rng.integers(2, 9))
            B = _random_sym_laplacian(rng, n)
            y = rng.uniform(-3, 3, n)
            # Pairwise expansion written out independently of sos_sum
            pairs = -sum(B[i, j] * (y[j] - y[i]) ** 2 for i in range(n) for j in range(i + 1, n))
            assert abs(y @ B @ y - pairs) <= 1e-10
            assert abs(-y @ B @ y - sos_sum(B, y)) <= 1e-10

    def test_vdot_matches_finite_difference(self, example_graph):
        p = LinearPlusSine(2.0)
        x = np.array([1.0, 2.0, 3.0])
        h = 1e-6
        xdot = -(EXAMPLE_L @ p(x))
        fd = (lyapunov(EXAMPLE_XI, p, x + h * xdot) - lyapunov(EXAMPLE_XI, p, x - h * xdot)) / (2 * h)
        vdot, _ = vdot_sos(EXAMPLE_B, p, x)
        assert vdot == pytest.approx(fd, rel=1e-7)


class TestSectorInequality:
    def test_holds_with_declared_bound(self, rng):
        B = EXAMPLE_B
        for p in (Linear(0.5), LinearPlusSine(2.0), PiecewisePowerRoot()):
            for x in rng.uniform(-3, 3, (200, 3)):
                lhs, rhs = sector_inequality(B, p, x, p.declared_sector_bound)
                assert lhs <= 0 and rhs <= 0
                assert rhs - lhs >= -1e-12

    def test_fails_with_too_large_alpha(self):
        lhs, rhs = sector_inequality(EXAMPLE_B, Linear(1.0), [1, 2, 3], 2.0)
        assert rhs < lhs


class TestAnalyze:
    def test_example1_case1(self, example_graph):
        p = LinearPlusSine(2.0)
        tr = simulate(example_graph, p, [1, 2, 3])
        rep = analyze(tr, EXAMPLE_XI, EXAMPLE_L, p)
        assert rep.v_monotone and rep.first_violation is None
        assert rep.max_conservation_drift <= 1e-8
        assert rep.consensus_time is not None and rep.consensus_time <= tr.t[-1]
        assert rep.fitted_decay_rate > 0
        assert rep.sos_residual <= 1e-10 and rep.max_vdot <= 0

    def test_constant_trajectory(self, example_graph):
        p = Linear(1.0)
        tr = simulate(example_graph, p, [4, 4, 4])
        rep = analyze(tr, EXAMPLE_XI, EXAMPLE_L, p)
        assert rep.v_monotone and rep.max_conservation_drift == 0 and rep.consensus_time == 0

    def test_example1_case2_reports(self, example_graph):
        p = LinearPlusSine(0.5)
        tr = simulate(example_graph, p, [1, 2, 3], certified=False)
        rep = analyze(tr, EXAMPLE_XI, EXAMPLE_L, p)
        assert rep.consensus_time is None
        assert rep.max_conservation_drift <= 1e-8
        if not rep.v_monotone:
            assert 0 < rep.first_violation < len(tr)

    def test_detects_rising_v(self, example_graph):
        p = Linear(1.0)
        tr = simulate(example_graph, p, [1, 2, 3])
        tr.x = tr.x[::-1].copy()  # run backwards in time: V increases
        rep = analyze(tr, EXAMPLE_XI, EXAMPLE_L, p)
        assert not rep.v_monotone and 0 < rep.first_violation < len(tr)

    def test_record(self, example_graph):
        p = Linear(1.0)
        rec = analyze(simulate(example_graph, p, [1, 2, 3]), EXAMPLE_XI, EXAMPLE_L, p).as_record()
        assert rec["v_monotone"] == "true" and rec["first_violation"] == "none"


class TestRates:
    X0 = [-0.4, 4.0, 0.8]

    def test_example2(self, example_graph):
        a = simulate(example_graph, PiecewisePowerRoot(), self.X0)
        b = simulate(example_graph, Linear(0.5), self.X0)
        cmp = compare_rates(a, b, 1e-3)
        assert cmp.faster == "A" and cmp.time_a < cmp.time_b

    def test_identical_is_tie(self, example_graph):
        a = simulate(example_graph, Linear(0.5), self.X0)
        cmp = compare_rates(a, a, 1e-3)
        assert cmp.faster == "tie" and cmp.time_a == cmp.time_b

    def test_linear_rate_scales_with_alpha(self, example_graph):
        # x' = -a L x: time rescaling by a, so fitted rates differ by exactly a factor 2
        a = simulate(example_graph, Linear(2.0), self.X0)
        b = simulate(example_graph, Linear(1.0), self.X0)
        cmp = compare_rates(a, b, 1e-3)
        assert cmp.faster == "A"
        assert cmp.rate_ratio == pytest.approx(2.0, rel=0.2)
        # independent check: slowest nonzero mode of L for the identity protocol
        lam = np.sort(np.linalg.eigvals(EXAMPLE_L).real)[1]
        assert cmp.rate_b == pytest.approx(lam, rel=0.2)

    def test_incomparable(self, example_graph):
        cfg = SimulationConfig(t_max=0.1)
        a = simulate(example_graph, Linear(0.5), self.X0, cfg)
        with pytest.raises(Incomparable):
            compare_rates(a, a, 1e-3)

    def test_one_sided(self, example_graph):
        slow = simulate(example_graph, Linear(0.5), self.X0, SimulationConfig(t_max=1.0))
        fast = simulate(example_graph, Linear(0.5), self.X0)
        assert compare_rates(slow, fast, 1e-3).faster == "B"
        assert compare_rates(fast, slow, 1e-3).faster == "A"

    def test_fit_window(self, example_graph):
        tr = simulate(example_graph, Linear(1.0), [0, 0, 0])
        assert fit_decay_rate(tr) is None
        assert first_crossing(tr, 1e-3) == 0.0

    def test_sector_rate_at_least_linear(self, example_graph):
        # a protocol with slope bound a converges at least as fast as Linear(a), 20% fit tolerance
        for p in (PiecewisePowerRoot(), LinearPlusSine(2.0)):
            alpha = p.declared_sector_bound
            rp = fit_decay_rate(simulate(example_graph, p, self.X0))
            rl = fit_decay_rate(simulate(example_graph, Linear(alpha), self.X0))
            assert rp >= 0.8 * rl


def test_leader_follower_has_no_b_matrix():
    g = WeightedDigraph([[0, 1], [0, 0]])
    L = build_laplacian(g)
    with pytest.raises(InvariantViolation):
        b_matrix(np.array([0.5, 0.5]), L)
