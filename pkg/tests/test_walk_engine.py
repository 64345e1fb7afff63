import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from cliquewalk import generators as g
from cliquewalk import walk_engine as we
from cliquewalk.errors import EpsilonAtSimpleWalk, InvalidParams, TooLarge
from cliquewalk.graph_core import edge_key
from cliquewalk.mixing_theory import epsilon_from_delta, qk_exceptional_point
from cliquewalk.spectrum import eigenvalues_symmetric, spectrum_of


class TestChebyshev:
    def test_initial_values(self):
        assert we.chebyshev_U(-1, 0.7) == 0.0
        assert we.chebyshev_U(0, 0.7) == 1.0
        assert we.chebyshev_U(1, 0.7) == 1.4

    def test_u2_at_half(self):
        assert abs(we.chebyshev_U(2, 0.5)) < 1e-15

    def test_trig_identity(self):
        theta = math.pi / 5
        k = 7
        want = math.sin((k + 1) * theta) / math.sin(theta)
        assert abs(we.chebyshev_U(k, math.cos(theta)) - want) < 1e-12


class TestQkScalar:
    def test_q1_closed_form(self):
        for (d, l, delta, y) in [(3, 2, 0.0, 0.8), (2, 4, 0.3, -1.7), (3, 5, 0.2, 1.1)]:
            base = (l - 1) * (1 - delta) * (d - 1 + delta)
            want = 2 * y * math.sqrt(base) + (l - 2) * (1 - delta)
            logq, sign = we.qk_scalar(1, y, d, l, delta)
            assert sign == (1 if want > 0 else -1)
            assert abs(math.exp(logq) - abs(want)) < 1e-12

    def test_growth_dominant_solution(self):
        # q_k ~ A z^k for |y| > 1; compare against the explicit coefficient
        d, l, delta, y, k = 3, 2, 0.0, 1.2, 500
        z = y + math.sqrt(y * y - 1)
        base = (l - 1) * (1 - delta) * (d - 1 + delta)
        sb = math.sqrt(base)
        c2 = (l - 2) * (1 - delta)
        c3 = (1 - delta) * math.sqrt((l - 1) * (1 - delta)) / math.sqrt(d - 1 + delta)
        coeff = (sb * z * z + c2 * z - c3) / (z * z - 1)
        logq, _ = we.qk_scalar(k, y, d, l, delta)
        assert abs(logq - (k * math.log(z) + math.log(coeff))) < 1e-6
        assert abs(logq / k - math.log(z)) < 2e-3

    def test_exceptional_point_high_precision(self):
        d, l, delta = 2, 4, 0.0
        with mpmath.workprec(8000):
            y0 = (mpmath.mpf(-d) - (l - 2)) / (2 * mpmath.sqrt(mpmath.mpf((l - 1) * (d - 1))))
            logq, _ = we.qk_scalar(2000, y0, d, l, delta)
        assert abs(logq / 2000 - math.log(1 / math.sqrt(3))) < 2e-2

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            we.qk_scalar(0, 0.5, 3, 2, 0.0)
        with pytest.raises(InvalidParams):
            we.qk_scalar(3, 0.5, 3, 2, 1.0)


class TestQkEmpiricalGrowth:
    def test_flat_branch(self):
        got = we.qk_empirical_growth(0.37, 3, 2, 0.0, 1000)
        assert abs(got - 1.0) < 0.03

    def test_positive_growth(self):
        want = 1.5 + math.sqrt(1.25)
        got = we.qk_empirical_growth(1.5, 3, 2, 0.0, 1000)
        assert abs(got - want) / want < 0.01

    def test_negative_growth(self):
        want = 1.5 + math.sqrt(1.25)
        got = we.qk_empirical_growth(-1.5, 3, 2, 0.0, 1000)
        assert abs(got - want) / want < 0.01

    def test_exceptional_point(self):
        d, l, delta = 2, 4, 0.0
        with mpmath.workprec(8000):
            y0 = (mpmath.mpf(-d) - (l - 2)) / (2 * mpmath.sqrt(mpmath.mpf((l - 1) * (d - 1))))
            got = we.qk_empirical_growth(y0, d, l, delta, 2000)
        assert abs(got - 1 / math.sqrt(3)) / (1 / math.sqrt(3)) < 0.05

    def test_k_max_floor(self):
        with pytest.raises(InvalidParams):
            we.qk_empirical_growth(0.5, 3, 2, 0.0, 100)


class TestMatrixRoutes:
    def test_rk1_is_adjacency(self, petersen):
        rk = we.Rk_recurrence(petersen, 0.0, 1)
        assert np.array_equal(rk[1], petersen.graph.adjacency_matrix(dtype=float))

    def test_petersen_r2(self, petersen):
        a = petersen.graph.adjacency_matrix(dtype=float)
        rk = we.Rk_recurrence(petersen, 0.0, 2)
        assert np.allclose(rk[2], a @ a - 3 * np.eye(10), atol=1e-12)

    def test_qk1_is_adjacency(self, rook3):
        q1 = we.Qk_matrix(rook3, 0.3, 1)
        assert np.allclose(q1, rook3.graph.adjacency_matrix(dtype=float), atol=1e-12)

    def test_qk2_formula(self, rook3):
        d, l, delta = 2, 3, 0.4
        a = rook3.graph.adjacency_matrix(dtype=float)
        want = (a @ a - (l - 2) * (1 - delta) * a
                - d * (l - 1) * (1 - delta) * np.eye(rook3.n))
        assert np.allclose(we.Qk_matrix(rook3, delta, 2), want, atol=1e-10)

    def test_rook4_cross_route(self, rook4):
        rk = we.Rk_recurrence(rook4, 0.25, 6)
        for k in range(1, 7):
            qk = we.Qk_matrix(rook4, 0.25, k)
            scale = np.max(np.abs(rk[k]))
            assert np.max(np.abs(rk[k] - qk)) <= 1e-8 * scale

    def test_qk_rejects_delta_one(self, rook3):
        with pytest.raises(InvalidParams):
            we.Qk_matrix(rook3, 1.0, 3)

    def test_five_cycle_brute_force_k3(self):
        crg = g.cycle(5)
        bf = we.brute_force_weighted_walks(crg, 0.0, 3)
        rk = we.Rk_recurrence(crg, 0.0, 3)
        assert np.allclose(rk[3], bf, atol=1e-12)
        qk = we.Qk_matrix(crg, 0.0, 3)
        assert np.allclose(qk, bf, atol=1e-10)


class TestTransitionMatrix:
    def test_first_step_uniform(self, petersen):
        p1 = we.transition_matrix(petersen, 0.1, 1)
        a = petersen.graph.adjacency_matrix(dtype=float)
        assert np.allclose(p1, a / 3, atol=1e-15)

    def test_five_cycle_nbrw_two_steps(self):
        crg = g.cycle(5)
        p2 = we.transition_matrix(crg, 0.0, 2)
        for u in range(5):
            row = {v: p2[u, v] for v in range(5) if p2[u, v] > 0}
            assert row == {(u + 2) % 5: 0.5, (u - 2) % 5: 0.5}

    def test_rows_sum_to_one(self, latin4):
        for k in (1, 5, 12):
            p = we.transition_matrix(latin4, 0.2, k)
            assert np.max(np.abs(p.sum(axis=1) - 1)) < 1e-10
            assert p.min() >= 0.0

    def test_matches_lifted_chain(self, petersen):
        p3 = we.transition_matrix(petersen, 0.0, 3)
        chain = we.build_lifted_chain(petersen, 0.0)
        for u in range(petersen.n):
            assert np.max(np.abs(p3[u] - we.lifted_k_step(chain, u, 3))) < 1e-12

    def test_eps_boundary_rejected(self, petersen):
        with pytest.raises(EpsilonAtSimpleWalk):
            we.transition_matrix(petersen, 1 / 3, 4)

    def test_simple_walk_path(self, petersen):
        p = we.simple_walk_matrix(petersen, 4)
        a = petersen.graph.adjacency_matrix(dtype=float) / 3
        assert np.allclose(p, np.linalg.matrix_power(a, 4), atol=1e-14)


class TestMuIk:
    def test_stationary_eigenvalue(self):
        for k in (1, 7, 40):
            assert abs(we.mu_ik(6.0, k, 2, 4, 0.0) - 1.0) < 1e-10

    def test_petersen_matches_matrix_eigenvalue(self, petersen):
        k = 4
        p = we.transition_matrix(petersen, 0.0, k)
        eigs = sorted(eigenvalues_symmetric(p).eigenvalues)
        mus = sorted(we.mu_ik(lam, k, 3, 2, 0.0)
                     for lam in spectrum_of(petersen).eigenvalues)
        assert np.max(np.abs(np.array(eigs) - np.array(mus))) < 1e-10

    def test_minus_d_mode_rate(self):
        # at lambda_i = -d the decay rate collapses to 1/(l-1)
        k = 30
        mu = we.mu_ik(-2.0, k, 2, 4, 0.0)
        assert abs(abs(mu) ** (1 / k) - 1 / 3) < 0.02 * (1 / 3)

    def test_simple_walk_delta_one(self):
        assert we.mu_ik(2.0, 3, 2, 4, 1.0) == (2.0 / 6.0) ** 3

    def test_spectral_consistency_multiset(self, rook3):
        delta = 0.3
        eps = epsilon_from_delta(delta, rook3.d)
        for k in (5, 10):
            p = we.transition_matrices(rook3, eps, k)[-1]
            eigs = sorted(eigenvalues_symmetric(p).eigenvalues)
            mus = sorted(we.mu_ik(lam, k, rook3.d, rook3.l, delta)
                         for lam in spectrum_of(rook3).eigenvalues)
            assert np.max(np.abs(np.array(eigs) - np.array(mus))) < 1e-8

    def test_sandwich_inequality(self, petersen):
        lam = spectrum_of(petersen).eigenvalues
        n = petersen.n
        for k in range(1, 21):
            p = we.transition_matrices(petersen, 0.0, k)[-1]
            mu_k = max(abs(we.mu_ik(x, k, 3, 2, 0.0)) for x in lam[1:])
            s_k = np.max(np.abs(p - 1 / n))
            assert mu_k / n <= s_k + 1e-12
            assert s_k <= mu_k + 1e-12


class TestLiftedChain:
    def test_row_sums(self, rook3):
        chain = we.build_lifted_chain(rook3, 0.1)
        assert np.max(np.abs(chain.transition.sum(axis=1) - 1)) < 1e-12
        assert len(chain.states) == rook3.n * rook3.d

    def test_five_cycle_deterministic(self):
        chain = we.build_lifted_chain(g.cycle(5), 0.0)
        assert np.all(np.sort(chain.transition, axis=1)[:, -1] == 1.0)

    def test_k4_two_successors(self):
        crg = g.line_graph(g.cycle(3).graph)  # triangle, edges as cliques? no:
        # use K4 with edges as cliques directly
        from cliquewalk.graph_core import validate
        h = g.complete_graph(4)
        crg = validate(h, h.edges())
        chain = we.build_lifted_chain(crg, 0.0)
        for row in chain.transition:
            nz = row[row > 0]
            assert len(nz) == 2
            assert np.allclose(nz, 0.5)

    def test_uniform_at_simple_walk(self, petersen):
        chain = we.build_lifted_chain(petersen, 1 / 3)
        p5 = we.simple_walk_matrix(petersen, 5)
        for u in range(petersen.n):
            assert np.max(np.abs(we.lifted_k_step(chain, u, 5) - p5[u])) < 1e-12

    def test_k1_uniform_over_neighbors(self, latin4):
        chain = we.build_lifted_chain(latin4, 0.2)
        dist = we.lifted_k_step(chain, 0, 1)
        for v in range(latin4.n):
            want = 1 / 9 if v in latin4.graph.adj[0] else 0.0
            assert abs(dist[v] - want) < 1e-15

    def test_tv_distance_shrinks(self, latin4):
        chain = we.build_lifted_chain(latin4, 0.2)
        n = latin4.n

        def tv(k):
            dist = we.lifted_k_step(chain, 0, k)
            return 0.5 * np.sum(np.abs(dist - 1 / n))

        assert tv(10) < tv(5) < tv(2)


class TestBruteForce:
    def test_k1_is_adjacency(self, rook3):
        bf = we.brute_force_weighted_walks(rook3, Fraction(1, 2), 1)
        assert np.array_equal(bf.astype(float), rook3.graph.adjacency_matrix(dtype=float))

    def test_five_cycle_delta1_k2(self):
        crg = g.cycle(5)
        bf = we.brute_force_weighted_walks(crg, 1, 2)
        a = crg.graph.adjacency_matrix()
        assert np.array_equal(np.array(bf.tolist(), dtype=np.int64), a @ a)

    def test_octahedron_exact_fractions(self, octahedron):
        for delta in (Fraction(0), Fraction(1, 2), Fraction(1)):
            bf = we.brute_force_weighted_walks(octahedron, delta, 4)
            rk = we.Rk_recurrence(octahedron, delta, 4, exact=True)
            assert np.all(bf == rk[4])

    def test_caps(self, rook3):
        with pytest.raises(TooLarge):
            we.brute_force_weighted_walks(g.rook_graph(6), 0.0, 2)
        with pytest.raises(TooLarge):
            we.brute_force_weighted_walks(rook3, 0.0, 7)


class TestMonteCarlo:
    def test_deterministic(self, petersen):
        a = we.monte_carlo(petersen, 0.1, 0, 5, trials=40000, seed=9)
        b = we.monte_carlo(petersen, 0.1, 0, 5, trials=40000, seed=9)
        assert np.array_equal(a.counts, b.counts)

    def test_worker_invariance(self, petersen):
        a = we.monte_carlo(petersen, 0.1, 0, 5, trials=100000, seed=3, workers=1)
        b = we.monte_carlo(petersen, 0.1, 0, 5, trials=100000, seed=3, workers=4)
        assert np.array_equal(a.counts, b.counts)

    def test_cycle_nbrw_deterministic_walk(self):
        crg = g.cycle(5)
        res = we.monte_carlo(crg, 0.0, 0, 3, trials=100, seed=1)
        assert set(np.round(res.dist, 12)) <= {0.0, 0.5}

    def test_binomial_consistency(self, petersen):
        k, trials = 6, 50000
        res = we.monte_carlo(petersen, 0.0, 0, k, trials=trials, seed=42)
        exact = we.transition_matrix(petersen, 0.0, k)[0]
        se = np.sqrt(exact * (1 - exact) / trials)
        dev = np.abs(res.dist - exact)
        assert np.all(dev <= 5 * np.maximum(se, 1e-12))

    def test_simple_walk_consistency(self, petersen):
        # eps = 1/d must reproduce the plain nearest-neighbor walk
        k, trials = 4, 60000
        res = we.monte_carlo(petersen, 1 / 3, 0, k, trials=trials, seed=11)
        exact = we.simple_walk_matrix(petersen, k)[0]
        se = np.sqrt(exact * (1 - exact) / trials)
        assert np.all(np.abs(res.dist - exact) <= 5 * np.maximum(se, 1e-12))

    def test_staying_walk_consistency(self, latin4):
        k, trials = 8, 50000
        res = we.monte_carlo(latin4, 0.2, 3, k, trials=trials, seed=7)
        exact = we.transition_matrix(latin4, 0.2, k)[3]
        se = np.sqrt(exact * (1 - exact) / trials)
        assert np.all(np.abs(res.dist - exact) <= 5 * np.maximum(se, 1e-12))
        assert abs(res.dist.sum() - 1.0) < 1e-12


class TestEmpiricalRate:
    def test_petersen(self, petersen):
        est = we.empirical_mixing_rate(petersen, 0.0, 200)
        want = 1 / math.sqrt(2)
        assert abs(est.rate - want) / want < 0.05

    def test_diagnostics_present(self, petersen):
        est = we.empirical_mixing_rate(petersen, 0.0, 100)
        assert est.diagnostics["fit_to"] <= 100
        assert est.diagnostics["slope"] < 0

    def test_k_max_floor(self, petersen):
        with pytest.raises(InvalidParams):
            we.empirical_mixing_rate(petersen, 0.0, 20)


class TestVerification:
    def test_petersen_passes(self, petersen):
        rep = we.run_verification(petersen, 0.1, 8)
        assert rep.passed

    def test_rook3_passes(self, rook3):
        rep = we.run_verification(rook3, 0.2, 12)
        assert rep.passed

    def test_large_graph_skips_oracle(self):
        crg = g.prism(16)  # n = 32 > 20
        rep = we.run_verification(crg, 0.0, 6)
        assert rep.passed
        oracle = [c for c in rep.checks if "oracle" in c.name]
        assert oracle and oracle[0].skipped
