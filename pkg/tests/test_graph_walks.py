import numpy as np
import pytest

from quantumwalks.classical import fit_exponent
from quantumwalks.core import (
    DimensionError,
    DomainError,
    InitSpec,
    WalkState,
    position_distribution,
    total_variation,
    uniform_distribution,
)
from quantumwalks.graph_walks import (
    Graph,
    GraphWalk,
    averaged_distribution,
    averaged_trajectory,
    cycle_average_mixing_time,
    distribution_trajectory,
    graph_walk_evolve,
    hamming_weights,
    hypercube_mixing,
    hypercube_walk,
    instantaneous_mixing_time,
    limiting_average,
    mixing_window,
    shift_matrix,
    skw_search,
    skw_steps,
)
from quantumwalks.line_walks import evolve, grover_matrix, hadamard_matrix

X = np.array([[0, 1], [1, 0]])


class TestGraph:
    def test_asymmetric_rejected(self):
        with pytest.raises(DomainError):
            Graph(((1,), ()))

    def test_degrees(self):
        g = Graph.hypercube(3)
        assert g.regular_degree() == 3 and g.n_edges == 12
        assert Graph.from_edges(3, [(0, 1), (1, 2)]).regular_degree() is None

    def test_non_regular_walk(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        with pytest.raises(DimensionError):
            graph_walk_evolve(g, hadamard_matrix(), None, 1)

    def test_coin_dimension(self):
        with pytest.raises(DimensionError):
            graph_walk_evolve(Graph.cycle(5), grover_matrix(3), None, 1)


class TestShift:
    @pytest.mark.parametrize("g", [Graph.cycle(7), Graph.cycle(2), Graph.hypercube(4)])
    @pytest.mark.parametrize("shift", ["moving", "flip_flop"])
    def test_permutation_matrix(self, g, shift):
        m = shift_matrix(g, shift)
        assert set(np.unique(m)) <= {0.0, 1.0}
        np.testing.assert_array_equal(m.sum(axis=0), 1)
        np.testing.assert_array_equal(m.sum(axis=1), 1)
        np.testing.assert_array_equal(m @ m.T, np.eye(m.shape[0]))


class TestGroverCoin:
    @pytest.mark.parametrize("d", [2, 3, 4, 8])
    def test_reflection(self, d):
        g = grover_matrix(d)
        assert np.max(np.abs(g - g.T)) <= 1e-12
        assert np.max(np.abs(g @ g - np.eye(d))) <= 1e-12

    def test_four(self):
        expect = 0.5 * (np.ones((4, 4)) - 2 * np.eye(4))
        np.testing.assert_array_equal(grover_matrix(4), expect)


class TestEvolve:
    def test_two_cycle_norm(self):
        s = graph_walk_evolve(Graph.cycle(2), hadamard_matrix(), InitSpec([1, 0]), 100)
        assert abs(s.norm() - 1) < 1e-12

    def test_eight_cycle_transfer(self):
        tr = distribution_trajectory(Graph.cycle(8), X, InitSpec([1, 0], 0), 12, "flip_flop")
        hits = np.nonzero(tr[:, 4] > 1 - 1e-12)[0]
        assert hits.size and hits[0] <= 12

    @pytest.mark.parametrize("n", [9, 16, 31])
    def test_cycle_matches_line(self, n):
        ini = InitSpec([0.6, 0.8j], 0)
        for t in range(0, (n + 1) // 2):
            cyc = graph_walk_evolve(Graph.cycle(n), hadamard_matrix(), ini, t)
            line = evolve(t, None, ini)
            for x in range(-t, t + 1):
                np.testing.assert_allclose(cyc.column(x % n), line.column(x), atol=1e-12)

    def test_unitary_matrix(self):
        u = GraphWalk(Graph.cycle(5)).unitary()
        assert np.max(np.abs(u @ u.conj().T - np.eye(10))) < 1e-12


class TestAveraged:
    def test_t_one(self):
        g = Graph.cycle(7)
        a = averaged_distribution(g, None, InitSpec([1, 0]), 1)
        b = position_distribution(graph_walk_evolve(g, None, InitSpec([1, 0]), 0))
        assert total_variation(a, b) == 0

    def test_odd_cycle_uniform(self):
        d = averaged_distribution(Graph.cycle(11), hadamard_matrix(), InitSpec([1, 0]), 10_000)
        assert total_variation(d, uniform_distribution(11)) <= 0.01

    def test_four_cycle_is_uniform(self):
        # the Hadamard walk on C4 averages to the uniform law exactly
        d = averaged_distribution(Graph.cycle(4), hadamard_matrix(), InitSpec([1, 0]), 10_000)
        assert total_variation(d, uniform_distribution(4)) < 1e-12

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_even_cycle_not_uniform(self, n):
        d = averaged_distribution(Graph.cycle(n), hadamard_matrix(), InitSpec([1, 0]), 10_000)
        assert total_variation(d, uniform_distribution(n)) > 0.05

    def test_limiting_average_matches_long_run(self):
        g = Graph.cycle(7)
        lim = limiting_average(g, hadamard_matrix(), InitSpec([1, 0]))
        run = averaged_distribution(g, hadamard_matrix(), InitSpec([1, 0]), 20_000)
        assert total_variation(lim, run) < 5e-3

    def test_running_average_consistency(self):
        g = Graph.cycle(5)
        traj = averaged_trajectory(g, None, InitSpec([1, 0]), 30)
        last = averaged_distribution(g, None, InitSpec([1, 0]), 30)
        assert total_variation(traj[-1], last) < 1e-14


class TestMixingTime:
    def test_target_is_first(self):
        p = uniform_distribution(3)
        assert instantaneous_mixing_time([p, p], p, 0.01) == 0

    def test_never(self):
        p = uniform_distribution(3)
        q = position_distribution(WalkState(np.array([[1.0, 0, 0]]), np.arange(3)))
        assert instantaneous_mixing_time([q] * 5, p, 0.1) is None

    def test_empty(self):
        with pytest.raises(DomainError):
            instantaneous_mixing_time([], uniform_distribution(2), 0.1)

    def test_odd_cycle_scaling(self):
        ns = np.array([5, 7, 9, 11, 13])
        m = np.array([cycle_average_mixing_time(int(n), 0.05, max_T=2000) for n in ns])
        assert np.all(m > 0)
        # O(n log n): M / (n log n) stays bounded and the growth is below quadratic
        ratio = m / (ns * np.log(ns))
        assert ratio[-1] <= ratio[0]
        assert fit_exponent(ns, m) < 1.5

    def test_eleven_cycle_finite(self):
        g = Graph.cycle(11)
        traj = averaged_trajectory(g, hadamard_matrix(), InitSpec([1, 0]), 200)
        assert instantaneous_mixing_time(traj, uniform_distribution(11), 0.05) is not None


class TestHypercube:
    def test_one_dimension_flip_flop(self):
        for t in range(6):
            p = position_distribution(hypercube_walk(1, t)).probs
            assert p[t % 2] == pytest.approx(1.0)

    def test_hamming_symmetry(self):
        w = hamming_weights(6)
        for t in (3, 7, 10):
            p = position_distribution(hypercube_walk(6, t)).probs
            for k in range(7):
                vals = p[w == k]
                assert np.ptp(vals) < 1e-12

    def test_bit_permutation_equivariance(self, rng):
        dim = 5
        n = 1 << dim
        amps = rng.normal(size=(dim, n)) + 1j * rng.normal(size=(dim, n))
        amps /= np.linalg.norm(amps)
        perm = rng.permutation(dim)

        def relabel(x):
            return sum(((x >> d) & 1) << int(perm[d]) for d in range(dim))

        vmap = np.array([relabel(x) for x in range(n)])
        moved = np.zeros_like(amps)
        moved[np.ix_(perm, vmap)] = amps
        a = position_distribution(hypercube_walk(dim, 9, WalkState(amps, np.arange(n)))).probs
        b = position_distribution(hypercube_walk(dim, 9, WalkState(moved, np.arange(n)))).probs
        np.testing.assert_allclose(b[vmap], a, atol=1e-12)

    def test_too_large(self):
        with pytest.raises(DomainError):
            hypercube_walk(17, 1)

    def test_window(self):
        assert mixing_window(8) == (4, 9)

    def test_parity_reference(self):
        scan = hypercube_mixing(8, reference="parity")
        assert scan.min_tv <= 0.1
        uni = hypercube_mixing(8)
        assert uni.min_tv >= 0.5  # bipartite: half the vertices are always empty


class TestSearch:
    def test_steps(self):
        assert skw_steps(8) == 25

    def test_initial_success(self):
        r = skw_search(6, 5, steps=0)
        assert r.trajectory[0] == pytest.approx(2.0**-6)

    def test_success_n8(self):
        r = skw_search(8)
        assert r.success >= 0.3
        assert r.success >= 2 * r.classical_baseline

    def test_marked_invariance(self):
        vals = [skw_search(5, m).success for m in range(32)]
        assert np.ptp(vals) < 1e-12

    def test_marked_coin_choices_agree(self):
        a = skw_search(6, 3, marked_coin="minus_grover").trajectory
        b = skw_search(6, 3, marked_coin="minus_identity").trajectory
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_errors(self):
        with pytest.raises(DomainError):
            skw_search(1)
        with pytest.raises(DomainError):
            skw_search(4, 16)


def test_grover_cycle_walks_are_permutations():
    # every basis state maps to a basis state under the sigma_x coin
    for n in (3, 6):
        u = GraphWalk(Graph.cycle(n), X, "flip_flop").unitary()
        assert set(np.round(np.abs(u), 12).ravel()) <= {0.0, 1.0}
