"""Acceptance suite: one test per numbered criterion.

Each test carries ``@pytest.mark.criterion(n)``; the conftest prints one
PASS/FAIL line per criterion at the end of the run, with the measured values
recorded through the ``measured`` fixture.
"""

import numpy as np
import pytest
from helpers import brute_force_symmetric, random_coin, random_coin_state

from quantumwalks.classical import binomial_line_distribution
from quantumwalks.core import InitSpec, NumericalError, position_distribution, total_variation, uniform_distribution
from quantumwalks.ctqw import (
    CTQWConfig,
    Propagator,
    childs_transmission,
    column_hamiltonian,
    column_states,
    glued_trees,
    hamiltonian,
    line_ctqw,
    scattering_solve,
    traversal_experiment,
    wavepacket_transmission,
)
from quantumwalks.graph_walks import Graph, averaged_distribution, hypercube_mixing, skw_search, skw_steps
from quantumwalks.line_walks import (
    BarrierSpec,
    absorbing_walk,
    evolve,
    evolve_fourier,
    hadamard_matrix,
    path_counting_state,
)
from quantumwalks.oracles import LimitDensity, coin_entropy, empirical_limit_distance, is_symmetric_init, symmetric_init
from quantumwalks.stochastics import DecoherenceModel, decohere_evolve, variance_exponent
from quantumwalks.szegedy import quantize, spectrum_check
from quantumwalks.universality import WireState, grover_coin, phase_gate_run, wire_step

pytestmark = pytest.mark.acceptance

S2 = 1 / np.sqrt(2)
H = hadamard_matrix()
SYM = InitSpec([S2, 1j * S2])
ZERO = InitSpec([1, 0])


def dense(state, lo, hi):
    """Amplitudes on positions ``lo..hi`` as a (2, hi-lo+1) array."""
    out = np.zeros((2, hi - lo + 1), dtype=complex)
    for j, x in enumerate(range(lo, hi + 1)):
        out[:, j] = state.column(x)
    return out


@pytest.mark.criterion(1)
def test_01_binomial_origin(measured):
    p = binomial_line_distribution(100, 0.5).prob(0)
    measured("P(0)", p)
    assert abs(p - 0.0795) <= 0.0005


@pytest.mark.criterion(2)
def test_02_worked_states(measured):
    r = 1 / (2 * np.sqrt(2))
    # rows: coin |0>, |1>; columns: positions -3..3
    expected = {
        1: [[0, 0, 0, 0, S2, 0, 0], [0, 0, S2, 0, 0, 0, 0]],
        2: [[0, 0, 0, 0.5, 0, 0.5, 0], [0, -0.5, 0, 0.5, 0, 0, 0]],
        3: [[0, 0, -r, 0, S2, 0, r], [r, 0, 0, 0, r, 0, 0]],
    }
    worst = 0.0
    for t, e in expected.items():
        worst = max(worst, np.max(np.abs(dense(evolve(t, H, ZERO), -3, 3) - e)))
    measured("max_err", worst)
    assert worst <= 1e-12


@pytest.mark.criterion(3)
def test_03_engines_agree(measured):
    worst = 0.0
    for t in range(31):
        a = evolve(t, H, ZERO).amplitudes
        b = evolve_fourier(t, H, ZERO).amplitudes
        c = path_counting_state(t).amplitudes
        worst = max(worst, np.max(np.abs(a - b)), np.max(np.abs(a - c)))
    for t in (64, 128):
        for init in (ZERO, SYM):
            a = evolve(t, H, init).amplitudes
            b = evolve_fourier(t, H, init).amplitudes
            worst = max(worst, np.max(np.abs(a - b)))
    measured("max_err", worst)
    assert worst <= 1e-10


@pytest.mark.criterion(4)
def test_04_variance_limit(measured):
    d = position_distribution(evolve(2000, H, ZERO))
    ratio = np.sqrt(d.variance()) / 2000
    target = np.sqrt((np.sqrt(2) - 1) / 2)
    measured("sigma/t", ratio)
    assert abs(ratio - target) <= 0.01


@pytest.mark.criterion(5)
@pytest.mark.parametrize("init", [SYM, ZERO], ids=["symmetric", "zero"])
def test_05_konno_law(init, measured):
    f = LimitDensity.of(H, init)
    l1 = empirical_limit_distance(2000, H, init)
    measured("L1", l1)
    assert l1 <= 0.05
    assert abs(f.mass() - 1) <= 1e-6
    assert abs(f.second_moment() - (1 - S2)) <= 1e-6


@pytest.mark.criterion(6)
def test_06_symmetry_classifier(measured):
    rng = np.random.default_rng(6)
    disagree = 0
    n_sym = 0
    for i in range(200):
        c = random_coin(rng)
        chi = symmetric_init(c, i % 4 // 2).coin_amplitudes if i % 2 == 0 else random_coin_state(rng)
        claim = is_symmetric_init(c, chi[0], chi[1])
        n_sym += claim
        disagree += claim != brute_force_symmetric(c, chi)
    measured("disagreements", disagree)
    measured("symmetric_pairs", n_sym)
    assert disagree == 0


@pytest.mark.slow
@pytest.mark.criterion(7)
def test_07_one_barrier(measured):
    r = absorbing_walk(BarrierSpec.semi_infinite(0), H, InitSpec([1, 0], 1), max_steps=100_000)
    measured("p", r.p)
    measured("survivor", r.survivor)
    assert abs(r.p - 2 / np.pi) <= 0.01
    # the unabsorbed norm is reported and closes the budget
    assert abs(r.p + r.survivor - 1) <= 1e-9


@pytest.mark.criterion(8)
def test_08_two_barriers(measured):
    ps = {}
    for n in (5, 10, 20):
        r = absorbing_walk(BarrierSpec.two_barriers(0, n), H, InitSpec([1, 0], 1), max_steps=10_000)
        total = r.p + r.q + r.survivor
        assert abs(total - 1) <= 1e-6, n
        assert r.survivor <= 1e-6, n
        ps[n] = r.p
        measured(f"p{n}", r.p)
    gaps = [abs(ps[n] - S2) for n in (5, 10, 20)]
    assert gaps[2] <= gaps[0]
    assert gaps[2] < 0.05


@pytest.mark.criterion(9)
def test_09_odd_cycle_uniform(measured):
    d = averaged_distribution(Graph.cycle(11), H, ZERO, 10_000)
    tv = total_variation(d, uniform_distribution(11))
    measured("TV", tv)
    assert tv <= 0.01


@pytest.mark.criterion(10)
def test_10_hypercube_mixing(measured):
    scan = hypercube_mixing(8)
    measured("min_TV_uniform", scan.min_tv)
    measured("min_TV_parity", hypercube_mixing(8, reference="parity").min_tv)
    assert scan.min_tv <= 0.05


@pytest.mark.criterion(11)
def test_11_skw_search(measured):
    assert skw_steps(8) == 25
    r = skw_search(8, steps=25)
    measured("success", r.success)
    measured("classical", r.classical_baseline)
    assert r.success >= 0.3
    assert r.success >= 2 * r.classical_baseline


@pytest.mark.criterion(12)
def test_12_ctqw_arcsine(measured):
    w = line_ctqw(801, 200.0, 1.0)
    ks = w.ks()
    measured("KS_X/t", ks)
    measured("KS_X/(2t)", w.ks(2.0))
    assert ks <= 0.05


@pytest.mark.criterion(13)
def test_13_glued_trees(measured):
    res = traversal_experiment(glued_trees(6))
    measured("ratio", res.ratio)
    assert res.ratio >= 10
    g = glued_trees(4)
    basis = column_states(g)
    full = Propagator(hamiltonian(CTQWConfig(g)))
    red = Propagator(column_hamiltonian(4))
    e0 = np.zeros(basis.shape[1], dtype=complex)
    e0[0] = 1
    worst = 0.0
    for t in (1.0, 5.0, 17.0, 40.0):
        worst = max(worst, np.max(np.abs(basis.T @ full.apply(basis @ e0, t) - red.apply(e0, t))))
    measured("reduction_err", worst)
    assert worst <= 1e-9


def _random_chain(n, rng):
    p = rng.random((n, n))
    p[rng.random((n, n)) < 0.3] = 0
    p[np.arange(n), rng.integers(0, n, n)] += 0.1
    return p / p.sum(axis=1, keepdims=True)


def _reversible_chain(n, rng):
    w = rng.random((n, n))
    w = w + w.T
    return w / w.sum(axis=1, keepdims=True)


@pytest.mark.criterion(14)
def test_14_szegedy(measured):
    rng = np.random.default_rng(14)
    worst = 0.0
    for n in range(2, 13):
        for _ in range(3):
            w = quantize(_random_chain(n, rng))
            worst = max(worst, w.isometry_defect(), w.unitarity_defect())
    measured("defect", worst)
    assert worst <= 1e-10
    for n in (3, 5, 8):
        assert np.array_equal(quantize(np.eye(n)).W, np.eye(n * n))
    mism = 0.0
    for n in range(2, 9):
        chk = spectrum_check(quantize(_reversible_chain(n, rng)))
        assert chk.count_ok
        mism = max(mism, chk.mismatch)
    measured("pairing", mism)
    assert mism <= 1e-9


@pytest.mark.criterion(15)
@pytest.mark.parametrize("init", [ZERO, SYM], ids=["zero", "symmetric"])
def test_15_entanglement(init, measured):
    s = coin_entropy(evolve(2000, H, init))
    measured("S", s)
    assert abs(s - 0.872) <= 0.01


@pytest.mark.criterion(16)
def test_16_universality_regression(measured):
    w = np.exp(-1j * np.pi / 4)
    # (k, occupied half) per step for the |0> and |1> wires
    table = {
        "t2": ((1, 1), (1, 1)), "t3": ((1, 0), (1, 0)), "t4": ((2, 1), (2, 1)), "t5": ((2, 0), (2, 0)),
        "t6": ((3, 1), (2, 1)), "t7": ((3, 0), (2, 0)), "t8": ((4, 1), (3, 1)), "t9": ((4, 0), (3, 0)),
        "t10": ((5, 1), (4, 1)), "t11": ((5, 0), (4, 0)),
    }
    a, b = 0.6, 0.8j
    run = phase_gate_run(a, b)
    worst = 0.0
    for step, rows in table.items():
        for wire, amp, (k, half) in zip("01", (a, b), rows):
            e = np.zeros(4, dtype=complex)
            e[2 * half : 2 * half + 2] = w**k * amp
            worst = max(worst, np.max(np.abs(run.states[step][wire] - e)))
    measured("gate_err", worst)
    assert worst <= 1e-12
    x = 0.3 + 0.1j
    assert np.max(np.abs(wire_step(WireState.duplicated(x)).amps - [0, 0, x, x])) <= 1e-12
    g4 = 0.5 * np.array([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]])
    assert np.max(np.abs(grover_coin(4) - g4)) <= 1e-12
    assert abs(childs_transmission(-np.pi / 4) - 1) <= 1e-12


@pytest.mark.slow
@pytest.mark.criterion(17)
def test_17_decoherence_transition(measured):
    a0 = variance_exponent(DecoherenceModel())
    a1 = variance_exponent(DecoherenceModel(coin_measure_p=1))
    measured("alpha0", a0)
    measured("alpha1", a1)
    assert abs(a0 - 2) <= 0.1 and abs(a1 - 1) <= 0.1
    exact = max(
        total_variation(
            decohere_evolve(t, H, ZERO, DecoherenceModel(coin_measure_p=1), mode="exact_classical").dist,
            binomial_line_distribution(t, 0.5),
        )
        for t in (10, 50, 200)
    )
    measured("exact_TV", exact)
    assert exact <= 1e-10
    ref = binomial_line_distribution(50, 0.5)
    tvs = []
    for p in (0.0, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0):
        m = DecoherenceModel(coin_measure_p=p, seed=17)
        tvs.append(total_variation(decohere_evolve(50, H, ZERO, m, n_trials=100_000, workers=4).dist, ref))
    measured("TV(p)", " ".join(f"{v:.3f}" for v in tvs))
    assert all(x > y for x, y in zip(tvs, tvs[1:]))


def _random_graph(n, rng):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    return Graph.from_edges(n, edges)


@pytest.mark.criterion(18)
def test_18_scattering(measured):
    rng = np.random.default_rng(18)
    worst, done, singular = 0.0, 0, 0
    while done < 100:
        n = int(rng.integers(1, 9))
        g = _random_graph(n, rng)
        leads = rng.choice(n, size=int(rng.integers(1, 4)), replace=True).tolist()
        k = float(rng.uniform(-np.pi + 1e-3, -1e-3))
        try:
            r = scattering_solve(g, leads, k)
        except NumericalError:
            singular += 1
            continue
        worst = max(worst, r.flux_defect())
        done += 1
    measured("flux_defect", worst)
    measured("skipped_singular", singular)
    assert worst <= 1e-9
    diamond = Graph.from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    k = -np.pi / 3
    t_exact = abs(scattering_solve(diamond, [0, 3], k).T(0, 1)) ** 2
    t_packet = wavepacket_transmission(diamond, (0, 3), k)
    measured("diamond", f"{t_exact:.4f} vs {t_packet:.4f}")
    assert abs(t_exact - t_packet) <= 0.02
