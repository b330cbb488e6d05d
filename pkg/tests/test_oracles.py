import numpy as np
import pytest
from helpers import brute_force_means, brute_force_symmetric, random_coin, random_coin_state
from hypothesis import given, settings
from hypothesis import strategies as st

from quantumwalks.core import DomainError, InitSpec, WalkState, position_distribution
from quantumwalks.line_walks import CoinSpec, evolve, hadamard_matrix
from quantumwalks.oracles import (
    LimitDensity,
    coin_entropy,
    default_bin_sites,
    empirical_limit_distance,
    is_symmetric_init,
    konno_density,
    symmetric_init,
)

S2 = 1 / np.sqrt(2)
H = hadamard_matrix()
SYM = InitSpec([S2, 1j * S2])


class TestDensity:
    def test_origin_symmetric(self):
        assert konno_density(0.0, H, SYM) == pytest.approx(1 / np.pi)

    @pytest.mark.parametrize("x", [S2, -S2, 0.9, -1.0, 3.0])
    def test_outside_support(self, x):
        assert konno_density(x, H, SYM) == 0.0

    def test_hadamard_moments(self):
        f = LimitDensity.of(H, SYM)
        assert f.mass() == pytest.approx(1.0, abs=1e-6)
        assert f.second_moment() == pytest.approx(1 - S2, abs=1e-6)

    def test_zero_entry_rejected(self):
        with pytest.raises(DomainError):
            konno_density(0.0, np.eye(2), [1, 0])
        with pytest.raises(DomainError):
            empirical_limit_distance(200, np.array([[1, 0], [0, 1j]]), [1, 0])

    def test_frames_mirror(self):
        f = LimitDensity.of(H, [1, 0])
        g = LimitDensity.of(H, [1, 0], frame="konno")
        xs = np.linspace(-0.69, 0.69, 11)
        np.testing.assert_allclose(f(xs), g(-xs))

    def test_walk_frame_mean_sign(self):
        # |0> moves right in this package, so the walk-frame mean is positive
        f = LimitDensity.of(H, [1, 0])
        assert f.mean() > 0
        assert position_mean(200, [1, 0]) > 0

    def test_cdf(self):
        f = LimitDensity.of(H, SYM)
        assert f.cdf(0.0) == pytest.approx(0.5, abs=1e-9)
        assert f.cdf(-1) == 0 and f.cdf(1) == 1
        assert f.interval_mass(-0.2, 0.3) == pytest.approx(f.cdf(0.3) - f.cdf(-0.2), abs=1e-9)

    def test_random_coins(self, rng):
        for _ in range(50):
            f = LimitDensity.of(random_coin(rng), random_coin_state(rng))
            assert f.mass() == pytest.approx(1.0, abs=1e-6)
            assert f.mean() == pytest.approx(f.mean_closed_form(), abs=1e-6)
            assert f.second_moment() == pytest.approx(f.second_moment_closed_form(), abs=1e-6)


def position_mean(t, init):
    return position_distribution(evolve(t, H, init)).mean()


class TestEmpiricalDistance:
    def test_trend(self):
        assert empirical_limit_distance(200, H, SYM) > empirical_limit_distance(2000, H, SYM)

    def test_pair_bins_stay_far(self):
        # with 2-site bins the lattice fringes are not averaged out
        assert empirical_limit_distance(1000, H, SYM, bin_sites=2) > 0.2

    def test_bin_validation(self):
        with pytest.raises(DomainError):
            empirical_limit_distance(200, H, SYM, bin_sites=3)
        with pytest.raises(DomainError):
            empirical_limit_distance(50, H, SYM)

    def test_default_bins(self):
        assert default_bin_sites(2000) == 44
        assert default_bin_sites(100) == 10
        assert default_bin_sites(1) == 2


class TestSymmetry:
    def test_examples(self):
        assert is_symmetric_init(H, S2, 1j * S2)
        assert is_symmetric_init(H, S2, -1j * S2)
        assert not is_symmetric_init(H, 1, 0)

    def test_construct(self, rng):
        for _ in range(20):
            c = random_coin(rng)
            ini = symmetric_init(c, int(rng.integers(2)))
            assert is_symmetric_init(c, ini.alpha, ini.beta)

    def test_agrees_with_brute_force(self, rng):
        for i in range(30):
            c = random_coin(rng)
            chi = symmetric_init(c, i % 2).coin_amplitudes if i % 2 == 0 else random_coin_state(rng)
            assert is_symmetric_init(c, chi[0], chi[1]) == brute_force_symmetric(c, chi)

    def test_symmetric_means_vanish(self, rng):
        for _ in range(10):
            c = random_coin(rng)
            chi = symmetric_init(c).coin_amplitudes
            assert np.max(np.abs(brute_force_means(c, chi))) <= 1e-10

    def test_zero_entry(self):
        with pytest.raises(DomainError):
            is_symmetric_init(np.eye(2), S2, S2)


class TestEntropy:
    def test_product_state(self):
        s = evolve(0, init=SYM)
        assert coin_entropy(s) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed(self):
        a = np.array([[S2, 0], [0, S2]], dtype=complex)
        assert coin_entropy(WalkState(a, np.arange(2))) == pytest.approx(1.0)

    def test_range_along_walk(self):
        for t in (1, 5, 50):
            assert 0.0 <= coin_entropy(evolve(t)) <= 1.0

    def test_needs_qubit_coin(self):
        with pytest.raises(DomainError):
            coin_entropy(WalkState(np.ones((3, 1)) / np.sqrt(3), [0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_density_integrates_to_one(seed):
    rng = np.random.default_rng(seed)
    f = LimitDensity.of(CoinSpec.explicit(random_coin(rng)), random_coin_state(rng))
    assert f.mass() == pytest.approx(1.0, abs=1e-6)
    assert f.mean() == pytest.approx(f.mean_closed_form(), abs=1e-6)
