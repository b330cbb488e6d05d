import numpy as np
import pytest

from quantumwalks import _rng
from quantumwalks._backend import ENV_VAR, HAVE_NUMBA, resolve_backend
from quantumwalks._kernels import absorbing_run, hitting_steps, trajectory_sum
from quantumwalks.classical import StochasticMatrix
from quantumwalks.graph_walks import Graph
from quantumwalks.line_walks import hadamard_matrix

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
H = hadamard_matrix().astype(complex)
S2 = 1 / np.sqrt(2)


class TestResolve:
    def test_explicit(self):
        assert resolve_backend("numpy") == "numpy"
        assert resolve_backend(" NumPy ") == "numpy"

    def test_env(self, monkeypatch):
        monkeypatch.setenv(ENV_VAR, "numpy")
        assert resolve_backend() == "numpy"
        monkeypatch.delenv(ENV_VAR)
        assert resolve_backend() == ("numba" if HAVE_NUMBA else "numpy")

    def test_unknown(self, monkeypatch):
        with pytest.raises(ValueError):
            resolve_backend("cuda")
        monkeypatch.setenv(ENV_VAR, "fortran")
        with pytest.raises(ValueError):
            resolve_backend()


def test_rng_range_and_determinism():
    u = _rng.uniform(7, np.arange(1000), 3, 2)
    assert np.all((u >= 0) & (u < 1))
    np.testing.assert_array_equal(u, _rng.uniform(7, np.arange(1000), 3, 2))
    assert abs(u.mean() - 0.5) < 0.05


@needs_numba
class TestParity:
    @pytest.mark.parametrize(
        "width,start,li,ri", [(200, 1, 0, -1), (11, 1, 0, 10), (21, 5, 0, 20)]
    )
    def test_absorbing(self, width, start, li, ri):
        args = (H, np.array([1, 0], complex), width, start, li, ri, 300)
        l1, r1, s1 = absorbing_run(*args, backend="numpy")
        l2, r2, s2 = absorbing_run(*args, backend="numba")
        np.testing.assert_allclose(l1, l2, atol=1e-13)
        np.testing.assert_allclose(r1, r2, atol=1e-13)
        assert s1 == pytest.approx(s2, abs=1e-13)
        assert abs(l1[-1] + r1[-1] + s1 - 1) <= 1e-12

    def test_trajectories(self):
        args = (H, np.array([S2, 1j * S2]), 30, 0.2, 0.1, 0.15, 1.0, 99, 400)
        a, ea = trajectory_sum(*args, backend="numpy")
        b, eb = trajectory_sum(*args, backend="numba")
        np.testing.assert_allclose(a, b, atol=1e-12)
        assert ea <= 1e-10 and eb <= 1e-10

    def test_trajectory_offset_splits(self):
        # a batch equals the sum of its halves, so worker splitting is exact
        args = (H, np.array([1, 0], complex), 20, 0.3, 0.0, 0.1, -1.0, 5)
        full, _ = trajectory_sum(*args, 200, backend="numpy")
        a, _ = trajectory_sum(*args, 120, 0, backend="numba")
        b, _ = trajectory_sum(*args, 80, 120, backend="numba")
        np.testing.assert_allclose(full, a + b, atol=1e-12)

    def test_hitting(self):
        P = StochasticMatrix.from_graph(Graph.cycle(12))
        indptr, indices, cum = P.csr()
        mask = np.zeros(12, bool)
        mask[6] = True
        a = hitting_steps(indptr, indices, cum, 0, mask, 500, 10_000, 3, backend="numpy")
        b = hitting_steps(indptr, indices, cum, 0, mask, 500, 10_000, 3, backend="numba")
        np.testing.assert_array_equal(a, b)
        assert np.all(a >= 6) and np.all(a % 2 == 0)
