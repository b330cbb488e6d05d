"""Independent oracles shared by the unit and acceptance tests."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from quantumwalks.line_walks import line_step

PAIR_TOL = 1e-10


def brute_force_symmetric(coin: np.ndarray, chi: np.ndarray, n_max: int = 40) -> bool:
    """``P_n(k) = P_n(-k)`` for every ``n <= n_max``, by direct stepping."""
    psi = np.zeros((2, 2 * n_max + 1), dtype=complex)
    psi[:, n_max] = chi
    for _ in range(n_max):
        psi = line_step(psi, coin)
        p = np.sum(np.abs(psi) ** 2, axis=0)
        if np.max(np.abs(p - p[::-1])) > PAIR_TOL:
            return False
    return True


def brute_force_means(coin: np.ndarray, chi: np.ndarray, n_max: int = 40) -> np.ndarray:
    """``E[X_n]`` for ``n = 1..n_max``."""
    psi = np.zeros((2, 2 * n_max + 1), dtype=complex)
    psi[:, n_max] = chi
    x = np.arange(-n_max, n_max + 1)
    out = []
    for _ in range(n_max):
        psi = line_step(psi, coin)
        out.append(float(np.dot(x, np.sum(np.abs(psi) ** 2, axis=0))))
    return np.array(out)


def random_coin(rng: np.random.Generator, min_entry: float = 0.05) -> np.ndarray:
    """Haar-random 2x2 unitary with every entry at least ``min_entry`` in modulus."""
    while True:
        u = unitary_group.rvs(2, random_state=rng)
        if np.min(np.abs(u)) >= min_entry:
            return u


def random_coin_state(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)
