"""
State and operator algebra shared by every walk engine.

A :class:`WalkState` stores amplitudes as a dense ``(coin_dim, n_positions)``
array together with the integer labels of the positions (line sites or
graph vertices). Coin index 0 is the right-mover and index 1 the left-mover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10


class QuantumWalkError(Exception):
    """Base class for structured errors raised by this package."""


class DimensionError(QuantumWalkError, ValueError):
    """Operator and state dimensions do not match."""


class NormalizationError(QuantumWalkError, ValueError):
    """A state or distribution violates its normalisation invariant."""


class UnitarityError(QuantumWalkError, ValueError):
    """A matrix expected to be unitary is not."""


class DomainError(QuantumWalkError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalError(QuantumWalkError, ArithmeticError):
    """A numerical procedure failed (singular system, non-convergence)."""


def unitarity_defect(m: ArrayLike) -> float:
    """Largest entry of ``|M M^† - I|``."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return float(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0]))))


def as_unitary(m: ArrayLike, tol: float = UNITARY_TOL) -> NDArray[np.complex128]:
    """Return ``m`` as a complex array after checking unitarity.

    Raises
    ------
    UnitarityError
        If ``max |M M^† - I| > tol``.
    """
    a = np.array(m, dtype=np.complex128)
    err = unitarity_defect(a)
    if err > tol:
        raise UnitarityError(f"matrix is not unitary (defect {err:.3e} > {tol:g})")
    return a


@dataclass(frozen=True)
class WalkState:
    """Amplitude tensor over coin basis x position basis.

    Parameters
    ----------
    amplitudes : ndarray, shape (coin_dim, n)
        Complex amplitudes; column ``j`` belongs to ``positions[j]``.
    positions : ndarray of int, shape (n,)
        Position labels. Line walks use contiguous integers.
    """

    amplitudes: NDArray[np.complex128]
    positions: NDArray[np.int64]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim == 1:
            amps = amps[None, :]
        if amps.ndim != 2 or amps.shape[0] < 1:
            raise DimensionError(f"amplitudes must be 2-D (coin, position), got {amps.shape}")
        pos = np.asarray(self.positions, dtype=np.int64).reshape(-1)
        if pos.shape[0] != amps.shape[1]:
            raise DimensionError(
                f"{pos.shape[0]} position labels for {amps.shape[1]} amplitude columns"
            )
        if not np.all(np.isfinite(amps)):
            raise NormalizationError("amplitudes contain NaN or Inf")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm^2 is {norm2:.12f}, expected 1")
        amps.setflags(write=False)
        pos.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "positions", pos)

    @property
    def coin_dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_positions(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def amplitude(self, coin: int, position: int) -> complex:
        """Amplitude at ``(coin, position)``; zero outside the stored range."""
        idx = np.nonzero(self.positions == position)[0]
        if idx.size == 0:
            return 0j
        return complex(self.amplitudes[coin, idx[0]])

    def column(self, position: int) -> NDArray[np.complex128]:
        """Coin vector at ``position`` (zeros if not stored)."""
        idx = np.nonzero(self.positions == position)[0]
        if idx.size == 0:
            return np.zeros(self.coin_dim, dtype=np.complex128)
        return self.amplitudes[:, idx[0]].copy()


@dataclass(frozen=True)
class ProbDist:
    """Probability distribution over integer labels."""

    support: NDArray[np.int64]
    probs: NDArray[np.float64]

    def __post_init__(self) -> None:
        sup = np.asarray(self.support, dtype=np.int64).reshape(-1)
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if sup.shape != p.shape:
            raise DimensionError("support and probs must have the same length")
        if not np.all(np.isfinite(p)):
            raise NormalizationError("probabilities contain NaN or Inf")
        if np.any(p < -1e-14):
            raise NormalizationError("probabilities must be nonnegative")
        p = np.clip(p, 0.0, None)
        total = float(p.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"probabilities sum to {total:.12f}, expected 1")
        if np.unique(sup).size != sup.size:
            raise DimensionError("support labels must be distinct")
        sup.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "ProbDist":
        keys = sorted(mapping)
        return cls(np.array(keys, dtype=np.int64), np.array([mapping[k] for k in keys]))

    def prob(self, label: int) -> float:
        idx = np.nonzero(self.support == label)[0]
        return float(self.probs[idx[0]]) if idx.size else 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in zip(self.support, self.probs)}

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def variance(self) -> float:
        """Variance about the mean, ``E[X^2] - E[X]^2``."""
        mu = self.mean()
        return float(np.dot((self.support - mu) ** 2, self.probs))

    def std(self) -> float:
        return float(np.sqrt(self.variance()))

    def dense(self, labels: Sequence[int]) -> NDArray[np.float64]:
        """Probabilities evaluated on ``labels`` (missing labels read as 0)."""
        lut = self.as_dict()
        return np.array([lut.get(int(k), 0.0) for k in labels])


@dataclass(frozen=True)
class InitSpec:
    """Initial coin state placed on a single start position.

    Parameters
    ----------
    coin_amplitudes : sequence of complex
        ``(alpha, beta)`` for a 2-level coin, or a length-d vector.
    start_position : int
        Position (or vertex) carrying the initial coin state.
    """

    coin_amplitudes: NDArray[np.complex128]
    start_position: int = 0
    tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self) -> None:
        c = np.array(self.coin_amplitudes, dtype=np.complex128).reshape(-1)
        if c.size < 1:
            raise DimensionError("coin amplitude vector is empty")
        if not np.all(np.isfinite(c)):
            raise NormalizationError("coin amplitudes contain NaN or Inf")
        n2 = float(np.sum(np.abs(c) ** 2))
        if abs(n2 - 1.0) > self.tol:
            raise NormalizationError(f"|alpha|^2 + |beta|^2 = {n2:.15f}, expected 1")
        c.setflags(write=False)
        object.__setattr__(self, "coin_amplitudes", c)
        object.__setattr__(self, "start_position", int(self.start_position))

    @classmethod
    def basis(cls, coin: int = 0, dim: int = 2, start_position: int = 0) -> "InitSpec":
        v = np.zeros(dim, dtype=np.complex128)
        v[coin] = 1.0
        return cls(v, start_position)

    @classmethod
    def unbiased(cls, eta: float, phase: float, start_position: int = 0) -> "InitSpec":
        """``sqrt(eta)|0> + e^{i phase} sqrt(1-eta)|1>`` for ``eta`` in [0, 1]."""
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {eta}")
        return cls([np.sqrt(eta), np.exp(1j * phase) * np.sqrt(1.0 - eta)], start_position)

    @property
    def alpha(self) -> complex:
        return complex(self.coin_amplitudes[0])

    @property
    def beta(self) -> complex:
        return complex(self.coin_amplitudes[1]) if self.coin_amplitudes.size > 1 else 0j

    @property
    def dim(self) -> int:
        return int(self.coin_amplitudes.size)


def apply_unitary(
    state: WalkState,
    op: ArrayLike,
    subsystem: Literal["coin", "full"] = "coin",
) -> WalkState:
    """Apply ``op`` to the coin register (``C ⊗ I``) or to the whole space.

    For ``subsystem="full"`` the basis index is ``coin * n_positions + j``.

    Raises
    ------
    DimensionError
        If ``op`` does not match the targeted subsystem.
    """
    m = np.asarray(op, dtype=np.complex128)
    d, n = state.amplitudes.shape
    if subsystem == "coin":
        if m.shape != (d, d):
            raise DimensionError(f"coin operator must be {d}x{d}, got {m.shape}")
        amps = m @ state.amplitudes
    elif subsystem == "full":
        if m.shape != (d * n, d * n):
            raise DimensionError(f"full operator must be {d * n}x{d * n}, got {m.shape}")
        amps = (m @ state.amplitudes.reshape(-1)).reshape(d, n)
    else:
        raise DimensionError(f"unknown subsystem {subsystem!r}")
    return WalkState(amps, state.positions)


def position_distribution(state: WalkState) -> ProbDist:
    """``P(n) = sum_c |amp(c, n)|^2`` over the stored positions."""
    p = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    return ProbDist(state.positions, p / p.sum())


def total_variation(p: ProbDist, q: ProbDist) -> float:
    """Total variation distance ``1/2 sum_i |p_i - q_i|`` on the union support."""
    labels = np.union1d(p.support, q.support)
    a = np.zeros(labels.size)
    b = np.zeros(labels.size)
    a[np.searchsorted(labels, p.support)] = p.probs
    b[np.searchsorted(labels, q.support)] = q.probs
    return float(min(1.0, 0.5 * np.abs(a - b).sum()))


def uniform_distribution(labels: Sequence[int] | int) -> ProbDist:
    """Uniform distribution on ``labels`` (or on ``range(labels)``)."""
    lab = np.arange(labels) if isinstance(labels, (int, np.integer)) else np.asarray(labels)
    return ProbDist(lab, np.full(lab.size, 1.0 / lab.size))
