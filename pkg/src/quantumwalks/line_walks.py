"""
Coined discrete-time quantum walks on the integer line.

One step is ``U = S (C ⊗ I)``: the coin acts first, then coin state 0 moves
one site right and coin state 1 one site left. States after ``t`` steps are
stored densely on the light cone ``[start - t, start + t]``.

Engines
-------
evolve
    Direct position-space iteration.
evolve_fourier
    Momentum space, ``psi~(k, t) = M_k^t psi~(k, 0)`` with
    ``M_k = diag(e^{ik}, e^{-ik}) C``, inverted with an FFT.
path_counting_amplitudes
    Closed-form binomial sums for the Hadamard walk from ``|0>_c ⊗ |0>_p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _kernels
from .core import (
    DimensionError,
    DomainError,
    InitSpec,
    WalkState,
    as_unitary,
)

# ---------------------------------------------------------------------------
# Coins
# ---------------------------------------------------------------------------


def hadamard_matrix() -> NDArray[np.complex128]:
    """The 2x2 Hadamard coin ``[[1, 1], [1, -1]] / sqrt(2)``."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


def su2_matrix(rho: float, theta: float, phi: float) -> NDArray[np.complex128]:
    """General 2x2 coin parametrised by ``(rho, theta, phi)``.

    ``[[sqrt(rho), sqrt(1-rho) e^{i theta}],
       [sqrt(1-rho) e^{i phi}, -sqrt(rho) e^{i(theta+phi)}]]``
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if not (0.0 <= theta <= np.pi and 0.0 <= phi <= np.pi):
        raise DomainError("theta and phi must lie in [0, pi]")
    a = np.sqrt(rho)
    b = np.sqrt(1.0 - rho)
    return np.array(
        [
            [a, b * np.exp(1j * theta)],
            [b * np.exp(1j * phi), -a * np.exp(1j * (theta + phi))],
        ],
        dtype=np.complex128,
    )


def grover_matrix(d: int) -> NDArray[np.complex128]:
    """Grover diffusion ``2|s><s| - I`` with ``|s>`` uniform; entries ``2/d - delta_ij``."""
    if int(d) != d or d < 1:
        raise DomainError(f"Grover coin dimension must be a positive integer, got {d}")
    d = int(d)
    return np.full((d, d), 2.0 / d, dtype=np.complex128) - np.eye(d, dtype=np.complex128)


@lru_cache(maxsize=32)
def _fibonacci_word(length: int) -> tuple[int, ...]:
    w = [0]
    while len(w) < length:
        w = [x for c in w for x in ((0, 1) if c == 0 else (0,))]
    return tuple(w[:length])


def fibonacci_schedule(step: int) -> int:
    """Letter ``step`` of the Fibonacci word 0100101001001... (substitution 0->01, 1->0)."""
    n = 1
    while n <= step:
        n *= 2
    return _fibonacci_word(n)[step]


@dataclass(frozen=True)
class CoinSpec:
    """Coin description that realises a unitary per time step.

    Use the constructors :meth:`hadamard`, :meth:`general_su2`,
    :meth:`grover`, :meth:`explicit` and :meth:`sequence`.
    """

    kind: str
    params: tuple = ()
    coins: tuple["CoinSpec", ...] = ()
    schedule: Callable[[int], int] | None = field(default=None, compare=False)
    _matrix: NDArray[np.complex128] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def hadamard(cls) -> "CoinSpec":
        return cls("hadamard", (), _matrix=hadamard_matrix())

    @classmethod
    def general_su2(cls, rho: float, theta: float, phi: float) -> "CoinSpec":
        return cls("general_su2", (rho, theta, phi), _matrix=su2_matrix(rho, theta, phi))

    @classmethod
    def grover(cls, d: int) -> "CoinSpec":
        return cls("grover", (d,), _matrix=grover_matrix(d))

    @classmethod
    def explicit(cls, matrix: ArrayLike) -> "CoinSpec":
        return cls("explicit", (), _matrix=as_unitary(matrix))

    @classmethod
    def sequence(
        cls,
        coins: Sequence["CoinSpec | ArrayLike"],
        schedule: Callable[[int], int] | Sequence[int] | str = "periodic",
    ) -> "CoinSpec":
        """Time-dependent coin: step ``s`` uses ``coins[schedule(s)]``.

        ``schedule`` may be a callable, an explicit index list, ``"periodic"``
        (``s mod len(coins)``) or ``"fibonacci"`` (two coins only).
        """
        specs = tuple(c if isinstance(c, CoinSpec) else cls.explicit(c) for c in coins)
        if not specs:
            raise DomainError("coin sequence is empty")
        dims = {c.dim for c in specs}
        if len(dims) != 1:
            raise DimensionError(f"coins in a sequence must share a dimension, got {dims}")
        m = len(specs)
        if callable(schedule):
            fn = schedule
        elif schedule == "periodic":
            def fn(s: int) -> int:
                return s % m
        elif schedule == "fibonacci":
            if m != 2:
                raise DomainError("Fibonacci schedule needs exactly two coins")
            fn = fibonacci_schedule
        elif isinstance(schedule, str):
            raise DomainError(f"unknown schedule {schedule!r}")
        else:
            idx = [int(i) for i in schedule]

            def fn(s: int) -> int:
                if s >= len(idx):
                    raise DomainError(f"explicit schedule has no entry for step {s}")
                return idx[s]

        return cls("sequence", (), coins=specs, schedule=fn)

    @property
    def dim(self) -> int:
        if self.kind == "sequence":
            return self.coins[0].dim
        return int(self._matrix.shape[0])

    @property
    def is_constant(self) -> bool:
        return self.kind != "sequence"

    def at(self, step: int) -> NDArray[np.complex128]:
        """Coin matrix used at (0-based) step ``step``."""
        if self.kind == "sequence":
            k = self.schedule(step)
            if not 0 <= k < len(self.coins):
                raise DomainError(f"schedule index {k} out of range at step {step}")
            return self.coins[k].at(step)
        return self._matrix

    def matrix(self) -> NDArray[np.complex128]:
        """The single coin matrix of a constant coin."""
        if self.kind == "sequence":
            raise DomainError("a coin sequence has no single matrix; use at(step)")
        return self._matrix


def _as_coin(coin: CoinSpec | ArrayLike | None) -> CoinSpec:
    if coin is None:
        return CoinSpec.hadamard()
    if isinstance(coin, CoinSpec):
        return coin
    return CoinSpec.explicit(coin)


def _as_init(init: InitSpec | ArrayLike | None) -> InitSpec:
    if init is None:
        return InitSpec.basis(0)
    if isinstance(init, InitSpec):
        return init
    return InitSpec(np.asarray(init, dtype=np.complex128))


# ---------------------------------------------------------------------------
# Direct evolution
# ---------------------------------------------------------------------------


def line_step(psi: NDArray[np.complex128], c: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """One step ``S (C ⊗ I)`` on a dense ``(2, W)`` array (no wraparound)."""
    phi = c @ psi
    out = np.zeros_like(psi)
    out[0, 1:] = phi[0, :-1]
    out[1, :-1] = phi[1, 1:]
    return out


def _initial_array(t: int, init: InitSpec) -> NDArray[np.complex128]:
    if init.dim != 2:
        raise DimensionError("line walks need a 2-dimensional coin state")
    psi = np.zeros((2, 2 * t + 1), dtype=np.complex128)
    psi[:, t] = init.coin_amplitudes
    return psi


def evolve(
    steps: int,
    coin: CoinSpec | ArrayLike | None = None,
    init: InitSpec | ArrayLike | None = None,
) -> WalkState:
    """State after ``steps`` applications of ``S (C ⊗ I)``.

    Parameters
    ----------
    steps : int
        Number of steps ``t >= 0``.
    coin : CoinSpec or array_like, optional
        Defaults to the Hadamard coin. Sequences are honoured step by step.
    init : InitSpec or array_like, optional
        Defaults to ``|0>_c ⊗ |0>_p``.

    Returns
    -------
    WalkState
        Positions ``start - t .. start + t``.
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    cs = _as_coin(coin)
    ini = _as_init(init)
    if cs.dim != 2:
        raise DimensionError("line walks need a 2x2 coin")
    psi = _initial_array(steps, ini)
    for s in range(steps):
        psi = line_step(psi, cs.at(s))
    positions = np.arange(-steps, steps + 1) + ini.start_position
    return WalkState(psi, positions)


def multi_coin_evolve(
    steps: int,
    coins: CoinSpec | Sequence[ArrayLike],
    init: InitSpec | ArrayLike | None = None,
    schedule: Callable[[int], int] | Sequence[int] | str = "periodic",
) -> WalkState:
    """Evolve with a time-dependent coin: step ``s`` uses ``coins[schedule(s)]``."""
    cs = coins if isinstance(coins, CoinSpec) else CoinSpec.sequence(coins, schedule)
    return evolve(steps, cs, init)


# ---------------------------------------------------------------------------
# Fourier engine
# ---------------------------------------------------------------------------


def fourier_grid_size(steps: int) -> int:
    """Smallest power of two ``>= 2 t + 2``."""
    n = 1
    while n < 2 * steps + 2:
        n *= 2
    return n


@dataclass(frozen=True)
class FourierEngine:
    """Momentum grid ``k_j = -pi + 2 pi j / N`` and per-k propagators.

    The transform convention is ``psi~(k) = sum_n psi(n) e^{ikn}``, under
    which one step acts as ``M_k = diag(e^{ik}, e^{-ik}) C``.
    """

    grid_size: int

    @property
    def momenta(self) -> NDArray[np.float64]:
        j = np.arange(self.grid_size)
        return -np.pi + 2.0 * np.pi * j / self.grid_size

    def propagators(self, c: ArrayLike) -> NDArray[np.complex128]:
        """Stack of ``M_k`` with shape ``(N, 2, 2)``."""
        k = self.momenta
        cm = np.asarray(c, dtype=np.complex128)
        ph = np.stack([np.exp(1j * k), np.exp(-1j * k)], axis=1)
        return ph[:, :, None] * cm[None, :, :]

    def eigenphases(self, c: ArrayLike) -> NDArray[np.float64]:
        """Eigenphases ``omega`` of every ``M_k``, shape ``(N, 2)``."""
        return np.angle(np.linalg.eigvals(self.propagators(c)))

    def to_momentum(self, psi: NDArray[np.complex128], offset: int) -> NDArray[np.complex128]:
        """Transform a ``(2, W)`` array whose column 0 sits at relative position ``-offset``."""
        n = np.arange(psi.shape[1]) - offset
        k = self.momenta
        return psi @ np.exp(1j * np.outer(n, k))

    def to_position(self, psik: NDArray[np.complex128], steps: int) -> NDArray[np.complex128]:
        """Inverse transform onto relative positions ``-steps .. steps``."""
        n_grid = self.grid_size
        full = np.fft.fft(psik, axis=1) / n_grid
        n = np.arange(-steps, steps + 1)
        sign = np.where(n % 2 == 0, 1.0, -1.0)
        return full[:, n % n_grid] * sign


def evolve_fourier(
    steps: int,
    coin: CoinSpec | ArrayLike | None = None,
    init: InitSpec | ArrayLike | None = None,
    grid_size: int | None = None,
) -> WalkState:
    """Momentum-space evolution; agrees with :func:`evolve` to round-off.

    Raises
    ------
    DomainError
        If ``grid_size < 2 t + 1`` (the light cone would alias).
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    cs = _as_coin(coin)
    ini = _as_init(init)
    if cs.dim != 2:
        raise DimensionError("line walks need a 2x2 coin")
    n_grid = fourier_grid_size(steps) if grid_size is None else int(grid_size)
    if n_grid < 2 * steps + 1:
        raise DomainError(f"grid size {n_grid} too small for {steps} steps (need >= {2 * steps + 1})")
    eng = FourierEngine(n_grid)
    psik = np.repeat(ini.coin_amplitudes[:, None], n_grid, axis=1)
    if cs.is_constant:
        mk = np.linalg.matrix_power(eng.propagators(cs.matrix()), steps)
        psik = np.einsum("kij,jk->ik", mk, psik)
    else:
        for s in range(steps):
            mk = eng.propagators(cs.at(s))
            psik = np.einsum("kij,jk->ik", mk, psik)
    psi = eng.to_position(psik, steps)
    positions = np.arange(-steps, steps + 1) + ini.start_position
    return WalkState(psi, positions)


# ---------------------------------------------------------------------------
# Path counting
# ---------------------------------------------------------------------------


def _binom(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def path_counting_amplitudes(n: int, t: int) -> tuple[float, float]:
    """Hadamard amplitudes ``(psi_L, psi_R)`` at position ``n`` after ``t`` steps.

    The walk starts in ``|0>_c ⊗ |0>_p``; ``psi_R`` is the coin-0 amplitude
    and ``psi_L`` the coin-1 amplitude. With ``l = (t - n)/2`` left moves,

    ``psi_L = 2^{-t/2} sum_k C(l-1, k) C(t-l, k) (-1)^{l-k-1}``
    ``psi_R = 2^{-t/2} sum_k C(l-1, k-1) C(t-l, k) (-1)^{l-k}``

    valid for ``-t <= n < t``. The remaining site ``n = t`` is the single
    all-right path with amplitude ``(0, 2^{-t/2})``. Parity violations and
    sites outside the light cone return ``(0, 0)``.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if abs(n) > t or (n + t) % 2:
        return 0.0, 0.0
    scale = 2.0 ** (-t / 2.0)
    if n == t:
        return 0.0, scale
    l = (t - n) // 2
    psi_l = sum(_binom(l - 1, k) * _binom(t - l, k) * (-1) ** (l - k - 1) for k in range(t + 1))
    psi_r = sum(_binom(l - 1, k - 1) * _binom(t - l, k) * (-1) ** (l - k) for k in range(t + 1))
    return psi_l * scale, psi_r * scale


def path_counting_state(t: int) -> WalkState:
    """:func:`path_counting_amplitudes` assembled into a :class:`WalkState`."""
    amps = np.zeros((2, 2 * t + 1), dtype=np.complex128)
    for j, n in enumerate(range(-t, t + 1)):
        psi_l, psi_r = path_counting_amplitudes(n, t)
        amps[0, j] = psi_r
        amps[1, j] = psi_l
    return WalkState(amps, np.arange(-t, t + 1))


# ---------------------------------------------------------------------------
# Absorbing boundaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierSpec:
    """Absorbing boundary layout.

    ``mode`` is ``"none"``, ``"semi_infinite"`` (``left`` is the barrier
    site, walk on ``x >= left``) or ``"two_barriers"`` (``left < right``).
    """

    mode: Literal["none", "semi_infinite", "two_barriers"] = "none"
    left: int | None = None
    right: int | None = None

    @classmethod
    def semi_infinite(cls, barrier: int = 0) -> "BarrierSpec":
        return cls("semi_infinite", barrier, None)

    @classmethod
    def two_barriers(cls, left: int, right: int) -> "BarrierSpec":
        if not left < right:
            raise DomainError("two barriers need left < right")
        return cls("two_barriers", left, right)


@dataclass(frozen=True)
class AbsorptionRecord:
    """Cumulative absorption after each step.

    ``left[s]`` and ``right[s]`` are the probabilities absorbed at the left
    and right barriers by step ``s`` (index 0 is the measurement on the
    initial state). ``survivor`` is the unabsorbed norm after the last step.
    """

    left: NDArray[np.float64]
    right: NDArray[np.float64]
    survivor: float

    @property
    def p(self) -> float:
        return float(self.left[-1])

    @property
    def q(self) -> float:
        return float(self.right[-1])

    @property
    def total(self) -> float:
        """Absorbed plus surviving probability; 1 up to round-off."""
        return self.p + self.q + self.survivor


def absorbing_walk(
    barriers: BarrierSpec,
    coin: CoinSpec | ArrayLike | None = None,
    init: InitSpec | ArrayLike | None = None,
    max_steps: int = 1000,
    backend: str | None = None,
) -> AbsorptionRecord:
    """Walk with projective measurements ``|x><x|`` at barrier sites.

    Each step applies ``S (C ⊗ I)`` and then removes (and books) the
    amplitude found on the barrier sites. The initial state is measured
    once before the first step.

    Parameters
    ----------
    barriers : BarrierSpec
    coin : CoinSpec or array_like, optional
        Constant 2x2 coin (Hadamard by default).
    init : InitSpec, optional
        Start position and coin state.
    max_steps : int
        Truncation horizon ``T``.
    backend : {"numba", "numpy"}, optional
        Kernel implementation.
    """
    if max_steps < 1:
        raise DomainError("max_steps must be >= 1")
    cs = _as_coin(coin)
    ini = _as_init(init)
    if cs.dim != 2:
        raise DimensionError("line walks need a 2x2 coin")
    x0 = ini.start_position
    if barriers.mode == "two_barriers":
        lo, hi = barriers.left, barriers.right
        if not lo <= x0 <= hi:
            raise DomainError("start must lie between the barriers")
        right_idx = hi - lo
    elif barriers.mode == "semi_infinite":
        lo = barriers.left
        if x0 < lo:
            raise DomainError("start must lie on the walk side of the barrier")
        hi = x0 + max_steps + 1
        right_idx = -1
    else:
        lo = x0 - max_steps - 1
        hi = x0 + max_steps + 1
        right_idx = -1
    width = hi - lo + 1
    left_idx = 0 if barriers.mode != "none" else -1
    if cs.is_constant:
        left, right, surv = _kernels.absorbing_run(
            cs.matrix(), ini.coin_amplitudes, width, x0 - lo, left_idx, right_idx, max_steps,
            backend=backend,
        )
    else:
        psi = np.zeros((2, width), dtype=np.complex128)
        psi[:, x0 - lo] = ini.coin_amplitudes
        left, right, surv = _absorbing_sequence(cs, psi, left_idx, right_idx, max_steps)
    return AbsorptionRecord(left, right, surv)


def _absorbing_sequence(cs, psi, left_idx, right_idx, steps):
    left = np.zeros(steps + 1)
    right = np.zeros(steps + 1)
    a_l = a_r = 0.0

    def measure(p):
        nonlocal a_l, a_r
        if left_idx >= 0:
            a_l += float(np.sum(np.abs(p[:, left_idx]) ** 2))
            p[:, left_idx] = 0
        if right_idx >= 0:
            a_r += float(np.sum(np.abs(p[:, right_idx]) ** 2))
            p[:, right_idx] = 0

    measure(psi)
    left[0], right[0] = a_l, a_r
    for s in range(steps):
        psi = line_step(psi, cs.at(s))
        measure(psi)
        left[s + 1], right[s + 1] = a_l, a_r
    return left, right, float(np.sum(np.abs(psi) ** 2))
