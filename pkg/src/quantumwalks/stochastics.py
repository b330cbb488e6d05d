"""
Decoherence of the coined line walk.

Per step, after ``S (C ⊗ I)``:

* each link ``(x, x+1)`` is broken with probability ``broken_link_p``; an
  amplitude trying to cross a broken link stays put with its coin flipped
  and multiplied by ``bounce`` (unitary for each realisation);
* the coin is measured in the computational basis with probability
  ``coin_measure_p``;
* the position is measured with probability ``position_measure_p``.

Trajectories are sampled from a counter-based stream keyed by
``(seed, trial)``, in fixed blocks, so the average is identical for any
number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import _kernels
from .classical import fit_exponent
from .core import DimensionError, DomainError, InitSpec, NumericalError, ProbDist, position_distribution
from .line_walks import CoinSpec, _as_coin, _as_init, evolve

BLOCK = 1024


@dataclass(frozen=True)
class DecoherenceModel:
    """Measurement and broken-link rates for a decohered line walk."""

    coin_measure_p: float = 0.0
    position_measure_p: float = 0.0
    broken_link_p: float = 0.0
    seed: int = 0
    bounce: float = 1.0

    def __post_init__(self) -> None:
        for name in ("coin_measure_p", "position_measure_p", "broken_link_p"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if self.bounce not in (1.0, -1.0):
            raise DomainError("bounce phase must be +1 or -1")

    @property
    def is_unitary(self) -> bool:
        return self.coin_measure_p == 0 and self.position_measure_p == 0 and self.broken_link_p == 0

    @property
    def is_markovian(self) -> bool:
        """Whether the walk stays on ``|c>|x>`` basis states after every step.

        True for a fully measured coin. A fully measured position also
        leaves a basis coin, unless a bounce can overlap a crossing
        amplitude at the same site.
        """
        if self.coin_measure_p == 1.0:
            return True
        return self.position_measure_p == 1.0 and self.broken_link_p == 0.0


def _exact_classical(
    steps: int, c: NDArray[np.complex128], chi: NDArray[np.complex128], model: DecoherenceModel
) -> NDArray[np.float64]:
    w = 2 * steps + 1
    pb = model.broken_link_p
    m = np.abs(c) ** 2
    # prob[k, x]: coin basis k at offset x; the first step starts coherent
    prob = np.zeros((2, w))
    pre = np.abs(c @ chi) ** 2

    def step(a0, a1):
        # a0, a1: weights sent toward coin 0 (right) and coin 1 (left)
        out = np.zeros((2, w))
        out[0, 1:] += (1 - pb) * a0[:-1]
        out[1, :] += pb * a0
        out[1, :-1] += (1 - pb) * a1[1:]
        out[0, :] += pb * a1
        return out

    if steps == 0:
        return np.zeros(1) + 1.0
    a0 = np.zeros(w)
    a1 = np.zeros(w)
    a0[steps], a1[steps] = pre
    prob = step(a0, a1)
    for _ in range(steps - 1):
        prob = step(m[0, 0] * prob[0] + m[0, 1] * prob[1], m[1, 0] * prob[0] + m[1, 1] * prob[1])
    return prob.sum(axis=0)


def _block_sums(c, chi, steps, model, n_trials, workers, backend):
    starts = list(range(0, n_trials, BLOCK))

    def run(s0):
        return _kernels.trajectory_sum(
            c, chi, steps, model.coin_measure_p, model.position_measure_p,
            model.broken_link_p, model.bounce, model.seed,
            min(BLOCK, n_trials - s0), trial_offset=s0, backend=backend,
        )

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, starts))
    else:
        parts = [run(s0) for s0 in starts]
    acc = np.sum(np.stack([p[0] for p in parts]), axis=0)
    return acc, max(p[1] for p in parts)


@dataclass(frozen=True)
class DecoheredDistribution:
    """Averaged position law with the worst per-trajectory norm defect."""

    dist: ProbDist
    n_trials: int
    norm_defect: float
    mode: str


def decohere_evolve(
    steps: int,
    coin: CoinSpec | ArrayLike | None = None,
    init: InitSpec | ArrayLike | None = None,
    model: DecoherenceModel | None = None,
    mode: Literal["trajectories", "exact_classical"] = "trajectories",
    n_trials: int = 1000,
    workers: int = 1,
    backend: str | None = None,
) -> DecoheredDistribution:
    """Position distribution of the decohered walk after ``steps`` steps.

    Parameters
    ----------
    steps : int
    coin : CoinSpec or array_like, optional
        Constant 2x2 coin, Hadamard by default.
    init : InitSpec or array_like, optional
        Defaults to ``|0>_c ⊗ |0>_p``.
    model : DecoherenceModel, optional
        All rates zero by default.
    mode : {"trajectories", "exact_classical"}
        ``exact_classical`` propagates the Markov chain of the fully measured
        walk and needs ``model.is_markovian``.
    n_trials : int
        Trajectories averaged in ``trajectories`` mode.
    workers : int
        Threads sharing the trajectory blocks; does not change the result.

    Raises
    ------
    DomainError
        For ``exact_classical`` with partial measurement rates, or a coin
        that changes with the step.
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    model = model or DecoherenceModel()
    cs = _as_coin(coin)
    ini = _as_init(init)
    if cs.dim != 2 or ini.dim != 2:
        raise DimensionError("decoherence is implemented for 2-state coins on the line")
    if not cs.is_constant:
        raise DomainError("decoherence needs a constant coin")
    support = np.arange(-steps, steps + 1) + ini.start_position
    c = cs.matrix()
    if mode == "exact_classical":
        if not model.is_markovian:
            raise DomainError(
                "exact_classical needs coin_measure_p = 1, or position_measure_p = 1 "
                "without broken links"
            )
        p = _exact_classical(steps, c, ini.coin_amplitudes, model)
        return DecoheredDistribution(ProbDist(support, p / p.sum()), 0, 0.0, mode)
    if mode != "trajectories":
        raise DomainError(f"unknown mode {mode!r}")
    if model.is_unitary:
        d = position_distribution(evolve(steps, cs, ini))
        return DecoheredDistribution(d, 1, 0.0, "unitary")
    if n_trials < 1:
        raise DomainError("n_trials must be >= 1")
    acc, err = _block_sums(c, ini.coin_amplitudes, steps, model, n_trials, workers, backend)
    p = acc / n_trials
    return DecoheredDistribution(ProbDist(support, p / p.sum()), n_trials, err, mode)


def variance_exponent(
    model: DecoherenceModel,
    coin: CoinSpec | ArrayLike | None = None,
    t_grid: Sequence[int] = (10, 20, 40, 80, 160),
    init: InitSpec | ArrayLike | None = None,
    n_trials: int = 1000,
    workers: int = 1,
    backend: str | None = None,
) -> float:
    """Slope ``a`` of ``Var(t) ∝ t^a`` on a log-log grid.

    Uses the exact Markov chain when the model allows it.

    Raises
    ------
    DomainError
        If ``t_grid`` has fewer than 4 points or spans less than a decade.
    NumericalError
        If some variance is zero.
    """
    ts = np.asarray(sorted(set(int(t) for t in t_grid)))
    if ts.size < 4 or ts[0] <= 0 or ts[-1] < 10 * ts[0]:
        raise DomainError("t_grid needs >= 4 positive points spanning a decade")
    mode = "exact_classical" if model.is_markovian else "trajectories"
    var = np.array(
        [
            decohere_evolve(int(t), coin, init, model, mode, n_trials, workers, backend).dist.variance()
            for t in ts
        ]
    )
    if np.any(var <= 0):
        raise NumericalError("variance vanishes on the grid; exponent undefined")
    return fit_exponent(ts, var)


__all__ = [
    "BLOCK",
    "DecoheredDistribution",
    "DecoherenceModel",
    "decohere_evolve",
    "variance_exponent",
]
