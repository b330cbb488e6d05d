"""
Szegedy quantization of Markov chains.

For a chain ``P`` on ``n`` states the walk lives on ``C^n ⊗ C^n`` (basis
index ``x * n + y``) with

    phi_x = sum_y sqrt(p[x, y]) |x, y>,    psi_y = sum_x sqrt(q[y, x]) |x, y>,

``A = (phi_x)``, ``B = (psi_y)`` and ``W = (2 A A^† - I)(2 B B^† - I)``.
Without an explicit ``Q`` the chain is quantized with ``Q = P``, i.e.
``q[y, x] = p[y, x]``, which keeps both ``A`` and ``B`` isometric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .classical import StochasticMatrix
from .core import DimensionError, DomainError

MAX_STATES = 32


@dataclass(frozen=True)
class SzegedyWalk:
    """Isometries ``A``, ``B`` and the walk operator ``W`` of a chain."""

    P: StochasticMatrix
    Q: StochasticMatrix
    A: NDArray[np.float64] = field(repr=False)
    B: NDArray[np.float64] = field(repr=False)
    W: NDArray[np.float64] = field(repr=False)

    @property
    def n(self) -> int:
        return self.P.n

    def isometry_defect(self) -> float:
        """``max(|A^†A - I|, |B^†B - I|)``."""
        e = np.eye(self.n)
        return float(max(np.max(np.abs(self.A.T @ self.A - e)), np.max(np.abs(self.B.T @ self.B - e))))

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.W.T @ self.W - np.eye(self.n**2))))

    def discriminant(self) -> NDArray[np.float64]:
        """``D = A^† B``, entries ``sqrt(p[x, y] q[y, x])``."""
        return self.A.T @ self.B

    def busy_subspace_leak(self) -> float:
        """``|(I - Pi) W Pi|`` for the projector ``Pi`` onto ``span(A, B)``."""
        m = np.hstack([self.A, self.B])
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        r = int(np.sum(s > 1e-10 * s.max()))
        basis = u[:, :r]
        pi = basis @ basis.T
        return float(np.max(np.abs((np.eye(self.n**2) - pi) @ self.W @ pi)))


def _as_stochastic(P: StochasticMatrix | ArrayLike) -> StochasticMatrix:
    return P if isinstance(P, StochasticMatrix) else StochasticMatrix(np.asarray(P, dtype=float))


def quantize(P: StochasticMatrix | ArrayLike, Q: StochasticMatrix | ArrayLike | None = None) -> SzegedyWalk:
    """Build the Szegedy walk of ``P`` (and ``Q``, default ``Q = P``).

    Raises
    ------
    NormalizationError
        If ``P`` or ``Q`` is not row-stochastic.
    DomainError
        Above ``n = 32`` states (dense ``n^2 x n^2`` representation).
    """
    p = _as_stochastic(P)
    q = p if Q is None else _as_stochastic(Q)
    n = p.n
    if q.n != n:
        raise DimensionError("P and Q must have the same size")
    if n > MAX_STATES:
        raise DomainError(f"{n} states exceed the dense limit {MAX_STATES}")
    x = np.repeat(np.arange(n), n)
    y = np.tile(np.arange(n), n)
    A = np.zeros((n * n, n))
    B = np.zeros((n * n, n))
    A[x * n + y, x] = np.sqrt(p.p[x, y])
    B[x * n + y, y] = np.sqrt(q.p[y, x])
    eye = np.eye(n * n)
    W = (2 * A @ A.T - eye) @ (2 * B @ B.T - eye)
    return SzegedyWalk(p, q, A, B, W)


@dataclass(frozen=True)
class SpectrumCheck:
    """Eigenphases of ``W`` against the phases predicted from ``D``.

    Each singular value ``sigma`` of ``D`` in ``(0, 1)`` predicts the pair
    ``exp(+-2i arccos sigma)``; ``mismatch`` is the largest distance from a
    predicted eigenvalue to the spectrum of ``W``. Counting multiplicity,
    the eigenvalues away from ``+-1`` must be exactly these pairs.
    """

    eigenvalues: NDArray[np.complex128]
    singular_values: NDArray[np.float64]
    predicted: NDArray[np.complex128]
    mismatch: float
    count_ok: bool


def spectrum_check(walk: SzegedyWalk, tol: float = 1e-9) -> SpectrumCheck:
    lam = np.linalg.eigvals(walk.W)
    s = np.linalg.svd(walk.discriminant(), compute_uv=False)
    inner = s[(s > tol) & (s < 1 - tol)]
    theta = np.arccos(inner)
    pred = np.concatenate([np.exp(2j * theta), np.exp(-2j * theta)])
    mism = float(max((np.min(np.abs(lam - z)) for z in pred), default=0.0))
    off = int(np.sum((np.abs(lam - 1) > 1e-7) & (np.abs(lam + 1) > 1e-7)))
    return SpectrumCheck(lam, s, pred, mism, off == pred.size)


def start_state(walk: SzegedyWalk) -> NDArray[np.float64]:
    """``(1/sqrt n) sum_x phi_x``."""
    return walk.A.sum(axis=1) / np.sqrt(walk.n)


@dataclass(frozen=True)
class DetectionResult:
    """Probability of the marked slice of the first register per step."""

    trajectory: NDArray[np.float64]
    threshold: float
    first_crossing: int | None


def detect_marked(
    P: StochasticMatrix | ArrayLike,
    marked: Iterable[int],
    max_steps: int = 200,
    threshold: float = 0.2,
    marking: Literal["phase", "absorbing"] = "phase",
) -> DetectionResult:
    """Marked-element detection with the quantized chain.

    The start is the uniform superposition of the ``phi_x`` of ``P``.

    Parameters
    ----------
    P : StochasticMatrix or array_like
    marked : iterable of int
    max_steps : int
    threshold : float
        ``first_crossing`` is the first ``t`` with probability ``> threshold``.
    marking : {"phase", "absorbing"}
        ``phase`` iterates ``W(P) (I - 2 Pi_M ⊗ I)``; ``absorbing`` iterates
        ``W(P')`` where ``P'`` makes the marked states absorbing.

    Raises
    ------
    DomainError
        If ``marked`` is empty or contains an invalid state.
    """
    p = _as_stochastic(P)
    n = p.n
    m = sorted({int(v) for v in marked})
    if not m:
        raise DomainError("marked set is empty")
    if not all(0 <= v < n for v in m):
        raise DomainError(f"marked states must lie in 0..{n - 1}")
    base = quantize(p)
    psi = start_state(base)
    if marking == "phase":
        sign = np.ones(n)
        sign[m] = -1.0
        U = base.W * np.repeat(sign, n)[None, :]
    elif marking == "absorbing":
        pp = np.array(p.p)
        pp[m, :] = 0.0
        pp[m, m] = 1.0
        U = quantize(pp).W
    else:
        raise DomainError(f"unknown marking {marking!r}")
    sel = np.zeros(n * n, dtype=bool)
    for v in m:
        sel[v * n : (v + 1) * n] = True
    traj = np.empty(max_steps + 1)
    for t in range(max_steps + 1):
        traj[t] = float(np.sum(psi[sel] ** 2))
        if t < max_steps:
            psi = U @ psi
    hit = np.nonzero(traj > threshold)[0]
    return DetectionResult(traj, threshold, int(hit[0]) if hit.size else None)


def lazy_cycle_chain(n: int, hold: float = 1.0 / 3.0) -> StochasticMatrix:
    """Walk on the n-cycle staying put with probability ``hold``."""
    if n < 3:
        raise DomainError("cycle chain needs n >= 3")
    if not 0.0 <= hold < 1.0:
        raise DomainError("hold must lie in [0, 1)")
    p = np.zeros((n, n))
    for x in range(n):
        p[x, x] += hold
        p[x, (x + 1) % n] += (1 - hold) / 2
        p[x, (x - 1) % n] += (1 - hold) / 2
    return StochasticMatrix(p)


def read_stochastic_matrix(source: str | Path) -> StochasticMatrix:
    """Parse a size header line followed by ``n`` rows of ``n`` numbers.

    ``source`` is a path, or the text itself when it contains a newline.
    ``#`` starts a comment.
    """
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or len(rows[0]) != 1:
        raise DomainError("first line must hold the matrix size")
    try:
        n = int(rows[0][0])
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise DomainError(f"malformed matrix file: {exc}") from exc
    if data.shape != (n, n):
        raise DimensionError(f"header says {n}x{n}, found {data.shape}")
    return StochasticMatrix(data)


__all__ = [
    "DetectionResult",
    "SpectrumCheck",
    "SzegedyWalk",
    "detect_marked",
    "lazy_cycle_chain",
    "quantize",
    "read_stochastic_matrix",
    "spectrum_check",
    "start_state",
]
