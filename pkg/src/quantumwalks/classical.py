"""
Classical random-walk baselines.

Exact binomial laws on the line, stationary distributions of simple random
walks on graphs, Monte Carlo hitting times and absorbing-chain (fundamental
matrix) hitting times.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from . import _kernels
from .core import DimensionError, DomainError, NormalizationError, NumericalError, ProbDist
from .graph_walks import Graph

ROW_TOL = 1e-12


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic transition matrix ``P[x, y] = p(x -> y)``.

    Raises
    ------
    NormalizationError
        If an entry is negative or a row does not sum to 1 within ``1e-12``.
    """

    p: NDArray[np.float64]

    def __post_init__(self) -> None:
        a = np.array(self.p, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DimensionError(f"transition matrix must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NormalizationError("transition matrix has NaN or Inf entries")
        if np.any(a < 0):
            raise NormalizationError("transition probabilities must be nonnegative")
        dev = np.max(np.abs(a.sum(axis=1) - 1.0))
        if dev > ROW_TOL:
            raise NormalizationError(f"rows must sum to 1 (max deviation {dev:.3e})")
        a.setflags(write=False)
        object.__setattr__(self, "p", a)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @classmethod
    def from_graph(cls, g: Graph) -> "StochasticMatrix":
        """Simple random walk ``P = D^{-1} A``."""
        a = g.adjacency()
        deg = a.sum(axis=1)
        if np.any(deg == 0):
            raise DomainError("isolated vertex has no outgoing transition")
        return cls(a / deg[:, None])

    def csr(self) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.float64]]:
        """``indptr, indices, cumulative`` row data of the nonzero entries."""
        indptr = [0]
        indices: list[int] = []
        cum: list[float] = []
        for row in self.p:
            nz = np.nonzero(row)[0]
            c = np.cumsum(row[nz])
            c[-1] = 1.0
            indices.extend(nz.tolist())
            cum.extend(c.tolist())
            indptr.append(len(indices))
        return (
            np.array(indptr, dtype=np.int64),
            np.array(indices, dtype=np.int64),
            np.array(cum, dtype=np.float64),
        )

    def reachable_from(self, source: int) -> NDArray[np.bool_]:
        seen = np.zeros(self.n, dtype=bool)
        seen[source] = True
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in np.nonzero(self.p[x])[0]:
                if not seen[y]:
                    seen[y] = True
                    queue.append(int(y))
        return seen


def binomial_line_distribution(n: int, p: float = 0.5) -> ProbDist:
    """Law of ``Z_n`` for the +-1 walk with right-step probability ``p``.

    The support is ``-n..n``; positions with ``n + k`` odd carry zero mass.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    k = np.arange(-n, n + 1)
    probs = np.zeros(k.size)
    even = (k + n) % 2 == 0
    j = (k[even] + n) // 2
    # log space: scipy's binom.pmf overflows for p near the smallest normal double
    logp = special.gammaln(n + 1) - special.gammaln(j + 1) - special.gammaln(n - j + 1)
    probs[even] = np.exp(logp + special.xlogy(j, p) + special.xlog1py(n - j, -p))
    return ProbDist(k, probs / probs.sum())


def line_walk_variance(n: int, p: float = 0.5) -> float:
    """``4 n p (1 - p)``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    return 4.0 * n * p * (1.0 - p)


def stationary_distribution(g: Graph) -> ProbDist:
    """``pi_v = deg(v) / 2m`` for the simple random walk on a connected graph.

    Raises
    ------
    DomainError
        If the graph is disconnected or has no edges.
    """
    if g.n == 0 or g.n_edges == 0:
        raise DomainError("graph has no edges")
    if not g.is_connected():
        raise DomainError("stationary distribution is not unique on a disconnected graph")
    deg = g.adjacency().sum(axis=1)
    return ProbDist(np.arange(g.n), deg / deg.sum())


@dataclass(frozen=True)
class HittingEstimate:
    """Monte Carlo mean hitting time with its standard error."""

    mean: float
    stderr: float
    n_trials: int

    def ci(self, z: float = 1.96) -> tuple[float, float]:
        return self.mean - z * self.stderr, self.mean + z * self.stderr


def _as_chain(g: Graph | StochasticMatrix | ArrayLike) -> StochasticMatrix:
    if isinstance(g, StochasticMatrix):
        return g
    if isinstance(g, Graph):
        return StochasticMatrix.from_graph(g)
    return StochasticMatrix(np.asarray(g, dtype=float))


def _target_mask(n: int, target: int | Iterable[int]) -> NDArray[np.bool_]:
    targets = [target] if isinstance(target, (int, np.integer)) else list(target)
    mask = np.zeros(n, dtype=bool)
    for t in targets:
        if not 0 <= t < n:
            raise DomainError(f"target {t} outside 0..{n - 1}")
        mask[int(t)] = True
    return mask


def hitting_time_estimate(
    g: Graph | StochasticMatrix | ArrayLike,
    source: int,
    target: int | Iterable[int],
    trials: int = 10_000,
    seed: int = 0,
    max_steps: int = 10_000_000,
    backend: str | None = None,
) -> HittingEstimate:
    """Monte Carlo estimate of the expected first-passage time.

    Trial ``i`` draws from the counter-based stream keyed by ``(seed, i)``,
    so the estimate does not depend on the order the trials run in.

    Raises
    ------
    DomainError
        If the target cannot be reached with probability 1 from ``source``.
    NumericalError
        If some trial has not hit the target after ``max_steps`` steps.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    chain = _as_chain(g)
    if not 0 <= source < chain.n:
        raise DomainError(f"source {source} outside 0..{chain.n - 1}")
    mask = _target_mask(chain.n, target)
    if not mask[source]:
        reach = chain.reachable_from(source)
        if not np.any(reach & mask):
            raise DomainError("target is unreachable from the source")
        for x in np.nonzero(reach & ~mask)[0]:
            if not np.any(chain.reachable_from(int(x)) & mask):
                raise DomainError(f"walk can be trapped at {x} without reaching the target")
    indptr, indices, cum = chain.csr()
    steps = _kernels.hitting_steps(
        indptr, indices, cum, source, mask, trials, max_steps, seed, backend=backend
    )
    if np.any(steps < 0):
        raise NumericalError(f"{int(np.sum(steps < 0))} trials exceeded max_steps={max_steps}")
    s = steps.astype(np.float64)
    se = float(s.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("nan")
    return HittingEstimate(float(s.mean()), se, trials)


def fundamental_hitting_time(
    P: StochasticMatrix | ArrayLike,
    marked: Iterable[int],
    start: ProbDist | ArrayLike,
) -> float:
    """Expected absorption time into ``marked`` from the law ``start``.

    Solves ``(I - P_M) h = 1`` on the unmarked states, ``P_M`` being ``P``
    with the marked rows and columns deleted, and returns ``sum start * h``.

    Raises
    ------
    NumericalError
        If ``I - P_M`` is singular (some unmarked class never reaches M).
    """
    chain = _as_chain(P)
    n = chain.n
    mask = _target_mask(n, list(marked))
    if isinstance(start, ProbDist):
        w = start.dense(range(n))
    else:
        w = np.asarray(start, dtype=float)
        if w.shape != (n,):
            raise DimensionError(f"start must have length {n}")
    free = np.nonzero(~mask)[0]
    if free.size == 0:
        return 0.0
    pm = chain.p[np.ix_(free, free)]
    a = np.eye(free.size) - pm
    if np.linalg.cond(a) > 1e12:
        raise NumericalError("I - P_M is singular: the chain is not absorbing into M")
    h = np.linalg.solve(a, np.ones(free.size))
    return float(np.dot(w[free], h))


def read_edge_list(source: str | Path, n: int | None = None) -> Graph:
    """Parse ``u v`` lines (0-based ids, ``#`` comments) into a :class:`Graph`.

    ``source`` is a path, or the text itself when it contains a newline.
    """
    text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DomainError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DomainError(f"line {lineno}: vertex ids must be integers") from exc
        if u < 0 or v < 0:
            raise DomainError(f"line {lineno}: vertex ids must be nonnegative")
        edges.append((u, v))
    size = n if n is not None else (max(max(e) for e in edges) + 1 if edges else 0)
    return Graph.from_edges(size, edges)


def fit_exponent(x: ArrayLike, y: ArrayLike) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


__all__ = [
    "HittingEstimate",
    "StochasticMatrix",
    "binomial_line_distribution",
    "fit_exponent",
    "fundamental_hitting_time",
    "hitting_time_estimate",
    "line_walk_variance",
    "read_edge_list",
    "stationary_distribution",
]
