"""
Coined quantum walks on finite graphs.

A :class:`Graph` stores ordered neighbour lists; the position of a neighbour
in the list is the coin port (edge label) used by the walk. Amplitudes live
in a ``(d, n)`` array, coin port first, exactly like the line walks.

Two shift conventions are provided:

``moving``
    ``|j, v> -> |j, nbr_j(v)>``. Needs every port map ``v -> nbr_j(v)`` to be
    a bijection (cycles, hypercubes). On a cycle with port 0 = ``+1`` this
    reproduces the line walk exactly until the wave front wraps around.
``flip_flop``
    ``|j, v> -> |j', w>`` where ``j'`` is the port of ``w = nbr_j(v)`` that
    points back to ``v``. Always a permutation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal, Mapping, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .core import (
    DimensionError,
    DomainError,
    InitSpec,
    ProbDist,
    WalkState,
    as_unitary,
    total_variation,
)
from .line_walks import CoinSpec, grover_matrix, hadamard_matrix

Shift = Literal["moving", "flip_flop"]

MAX_HYPERCUBE_DIM = 16


@dataclass(frozen=True)
class Graph:
    """Undirected graph with ordered neighbour lists.

    Parameters
    ----------
    neighbors : sequence of sequence of int
        ``neighbors[v][j]`` is the vertex reached from ``v`` through port
        ``j``. Parallel edges appear repeatedly.
    marked : iterable of int, optional
        Marked vertices (search targets, ENTRANCE/EXIT, ...).
    reverse_ports : sequence of sequence of int, optional
        ``reverse_ports[v][j]`` is the port of ``neighbors[v][j]`` leading
        back to ``v``. Derived by matching occurrences when omitted.
    attrs : mapping, optional
        Free-form metadata (roots, column index of each vertex, ...).
    """

    neighbors: tuple[tuple[int, ...], ...]
    marked: frozenset[int] = frozenset()
    reverse_ports: tuple[tuple[int, ...], ...] | None = None
    attrs: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        nb = tuple(tuple(int(w) for w in row) for row in self.neighbors)
        n = len(nb)
        for v, row in enumerate(nb):
            for w in row:
                if not 0 <= w < n:
                    raise DomainError(f"vertex {v} has neighbour {w} outside 0..{n - 1}")
        for v, row in enumerate(nb):
            for w in set(row):
                if row.count(w) != nb[w].count(v):
                    raise DomainError(f"edge {v}-{w} is not symmetric")
        rev = self.reverse_ports
        if rev is None:
            rev = _match_reverse_ports(nb)
        else:
            rev = tuple(tuple(int(j) for j in row) for row in rev)
            for v, row in enumerate(nb):
                if len(rev[v]) != len(row):
                    raise DimensionError(f"reverse_ports[{v}] has the wrong length")
                for j, w in enumerate(row):
                    jj = rev[v][j]
                    if nb[w][jj] != v or rev[w][jj] != j:
                        raise DomainError(f"reverse port of ({v}, {j}) is inconsistent")
        marked = frozenset(int(m) for m in self.marked)
        for m in marked:
            if not 0 <= m < n:
                raise DomainError(f"marked vertex {m} outside 0..{n - 1}")
        object.__setattr__(self, "neighbors", nb)
        object.__setattr__(self, "reverse_ports", rev)
        object.__setattr__(self, "marked", marked)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[tuple[int, int]], marked: Iterable[int] = ()
    ) -> "Graph":
        """Build from an undirected edge list; ports follow insertion order."""
        nb: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) outside 0..{n - 1}")
            nb[u].append(v)
            if u != v:
                nb[v].append(u)
        return cls(tuple(map(tuple, nb)), frozenset(marked))

    @classmethod
    def cycle(cls, n: int, marked: Iterable[int] = ()) -> "Graph":
        """n-cycle with port 0 -> ``v+1`` and port 1 -> ``v-1`` (mod n)."""
        if n < 2:
            raise DomainError("a cycle needs n >= 2")
        nb = tuple(((v + 1) % n, (v - 1) % n) for v in range(n))
        rev = tuple((1, 0) for _ in range(n))
        return cls(nb, frozenset(marked), rev, {"kind": "cycle"})

    @classmethod
    def hypercube(cls, dim: int, marked: Iterable[int] = ()) -> "Graph":
        """Hypercube on ``2**dim`` bit strings; port ``d`` flips bit ``d``."""
        if not 1 <= dim <= MAX_HYPERCUBE_DIM:
            raise DomainError(f"hypercube dimension must lie in 1..{MAX_HYPERCUBE_DIM}")
        n = 1 << dim
        nb = tuple(tuple(v ^ (1 << d) for d in range(dim)) for v in range(n))
        rev = tuple(tuple(range(dim)) for _ in range(n))
        return cls(nb, frozenset(marked), rev, {"kind": "hypercube", "dim": dim})

    # -- queries ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.neighbors)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @property
    def degrees(self) -> NDArray[np.int64]:
        return np.array([len(r) for r in self.neighbors], dtype=np.int64)

    @property
    def n_edges(self) -> int:
        loops = sum(row.count(v) for v, row in enumerate(self.neighbors))
        return (int(self.degrees.sum()) - loops) // 2 + loops

    def regular_degree(self) -> int | None:
        """Common degree if the graph is regular, else ``None``."""
        d = self.degrees
        return int(d[0]) if d.size and np.all(d == d[0]) else None

    def adjacency(self) -> NDArray[np.float64]:
        """Dense adjacency matrix (parallel edges add up)."""
        a = np.zeros((self.n, self.n))
        for v, row in enumerate(self.neighbors):
            for w in row:
                a[v, w] += 1.0
        return a

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in self.neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        return bool(seen.all())

    def with_marked(self, marked: Iterable[int]) -> "Graph":
        return Graph(self.neighbors, frozenset(marked), self.reverse_ports, dict(self.attrs))


def _match_reverse_ports(nb: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    # k-th occurrence of w in nb[v] pairs with the k-th occurrence of v in nb[w]
    rev: list[list[int]] = []
    for v, row in enumerate(nb):
        seen: dict[int, int] = {}
        out = []
        for w in row:
            k = seen.get(w, 0)
            seen[w] = k + 1
            if w == v:
                # self-loop occurrences pair up with themselves
                out.append(len(out))
                continue
            ports = [j for j, u in enumerate(nb[w]) if u == v]
            out.append(ports[k])
        rev.append(out)
    return tuple(map(tuple, rev))


# ---------------------------------------------------------------------------
# Shift and evolution
# ---------------------------------------------------------------------------


def shift_permutation(g: Graph, shift: Shift = "moving") -> NDArray[np.int64]:
    """Target index of every basis state ``j * n + v`` under the shift.

    Raises
    ------
    DimensionError
        If the graph is not regular.
    DomainError
        If ``moving`` is requested but a port map is not a bijection.
    """
    d = g.regular_degree()
    if d is None:
        raise DimensionError("coined walks need a regular graph")
    n = g.n
    nb = np.array(g.neighbors, dtype=np.int64).reshape(n, d)
    if shift == "moving":
        for j in range(d):
            if np.unique(nb[:, j]).size != n:
                raise DomainError(f"port {j} is not a bijection; use the flip-flop shift")
        target = np.arange(d)[:, None] * n + nb.T
    elif shift == "flip_flop":
        rev = np.array(g.reverse_ports, dtype=np.int64).reshape(n, d)
        target = rev.T * n + nb.T
    else:
        raise DomainError(f"unknown shift {shift!r}")
    return target.reshape(-1)


def shift_matrix(g: Graph, shift: Shift = "moving") -> NDArray[np.float64]:
    """Dense permutation matrix of the shift (for audits on small graphs)."""
    perm = shift_permutation(g, shift)
    m = np.zeros((perm.size, perm.size))
    m[perm, np.arange(perm.size)] = 1.0
    return m


def _coin_matrix(coin: CoinSpec | ArrayLike | None, d: int) -> NDArray[np.complex128]:
    if coin is None:
        return grover_matrix(d) if d != 2 else hadamard_matrix()
    if isinstance(coin, CoinSpec):
        if not coin.is_constant:
            raise DomainError("graph walks take a constant coin")
        c = coin.matrix()
    else:
        c = as_unitary(coin)
    if c.shape != (d, d):
        raise DimensionError(f"coin is {c.shape[0]}x{c.shape[1]} but the graph is {d}-regular")
    return c


def _initial_state(g: Graph, init: WalkState | InitSpec | ArrayLike | None, d: int) -> NDArray[np.complex128]:
    if init is None:
        init = InitSpec(np.full(d, 1 / np.sqrt(d)), 0)
    if isinstance(init, WalkState):
        if init.amplitudes.shape != (d, g.n):
            raise DimensionError(f"state shape {init.amplitudes.shape} != ({d}, {g.n})")
        return np.array(init.amplitudes)
    if not isinstance(init, InitSpec):
        init = InitSpec(init, 0)
    if init.dim != d:
        raise DimensionError(f"initial coin has dimension {init.dim}, graph degree is {d}")
    if not 0 <= init.start_position < g.n:
        raise DomainError(f"start vertex {init.start_position} outside 0..{g.n - 1}")
    psi = np.zeros((d, g.n), dtype=np.complex128)
    psi[:, init.start_position] = init.coin_amplitudes
    return psi


class GraphWalk:
    """Reusable one-step operator ``S (C ⊗ I)`` on a regular graph.

    Parameters
    ----------
    g : Graph
    coin : CoinSpec or array_like, optional
        Coin applied at every vertex (Hadamard for d=2, Grover otherwise).
    shift : {"moving", "flip_flop"}
    vertex_coins : mapping of int to array_like, optional
        Per-vertex coin overrides (e.g. an oracle coin at marked vertices).
    """

    def __init__(
        self,
        g: Graph,
        coin: CoinSpec | ArrayLike | None = None,
        shift: Shift = "moving",
        vertex_coins: Mapping[int, ArrayLike] | None = None,
    ) -> None:
        d = g.regular_degree()
        if d is None:
            raise DimensionError("coined walks need a regular graph")
        self.graph = g
        self.d = d
        self.coin = _coin_matrix(coin, d)
        self.perm = shift_permutation(g, shift)
        self.overrides = {int(v): _coin_matrix(c, d) for v, c in (vertex_coins or {}).items()}
        self._grover = np.allclose(self.coin, grover_matrix(d), atol=0, rtol=0)

    def step(self, psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
        if self._grover:
            # 2|s><s| - I without a d x d matmul (hypercubes)
            phi = (2.0 / self.d) * psi.sum(axis=0, keepdims=True) - psi
        else:
            phi = self.coin @ psi
        for v, c in self.overrides.items():
            phi[:, v] = c @ psi[:, v]
        out = np.empty_like(phi)
        out.reshape(-1)[self.perm] = phi.reshape(-1)
        return out

    def unitary(self) -> NDArray[np.complex128]:
        """Dense ``dn x dn`` step matrix (index ``j * n + v``)."""
        n, d = self.graph.n, self.d
        eye = np.eye(d * n, dtype=np.complex128)
        cols = [self.step(eye[:, k].reshape(d, n)).reshape(-1) for k in range(d * n)]
        return np.array(cols).T


def graph_walk_evolve(
    g: Graph,
    coin: CoinSpec | ArrayLike | None = None,
    init: WalkState | InitSpec | ArrayLike | None = None,
    steps: int = 1,
    shift: Shift = "moving",
    vertex_coins: Mapping[int, ArrayLike] | None = None,
) -> WalkState:
    """Apply ``S (C ⊗ I)`` ``steps`` times.

    Parameters
    ----------
    g : Graph
        Regular graph; ``d`` is its degree.
    coin : CoinSpec or array_like, optional
        ``d x d`` unitary.
    init : WalkState or InitSpec, optional
        Defaults to the uniform coin state at vertex 0.
    steps : int
    shift : {"moving", "flip_flop"}
    vertex_coins : mapping, optional
        Per-vertex coin overrides.

    Raises
    ------
    DimensionError
        Non-regular graph, or coin/initial state of the wrong dimension.
    """
    if steps < 0:
        raise DomainError("steps must be >= 0")
    walk = GraphWalk(g, coin, shift, vertex_coins)
    psi = _initial_state(g, init, walk.d)
    for _ in range(steps):
        psi = walk.step(psi)
    return WalkState(psi, np.arange(g.n))


def distribution_trajectory(
    g: Graph,
    coin: CoinSpec | ArrayLike | None = None,
    init: WalkState | InitSpec | ArrayLike | None = None,
    steps: int = 1,
    shift: Shift = "moving",
    vertex_coins: Mapping[int, ArrayLike] | None = None,
) -> NDArray[np.float64]:
    """Vertex distributions ``P_t`` for ``t = 0..steps`` as a ``(steps+1, n)`` array."""
    walk = GraphWalk(g, coin, shift, vertex_coins)
    psi = _initial_state(g, init, walk.d)
    out = np.empty((steps + 1, g.n))
    for t in range(steps + 1):
        out[t] = np.sum(psi.real**2 + psi.imag**2, axis=0)
        if t < steps:
            psi = walk.step(psi)
    return out


def averaged_distribution(
    g: Graph,
    coin: CoinSpec | ArrayLike | None = None,
    init: WalkState | InitSpec | ArrayLike | None = None,
    T: int = 1,
    shift: Shift = "moving",
) -> ProbDist:
    """Time average ``(1/T) sum_{t=0}^{T-1} P_t(v)``."""
    if T < 1:
        raise DomainError("T must be >= 1")
    traj = distribution_trajectory(g, coin, init, T - 1, shift)
    p = traj.mean(axis=0)
    return ProbDist(np.arange(g.n), p / p.sum())


def averaged_trajectory(
    g: Graph,
    coin: CoinSpec | ArrayLike | None = None,
    init: WalkState | InitSpec | ArrayLike | None = None,
    T: int = 1,
    shift: Shift = "moving",
) -> list[ProbDist]:
    """Running averages ``P̄_1, ..., P̄_T``."""
    traj = distribution_trajectory(g, coin, init, T - 1, shift)
    run = np.cumsum(traj, axis=0) / np.arange(1, T + 1)[:, None]
    return [ProbDist(np.arange(g.n), r / r.sum()) for r in run]


def limiting_average(
    g: Graph,
    coin: CoinSpec | ArrayLike | None = None,
    init: WalkState | InitSpec | ArrayLike | None = None,
    shift: Shift = "moving",
    tol: float = 1e-8,
) -> ProbDist:
    """``lim_{T->inf}`` of the averaged distribution, from the spectrum of U.

    Cross terms between distinct eigenvalues average out, so the limit is
    ``sum_lambda |Pi_lambda psi|^2`` summed over coin ports. Eigenvalues
    closer than ``tol`` are treated as one eigenspace.
    """
    walk = GraphWalk(g, coin, shift)
    psi0 = _initial_state(g, init, walk.d).reshape(-1)
    u = walk.unitary()
    t_mat, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t_mat)
    coef = z.conj().T @ psi0
    order = np.argsort(np.angle(lam))
    groups: list[list[int]] = []
    for k in order:
        if groups and abs(lam[k] - lam[groups[-1][0]]) < tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    # wrap-around at angle +-pi
    if len(groups) > 1 and abs(lam[groups[0][0]] - lam[groups[-1][0]]) < tol:
        groups[0].extend(groups.pop())
    p = np.zeros(g.n)
    for grp in groups:
        proj = (z[:, grp] @ coef[grp]).reshape(walk.d, g.n)
        p += np.sum(np.abs(proj) ** 2, axis=0)
    return ProbDist(np.arange(g.n), p / p.sum())


def instantaneous_mixing_time(
    traj: Sequence[ProbDist], target: ProbDist, eps: float
) -> int | None:
    """First index ``t`` with ``TV(traj[t], target) <= eps``, or ``None``."""
    if len(traj) == 0:
        raise DomainError("trajectory is empty")
    for t, p in enumerate(traj):
        if total_variation(p, target) <= eps:
            return t
    return None


def cycle_average_mixing_time(
    n: int,
    eps: float,
    coin: CoinSpec | ArrayLike | None = None,
    init: InitSpec | None = None,
    max_T: int = 100_000,
) -> int | None:
    """Smallest ``T`` with ``TV(P̄_T, uniform) <= eps`` on the n-cycle."""
    g = Graph.cycle(n)
    traj = distribution_trajectory(g, coin, init, max_T - 1)
    run = np.cumsum(traj, axis=0) / np.arange(1, max_T + 1)[:, None]
    tv = 0.5 * np.abs(run - 1.0 / n).sum(axis=1)
    hit = np.nonzero(tv <= eps)[0]
    return int(hit[0]) + 1 if hit.size else None


# ---------------------------------------------------------------------------
# Hypercube
# ---------------------------------------------------------------------------


def hypercube_walk(
    dim: int,
    steps: int,
    init: WalkState | InitSpec | ArrayLike | None = None,
) -> WalkState:
    """Grover-coin walk ``[S (G ⊗ I)]^t`` on the ``dim``-cube.

    The default start is the uniform coin state at vertex 0.

    Raises
    ------
    DomainError
        If ``dim`` is outside ``1..16`` (state size ``dim * 2**dim``).
    """
    if not 1 <= dim <= MAX_HYPERCUBE_DIM:
        raise DomainError(
            f"hypercube dimension {dim} outside 1..{MAX_HYPERCUBE_DIM} (memory budget)"
        )
    g = Graph.hypercube(dim)
    return graph_walk_evolve(g, grover_matrix(dim), init, steps, shift="flip_flop")


def hamming_weights(dim: int) -> NDArray[np.int64]:
    v = np.arange(1 << dim)
    return np.array([bin(int(x)).count("1") for x in v], dtype=np.int64)


def mixing_window(dim: int) -> tuple[int, int]:
    """Scan window ``[floor(pi n / 4) - 2, ceil(pi n / 4) + 2]``."""
    c = np.pi * dim / 4
    return max(0, int(np.floor(c)) - 2), int(np.ceil(c)) + 2


@dataclass(frozen=True)
class MixingScan:
    """TV distance to the reference for each step of a window."""

    steps: NDArray[np.int64]
    tv: NDArray[np.float64]

    @property
    def best_step(self) -> int:
        return int(self.steps[int(np.argmin(self.tv))])

    @property
    def min_tv(self) -> float:
        return float(self.tv.min())


def hypercube_mixing(
    dim: int,
    window: tuple[int, int] | None = None,
    reference: Literal["uniform", "parity"] = "uniform",
) -> MixingScan:
    """Scan the instantaneous TV distance of the hypercube walk.

    Parameters
    ----------
    dim : int
    window : (int, int), optional
        Inclusive step range; :func:`mixing_window` by default.
    reference : {"uniform", "parity"}
        ``uniform`` compares with ``1/2^n`` on all vertices. The cube is
        bipartite, so at step ``t`` the walk lives on vertices of weight
        parity ``t mod 2`` and that distance never drops below 1/2.
        ``parity`` compares with the uniform law on the reachable parity
        class instead.
    """
    lo, hi = window if window is not None else mixing_window(dim)
    g = Graph.hypercube(dim)
    traj = distribution_trajectory(g, grover_matrix(dim), None, hi, shift="flip_flop")
    n = g.n
    par = hamming_weights(dim) % 2
    ts = np.arange(lo, hi + 1)
    tv = np.empty(ts.size)
    for i, t in enumerate(ts):
        if reference == "uniform":
            ref = np.full(n, 1.0 / n)
        elif reference == "parity":
            ref = np.where(par == t % 2, 2.0 / n, 0.0)
        else:
            raise DomainError(f"unknown reference {reference!r}")
        tv[i] = 0.5 * np.abs(traj[t] - ref).sum()
    return MixingScan(ts, tv)


# ---------------------------------------------------------------------------
# SKW search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a hypercube search run.

    ``trajectory[t]`` is the probability of measuring the marked vertex
    after ``t`` steps; ``success`` is its value at ``t_f``.
    """

    dim: int
    marked: int
    t_f: int
    success: float
    trajectory: NDArray[np.float64]

    @property
    def classical_baseline(self) -> float:
        """Success of ``t_f`` uniform samples counted as ``t_f / 2^n``."""
        return self.t_f / 2**self.dim


def skw_steps(dim: int) -> int:
    """``round(pi/2 * sqrt(2^n))``."""
    return int(round(np.pi / 2 * np.sqrt(2.0**dim)))


def skw_search(
    dim: int,
    marked: int = 0,
    steps: int | None = None,
    marked_coin: Literal["minus_grover", "minus_identity"] = "minus_grover",
) -> SearchResult:
    """Hypercube search with a perturbed coin at the marked vertex.

    The walk starts in the uniform superposition over all coin ports and
    vertices. Unmarked vertices use the Grover coin, the marked vertex uses
    ``-G`` (or ``-I``). From the uniform start both choices give identical
    dynamics because the marked coin state stays uniform.

    Parameters
    ----------
    dim : int
        Hypercube dimension ``n >= 2``.
    marked : int
        Marked vertex.
    steps : int, optional
        Trajectory length; defaults to ``t_f = round(pi/2 sqrt(2^n))``.
    marked_coin : {"minus_grover", "minus_identity"}
    """
    if dim < 2:
        raise DomainError("search needs n >= 2")
    n = 1 << dim
    if not 0 <= marked < n:
        raise DomainError(f"marked vertex {marked} outside 0..{n - 1}")
    t_f = skw_steps(dim)
    T = t_f if steps is None else int(steps)
    g = Graph.hypercube(dim, marked=[marked])
    if marked_coin == "minus_grover":
        cm = -grover_matrix(dim)
    elif marked_coin == "minus_identity":
        cm = -np.eye(dim, dtype=np.complex128)
    else:
        raise DomainError(f"unknown marked_coin {marked_coin!r}")
    psi = np.full((dim, n), 1.0 / np.sqrt(dim * n), dtype=np.complex128)
    init = WalkState(psi, np.arange(n))
    traj = distribution_trajectory(
        g, grover_matrix(dim), init, max(T, t_f), "flip_flop", {marked: cm}
    )
    p = traj[:, marked]
    return SearchResult(dim, marked, t_f, float(p[t_f]), p[: T + 1].copy())


__all__ = [
    "Graph",
    "GraphWalk",
    "MixingScan",
    "SearchResult",
    "averaged_distribution",
    "averaged_trajectory",
    "cycle_average_mixing_time",
    "distribution_trajectory",
    "graph_walk_evolve",
    "hamming_weights",
    "hypercube_mixing",
    "hypercube_walk",
    "instantaneous_mixing_time",
    "limiting_average",
    "mixing_window",
    "shift_matrix",
    "shift_permutation",
    "skw_search",
    "skw_steps",
]
