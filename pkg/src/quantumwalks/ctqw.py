"""
Continuous-time quantum walks.

``H = gamma (D - A)`` (the generator convention, default) or ``H = -gamma A``
(``convention="adjacency"``); the walk is ``exp(-i H t)`` computed from a
dense symmetric eigendecomposition. Also: the arcsine law on the line, the
glued-trees traversal benchmark and a scattering solver for graphs with
semi-infinite leads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import DimensionError, DomainError, NumericalError, WalkState
from .graph_walks import Graph

MAX_VERTICES = 4096

Convention = Literal["laplacian", "adjacency"]


@dataclass(frozen=True)
class CTQWConfig:
    """Graph, hopping rate and Hamiltonian convention."""

    graph: Graph
    gamma: float = 1.0
    convention: Convention = "laplacian"

    def __post_init__(self) -> None:
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise DomainError(f"gamma must be finite and positive, got {self.gamma}")
        if self.convention not in ("laplacian", "adjacency"):
            raise DomainError(f"unknown convention {self.convention!r}")


def hamiltonian(cfg: CTQWConfig) -> NDArray[np.float64]:
    """Dense Hamiltonian matrix of ``cfg``."""
    a = cfg.graph.adjacency()
    if cfg.convention == "adjacency":
        return -cfg.gamma * a
    return cfg.gamma * (np.diag(a.sum(axis=1)) - a)


class Propagator:
    """``exp(-i H t)`` from one eigendecomposition, reusable across times."""

    def __init__(self, h: ArrayLike) -> None:
        h = np.asarray(h)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionError(f"Hamiltonian must be square, got {h.shape}")
        if h.shape[0] > MAX_VERTICES:
            raise DomainError(f"{h.shape[0]} vertices exceed the dense limit {MAX_VERTICES}")
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise DomainError("Hamiltonian is not Hermitian")
        self.energies, self.vectors = np.linalg.eigh(h)

    @property
    def dim(self) -> int:
        return self.energies.size

    def apply(self, psi0: NDArray[np.complex128], t: float | ArrayLike) -> NDArray[np.complex128]:
        """State at time(s) ``t``; shape ``(n,)`` or ``(len(t), n)``."""
        c = self.vectors.conj().T @ psi0
        ts = np.asarray(t, dtype=float)
        ph = np.exp(-1j * np.multiply.outer(ts, self.energies))
        return (ph * c) @ self.vectors.T

    def matrix(self, t: float) -> NDArray[np.complex128]:
        return (self.vectors * np.exp(-1j * t * self.energies)) @ self.vectors.conj().T


def _init_vector(n: int, init: int | ArrayLike) -> NDArray[np.complex128]:
    if isinstance(init, (int, np.integer)):
        if not 0 <= init < n:
            raise DomainError(f"start vertex {init} outside 0..{n - 1}")
        v = np.zeros(n, dtype=np.complex128)
        v[int(init)] = 1.0
        return v
    v = np.asarray(init, dtype=np.complex128).reshape(-1)
    if v.size != n:
        raise DimensionError(f"initial state has {v.size} entries for {n} vertices")
    return v


def ctqw_evolve(cfg: CTQWConfig, t: float, init: int | ArrayLike) -> WalkState:
    """``exp(-i H t) init`` as a ``coin_dim = 1`` :class:`WalkState`.

    Parameters
    ----------
    cfg : CTQWConfig
    t : float
        Evolution time.
    init : int or array_like
        Start vertex, or a normalised amplitude vector.
    """
    n = cfg.graph.n
    if n > MAX_VERTICES:
        raise DomainError(f"{n} vertices exceed the dense limit {MAX_VERTICES}")
    psi0 = _init_vector(n, init)
    psi = Propagator(hamiltonian(cfg)).apply(psi0, t)
    return WalkState(psi[None, :], np.arange(n))


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices ``0 - 1 - ... - (n-1)``."""
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# ---------------------------------------------------------------------------
# Arcsine law
# ---------------------------------------------------------------------------


def arcsine_cdf(a: float, b: float) -> float:
    """``P(a <= Z <= b) = (arcsin b - arcsin a) / pi`` for the arcsine law.

    Raises
    ------
    DomainError
        Unless ``-1 <= a < b <= 1``.
    """
    if not -1.0 <= a < b <= 1.0:
        raise DomainError(f"need -1 <= a < b <= 1, got a={a}, b={b}")
    return float((np.arcsin(b) - np.arcsin(a)) / np.pi)


def _arcsine_F(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return 0.5 + np.arcsin(np.clip(x, -1.0, 1.0)) / np.pi


def ks_distance(values: ArrayLike, probs: ArrayLike) -> float:
    """Kolmogorov-Smirnov distance of a discrete law to the arcsine CDF.

    Both one-sided limits are checked at every atom.
    """
    x = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    order = np.argsort(x)
    x, p = x[order], p[order] / p.sum()
    cdf_hi = np.cumsum(p)
    cdf_lo = cdf_hi - p
    f = _arcsine_F(x)
    return float(max(np.max(np.abs(cdf_hi - f)), np.max(np.abs(cdf_lo - f))))


@dataclass(frozen=True)
class LineCTQW:
    """Distribution of a CTQW on a path started at its centre."""

    positions: NDArray[np.int64]
    probs: NDArray[np.float64]
    t: float
    gamma: float

    def scaled(self, velocity: float | None = None) -> NDArray[np.float64]:
        """``X / (v t)``; ``v = 1`` gives the plain ``X / t``."""
        v = 1.0 if velocity is None else velocity
        return self.positions / (v * self.t)

    def ks(self, velocity: float | None = None) -> float:
        return ks_distance(self.scaled(velocity), self.probs)

    def mass_within(self, velocity: float | None = None) -> float:
        """``P(|X / (v t)| <= 1)``."""
        return float(self.probs[np.abs(self.scaled(velocity)) <= 1.0].sum())


def line_ctqw(
    n_sites: int = 801,
    t: float = 200.0,
    gamma: float = 1.0,
    convention: Convention = "adjacency",
) -> LineCTQW:
    """CTQW on an ``n_sites`` path from the centre site (positions centred).

    With hopping ``gamma`` on each edge the wave front moves at ``2 gamma``,
    so ``X / (2 gamma t)`` is the unit-speed pseudovelocity.
    """
    if n_sites < 3 or n_sites % 2 == 0:
        raise DomainError("n_sites must be odd and >= 3")
    c = n_sites // 2
    cfg = CTQWConfig(path_graph(n_sites), gamma, convention)
    st = ctqw_evolve(cfg, t, c)
    p = np.abs(st.amplitudes[0]) ** 2
    return LineCTQW(np.arange(n_sites) - c, p, float(t), gamma)


# ---------------------------------------------------------------------------
# Glued trees
# ---------------------------------------------------------------------------


def glued_trees(
    depth: int,
    variant: Literal["identified", "random_cycle"] = "identified",
    seed: int = 0,
) -> Graph:
    """Two binary trees of height ``depth`` joined at their leaves.

    ``identified`` shares one leaf layer (``G_s``); ``random_cycle`` keeps
    both leaf layers and joins them by a random cycle alternating between
    left and right leaves (``G_r``), so every leaf has degree 3.

    The returned graph marks ENTRANCE and EXIT; ``attrs`` holds
    ``entrance``, ``exit``, ``depth``, ``variant`` and ``columns`` (column
    index of each vertex).
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    n = depth
    m = (1 << (n + 1)) - 1  # vertices per tree
    leaves = 1 << n
    first_leaf = leaves - 1
    edges: list[tuple[int, int]] = []
    cols: list[int] = []
    # tree 1: heap order 0..m-1, root 0
    for v in range(m):
        cols.append(int(np.floor(np.log2(v + 1))))
    for v in range(first_leaf):
        edges += [(v, 2 * v + 1), (v, 2 * v + 2)]
    if variant == "identified":
        # tree 2 internal vertices get ids m + j (j heap index < first_leaf);
        # its leaves are the tree-1 leaves
        def t2(j: int) -> int:
            return j if j >= first_leaf else m + j

        for j in range(first_leaf):
            cols.append(2 * n - int(np.floor(np.log2(j + 1))))
        for j in range(first_leaf):
            edges += [(t2(j), t2(2 * j + 1)), (t2(j), t2(2 * j + 2))]
        total = m + first_leaf
        exit_v = m
    elif variant == "random_cycle":
        for j in range(m):
            cols.append(2 * n + 1 - int(np.floor(np.log2(j + 1))))
        for j in range(first_leaf):
            edges += [(m + j, m + 2 * j + 1), (m + j, m + 2 * j + 2)]
        rng = np.random.default_rng(seed)
        left = first_leaf + rng.permutation(leaves)
        right = m + first_leaf + rng.permutation(leaves)
        for i in range(leaves):
            edges.append((int(left[i]), int(right[i])))
            edges.append((int(right[i]), int(left[(i + 1) % leaves])))
        total = 2 * m
        exit_v = m
    else:
        raise DomainError(f"unknown variant {variant!r}")
    g = Graph.from_edges(total, edges, marked=[0, exit_v])
    attrs = {
        "entrance": 0,
        "exit": exit_v,
        "depth": n,
        "variant": variant,
        "columns": np.array(cols, dtype=np.int64),
    }
    return Graph(g.neighbors, g.marked, g.reverse_ports, attrs)


def column_sizes(depth: int, variant: str = "identified") -> NDArray[np.int64]:
    n = depth
    if variant == "identified":
        return np.array([1 << min(j, 2 * n - j) for j in range(2 * n + 1)], dtype=np.int64)
    return np.array([1 << min(j, 2 * n + 1 - j) for j in range(2 * n + 2)], dtype=np.int64)


def column_states(g: Graph) -> NDArray[np.float64]:
    """Orthonormal column-uniform states as the columns of an ``(n, n_cols)`` matrix."""
    cols = np.asarray(g.attrs["columns"])
    k = int(cols.max()) + 1
    basis = np.zeros((g.n, k))
    for j in range(k):
        sel = cols == j
        basis[sel, j] = 1.0 / np.sqrt(sel.sum())
    return basis


def column_hamiltonian(
    depth: int,
    gamma: float = 1.0,
    convention: Convention = "laplacian",
    variant: Literal["identified", "random_cycle"] = "identified",
) -> NDArray[np.float64]:
    """Hamiltonian restricted to the column-uniform subspace.

    Links between consecutive columns carry ``sqrt(2) gamma``; in ``G_r``
    the central link between the two leaf columns carries ``2 gamma``.
    """
    n = depth
    k = 2 * n + 1 if variant == "identified" else 2 * n + 2
    mid = n if variant == "random_cycle" else -1
    off = np.array([2.0 if j == mid else np.sqrt(2.0) for j in range(k - 1)])
    a = np.diag(off, 1) + np.diag(off, -1)
    if convention == "adjacency":
        return -gamma * a
    deg = np.full(k, 3.0)
    deg[0] = deg[-1] = 2.0
    if variant == "identified":
        deg[n] = 2.0
    return gamma * (np.diag(deg) - a)


@dataclass(frozen=True)
class TraversalResult:
    """Quantum and classical probability of reaching EXIT."""

    quantum_max: float
    t_at_max: float
    classical: float
    horizon: float
    quantum_curve: NDArray[np.float64] = field(repr=False)
    times: NDArray[np.float64] = field(repr=False)

    @property
    def ratio(self) -> float:
        return self.quantum_max / self.classical if self.classical > 0 else float("inf")


def classical_exit_probability(
    g: Graph,
    horizon: float,
    mode: Literal["discrete", "continuous"] = "discrete",
    gamma: float = 1.0,
) -> float:
    """Probability of the classical walk from ENTRANCE being at EXIT at ``horizon``.

    ``discrete`` runs ``round(horizon)`` steps of the simple random walk;
    ``continuous`` integrates ``dp/dt = -M p`` with the generator ``M``.
    """
    ent, ex = g.attrs["entrance"], g.attrs["exit"]
    a = g.adjacency()
    deg = a.sum(axis=1)
    p = np.zeros(g.n)
    p[ent] = 1.0
    if mode == "discrete":
        P = a / deg[:, None]
        for _ in range(int(round(horizon))):
            p = p @ P
        return float(p[ex])
    if mode == "continuous":
        from scipy.linalg import expm

        m = gamma * (np.diag(deg) - a)
        return float((expm(-m * horizon) @ p)[ex])
    raise DomainError(f"unknown mode {mode!r}")


def traversal_experiment(
    g: Graph,
    gamma: float = 1.0,
    horizon: float | None = None,
    samples: int = 400,
    convention: Convention = "laplacian",
    classical: Literal["discrete", "continuous"] = "discrete",
) -> TraversalResult:
    """Glued-trees traversal: quantum max over sampled times vs classical.

    Parameters
    ----------
    g : Graph
        Output of :func:`glued_trees`.
    gamma : float
    horizon : float, optional
        Defaults to ``4 * depth``.
    samples : int
        Number of equally spaced times in ``[0, horizon]``.
    convention : {"laplacian", "adjacency"}
    classical : {"discrete", "continuous"}
        Classical comparison walk, see :func:`classical_exit_probability`.
    """
    if "exit" not in g.attrs:
        raise DomainError("graph does not come from glued_trees")
    T = float(4 * g.attrs["depth"] if horizon is None else horizon)
    cfg = CTQWConfig(g, gamma, convention)
    prop = Propagator(hamiltonian(cfg))
    times = np.linspace(0.0, T, samples)
    psi = prop.apply(_init_vector(g.n, g.attrs["entrance"]), times)
    curve = np.abs(psi[:, g.attrs["exit"]]) ** 2
    i = int(np.argmax(curve))
    pc = classical_exit_probability(g, T, classical, gamma)
    return TraversalResult(float(curve[i]), float(times[i]), pc, T, curve, times)


# ---------------------------------------------------------------------------
# Scattering on graphs with semi-infinite leads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatteringResult:
    """S-matrix at momentum ``k``.

    ``S[j', j]`` is the amplitude on outgoing lead ``j'`` for a wave incoming
    on lead ``j``: ``R_j = S[j, j]`` and ``T_{j, j'} = S[j', j]``.
    """

    k: float
    leads: tuple[int, ...]
    S: NDArray[np.complex128]

    @property
    def R(self) -> NDArray[np.complex128]:
        return np.diag(self.S).copy()

    def T(self, j: int, jp: int) -> complex:
        return complex(self.S[jp, j])

    def flux_defect(self) -> float:
        """``max_j | |R_j|^2 + sum_j' |T_{j,j'}|^2 - 1 |``."""
        return float(np.max(np.abs(np.sum(np.abs(self.S) ** 2, axis=0) - 1.0)))


def scattering_solve(g: Graph, leads: Sequence[int], k: float, cond_max: float = 1e12) -> ScatteringResult:
    """Scattering amplitudes of ``H = A`` with leads attached at ``leads``.

    Lead ``j`` is a half line ``x = 0, 1, 2, ...`` whose site ``x = 0`` is the
    graph vertex ``leads[j]``. For a wave incoming on lead ``j`` the lead
    amplitudes are ``e^{-ikx} + R_j e^{ikx}`` and ``T_{j,j'} e^{ikx}``
    elsewhere; substituting into ``H psi = 2 cos(k) psi`` at the graph
    vertices, together with the matching condition at ``x = 0``, gives a
    square linear system per incoming lead. Several leads may share a
    vertex (a single vertex with two leads is the unbroken line).

    Raises
    ------
    DomainError
        If ``k`` is outside ``(-pi, 0)`` or no lead is given.
    NumericalError
        If the system is singular at this momentum.
    """
    if not -np.pi < k < 0:
        raise DomainError(f"k must lie in (-pi, 0), got {k}")
    leads = tuple(int(v) for v in leads)
    if not leads:
        raise DomainError("at least one lead is required")
    n, L = g.n, len(leads)
    for v in leads:
        if not 0 <= v < n:
            raise DomainError(f"lead vertex {v} outside 0..{n - 1}")
    e = 2.0 * np.cos(k)
    M = np.zeros((n + L, n + L), dtype=np.complex128)
    M[:n, :n] = g.adjacency() - e * np.eye(n)
    for j, v in enumerate(leads):
        M[v, n + j] += np.exp(1j * k)
        M[n + j, v] = 1.0
        M[n + j, n + j] = -1.0
    rhs = np.zeros((n + L, L), dtype=np.complex128)
    for j, v in enumerate(leads):
        rhs[v, j] -= np.exp(-1j * k)
        rhs[n + j, j] = 1.0
    c = np.linalg.cond(M)
    if not np.isfinite(c) or c > cond_max:
        raise NumericalError(f"scattering system is singular at k={k!r} (cond {c:.3e})")
    sol = np.linalg.solve(M, rhs)
    return ScatteringResult(float(k), leads, sol[n:, :])


def wavepacket_transmission(
    g: Graph,
    leads: tuple[int, int],
    k0: float,
    sigma: float = 25.0,
    x0: float = 100.0,
    lead_length: int = 198,
    margin: float = 60.0,
) -> float:
    """Transmitted probability of a Gaussian packet on a truncated lattice.

    The two leads are cut at ``lead_length`` sites. A packet centred at
    ``x0`` on the first lead with momentum ``k0`` moves toward the graph at
    speed ``2 |sin k0|``; after it has passed (time ``(x0 + margin) / v``)
    the probability on the second lead is returned.
    """
    if len(leads) != 2:
        raise DomainError("wave-packet oracle takes exactly two leads")
    n = g.n
    N = n + 2 * lead_length
    h = np.zeros((N, N))
    h[:n, :n] = g.adjacency()

    def site(j: int, x: int) -> int:
        # x = 1..lead_length on lead j
        return n + j * lead_length + (x - 1)

    for j, v in enumerate(leads):
        h[v, site(j, 1)] = h[site(j, 1), v] = 1.0
        for x in range(1, lead_length):
            a, b = site(j, x), site(j, x + 1)
            h[a, b] = h[b, a] = 1.0
    xs = np.arange(1, lead_length + 1)
    psi = np.zeros(N, dtype=np.complex128)
    psi[n : n + lead_length] = np.exp(-((xs - x0) ** 2) / (4 * sigma**2) - 1j * k0 * xs)
    psi /= np.linalg.norm(psi)
    v = 2.0 * abs(np.sin(k0))
    t = (x0 + margin) / v
    out = Propagator(h).apply(psi, t)
    return float(np.sum(np.abs(out[n + lead_length :]) ** 2))


def childs_transmission(k: float) -> complex:
    """``8 / (8 + i cos(2k) csc^3(k) sec(k))``.

    Raises
    ------
    DomainError
        Outside ``(-pi, 0)`` or at ``k = -pi/2`` where ``sec k`` diverges.
    """
    if not -np.pi < k < 0:
        raise DomainError(f"k must lie in (-pi, 0), got {k}")
    ck = np.cos(k)
    if abs(ck) < 1e-12:
        raise DomainError("sec(k) diverges at k = -pi/2")
    return complex(8.0 / (8.0 + 1j * np.cos(2 * k) / (np.sin(k) ** 3 * ck)))


__all__ = [
    "CTQWConfig",
    "LineCTQW",
    "Propagator",
    "ScatteringResult",
    "TraversalResult",
    "arcsine_cdf",
    "childs_transmission",
    "classical_exit_probability",
    "column_hamiltonian",
    "column_sizes",
    "column_states",
    "ctqw_evolve",
    "glued_trees",
    "hamiltonian",
    "ks_distance",
    "line_ctqw",
    "path_graph",
    "scattering_solve",
    "traversal_experiment",
    "wavepacket_transmission",
]
