"""
Universality gadgets for discrete-time walks on wire graphs.

A basic wire cell holds four edge amplitudes ``(left a, left b, right a,
right b)`` around a degree-4 vertex. The Grover coin ``G4`` sends equal
inputs on the two left arms entirely to the two right arms.

Gates are scripts of named 4x4 operators applied to the ``|0>`` and ``|1>``
wires. The text form has one operation per line::

    <step label> <operator> <wire> [<wire> ...]

State snapshots are recorded after the last operation of each step label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import DimensionError, DomainError, NormalizationError, UnitarityError, unitarity_defect
from .line_walks import grover_matrix

OP_TOL = 1e-12
WIRES = ("0", "1")


def grover_coin(d: int) -> NDArray[np.complex128]:
    """``2|s><s| - I`` on ``d >= 2`` edges."""
    if int(d) != d or d < 2:
        raise DomainError(f"Grover coin needs d >= 2, got {d}")
    return grover_matrix(int(d))


def phase_factor(theta: float = -np.pi / 4) -> NDArray[np.complex128]:
    """``diag(1, 1, e^{i theta}, e^{i theta})`` on the right arms."""
    return np.diag([1.0, 1.0, np.exp(1j * theta), np.exp(1j * theta)]).astype(np.complex128)


def diamond_g2() -> NDArray[np.complex128]:
    """``G2 = [[0, 1], [1, 0]]`` on the two-edge vertices of each arm.

    Arm a pairs components (0, 2), arm b pairs (1, 3).
    """
    m = np.zeros((4, 4), dtype=np.complex128)
    m[[2, 3, 0, 1], [0, 1, 2, 3]] = 1.0
    return m


# The wire "shift" is the same matrix as G4.
OPERATORS: dict[str, NDArray[np.complex128]] = {
    "G4": grover_coin(4),
    "S": grover_coin(4),
    "PF": phase_factor(),
    "G2D": diamond_g2(),
}


# ---------------------------------------------------------------------------
# Wire cells
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WireState:
    """Four edge amplitudes of a wire cell."""

    amps: NDArray[np.complex128]

    def __post_init__(self) -> None:
        a = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if a.shape != (4,):
            raise DimensionError(f"a wire cell has 4 amplitudes, got {a.size}")
        object.__setattr__(self, "amps", a)

    @classmethod
    def duplicated(cls, amplitude: complex) -> "WireState":
        """``(amplitude, amplitude, 0, 0)``."""
        return cls(np.array([amplitude, amplitude, 0, 0]))

    def is_consistent(self, tol: float = OP_TOL) -> bool:
        """Equal inputs on the two arms of each side."""
        a = self.amps
        return abs(a[0] - a[1]) <= tol and abs(a[2] - a[3]) <= tol

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


def wire_step(w: WireState) -> WireState:
    """Grover coin of one cell: ``(a, a, 0, 0) -> (0, 0, a, a)``."""
    return WireState(OPERATORS["G4"] @ w.amps)


@dataclass(frozen=True)
class WireTransfer:
    """Wire of ``2 cells + 1`` vertices centred on the input vertex.

    ``incoming[k]`` holds the amplitudes arriving at vertex ``k - cells``.
    """

    incoming: NDArray[np.complex128]
    cells: int

    def at(self, vertex: int) -> WireState:
        return WireState(self.incoming[vertex + self.cells])

    def leakage(self, initial_norm2: float) -> float:
        """Probability not found at vertex ``cells`` (relative to the input)."""
        if initial_norm2 == 0:
            return 0.0
        return float(1.0 - self.at(self.cells).norm2() / initial_norm2)


def wire_transfer(w: WireState, cells: int) -> WireTransfer:
    """Propagate ``w`` through ``cells`` coin-and-shift steps.

    After the coin, components 2 and 3 leave right and arrive as components
    0 and 1 of the next vertex; components 0 and 1 leave left and arrive as
    components 2 and 3 of the previous vertex.
    """
    if cells < 0:
        raise DomainError("cells must be nonnegative")
    n = 2 * cells + 1
    inc = np.zeros((n, 4), dtype=np.complex128)
    inc[cells] = w.amps
    g = OPERATORS["G4"]
    for _ in range(cells):
        out = inc @ g.T
        nxt = np.zeros_like(inc)
        nxt[1:, 0:2] = out[:-1, 2:4]
        nxt[:-1, 2:4] = out[1:, 0:2]
        inc = nxt
    return WireTransfer(inc, cells)


# ---------------------------------------------------------------------------
# Gate scripts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScriptOp:
    step: str
    op: str
    wires: tuple[str, ...]


@dataclass(frozen=True)
class GateScript:
    """Ordered operator applications on the named wires.

    Raises
    ------
    DomainError
        For an unknown operator or wire name.
    UnitarityError
        If an operator is not unitary within ``1e-12``.
    """

    ops: tuple[ScriptOp, ...]
    operators: Mapping[str, NDArray[np.complex128]] = field(default_factory=lambda: dict(OPERATORS))

    def __post_init__(self) -> None:
        for name, m in self.operators.items():
            if unitarity_defect(m) > OP_TOL:
                raise UnitarityError(f"operator {name} is not unitary")
        for o in self.ops:
            if o.op not in self.operators:
                raise DomainError(f"unknown operator {o.op!r} in step {o.step}")
            bad = [w for w in o.wires if w not in WIRES]
            if bad or not o.wires:
                raise DomainError(f"step {o.step}: wires must be drawn from {WIRES}")

    @property
    def steps(self) -> list[str]:
        seen: list[str] = []
        for o in self.ops:
            if o.step not in seen:
                seen.append(o.step)
        return seen

    @classmethod
    def parse(cls, text: str) -> "GateScript":
        ops = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 3:
                raise DomainError(f"line {lineno}: expected '<step> <operator> <wire>...'")
            ops.append(ScriptOp(parts[0], parts[1], tuple(parts[2:])))
        return cls(tuple(ops))

    def dump(self) -> str:
        return "".join(f"{o.step} {o.op} {' '.join(o.wires)}\n" for o in self.ops)

    def run(self, inputs: Mapping[str, ArrayLike]) -> dict[str, dict[str, NDArray[np.complex128]]]:
        """Apply the script; returns ``{step: {wire: state}}`` snapshots."""
        state = {w: np.asarray(inputs[w], dtype=np.complex128).reshape(4).copy() for w in WIRES}
        record: dict[str, dict[str, NDArray[np.complex128]]] = {}
        for i, o in enumerate(self.ops):
            m = self.operators[o.op]
            for w in o.wires:
                state[w] = m @ state[w]
            last = i + 1 == len(self.ops) or self.ops[i + 1].step != o.step
            if last:
                record[o.step] = {w: v.copy() for w, v in state.items()}
        return record


def phase_gate_script() -> GateScript:
    """Eleven-step phase gate: ``PF G4`` on even steps, ``S`` on odd steps.

    At ``t6`` the ``|1>`` wire passes the diamond's two-edge vertices (``G2``
    without a phase factor) instead.
    """
    lines = []
    for k in range(2, 12):
        t = f"t{k}"
        if k % 2 == 1:
            lines.append(f"{t} S 0 1")
        elif k == 6:
            lines += [f"{t} G4 0", f"{t} PF 0", f"{t} G2D 1"]
        else:
            lines += [f"{t} G4 0 1", f"{t} PF 0 1"]
    return GateScript.parse("\n".join(lines))


@dataclass(frozen=True)
class PhaseGateResult:
    """Final wire phases and the per-step snapshots (``t1`` is the input)."""

    phase0: complex
    phase1: complex
    relative_phase: complex
    states: dict[str, dict[str, NDArray[np.complex128]]]

    def norm2(self) -> float:
        """``(|Psi|^2 + |Phi|^2) / 2`` at ``t11``; 1 for a normalised input."""
        last = self.states["t11"]
        return float((np.sum(np.abs(last["0"]) ** 2) + np.sum(np.abs(last["1"]) ** 2)) / 2)


def phase_gate_run(alpha: complex, beta: complex, tol: float = 1e-12) -> PhaseGateResult:
    """Run the phase gate on ``alpha |0> + beta |1>``.

    The phases are those of the linear wire maps, so they are defined even
    when ``alpha`` or ``beta`` vanishes.

    Raises
    ------
    NormalizationError
        Unless ``|alpha|^2 + |beta|^2 = 1``.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > tol:
        raise NormalizationError("|alpha|^2 + |beta|^2 must equal 1")
    script = phase_gate_script()
    inputs = {"0": WireState.duplicated(alpha).amps, "1": WireState.duplicated(beta).amps}
    rec = {"t1": {w: v.copy() for w, v in inputs.items()}}
    rec.update(script.run(inputs))
    unit = script.run({"0": WireState.duplicated(1).amps, "1": WireState.duplicated(1).amps})["t11"]
    p0, p1 = complex(unit["0"][0]), complex(unit["1"][0])
    return PhaseGateResult(p0, p1, p1 / p0, rec)


T = TypeVar("T")

CNOT_LABELS = ("00", "01", "10", "11")


def cnot_permute(wires: Mapping[str, T]) -> dict[str, T]:
    """Swap the ``10`` and ``11`` wires.

    Raises
    ------
    DomainError
        Unless the labels are exactly ``00, 01, 10, 11``.
    """
    if set(wires) != set(CNOT_LABELS) or len(wires) != 4:
        raise DomainError(f"CNOT needs wires labelled {CNOT_LABELS}, got {sorted(wires)}")
    swap = {"00": "00", "01": "01", "10": "11", "11": "10"}
    return {lab: wires[swap[lab]] for lab in CNOT_LABELS}


# ---------------------------------------------------------------------------
# Hadamard widget
# ---------------------------------------------------------------------------

# d=4 vertices crossed before the degree-8 vertex, per wire; part (c) repeats them
PART_A_NODES = {"0": 9, "1": 7}

EDGE_LABELS = ("in0a", "in0b", "in1a", "in1b", "out0a", "out0b", "out1a", "out1b")


def part_phases(parts: Sequence[str] = ("a", "c")) -> dict[str, complex]:
    """Phase picked up by each wire in the listed d=4 parts."""
    out = {}
    for w, n in PART_A_NODES.items():
        out[w] = complex(np.exp(-1j * np.pi / 4 * n * len(parts)))
    return out


def default_wiring() -> dict[str, int]:
    """Candidate wiring: inputs on ports 0-3, outputs on ports 4-7."""
    return {lab: i for i, lab in enumerate(EDGE_LABELS)}


def _check_wiring(wiring: Mapping[str, int]) -> dict[str, int]:
    if set(wiring) != set(EDGE_LABELS):
        raise DomainError(f"wiring must map exactly the edges {EDGE_LABELS}")
    ports = sorted(int(p) for p in wiring.values())
    if ports != list(range(8)):
        raise DomainError("wiring must be a bijection onto the 8 ports of the d=8 vertex")
    return {k: int(v) for k, v in wiring.items()}


@dataclass(frozen=True)
class WidgetResult:
    """Output of the Hadamard widget for one input."""

    output: NDArray[np.complex128]
    reflected: float
    fidelity: float
    edges: dict[str, complex]

    @property
    def is_hadamard(self) -> bool:
        return abs(self.fidelity - 1.0) <= 1e-9


def hadamard_widget_run(
    alpha: complex,
    beta: complex,
    wiring: Mapping[str, int] | None = None,
) -> WidgetResult:
    """Parts (a) and (c) as d=4 phase counts around one ``G8`` vertex.

    The ``|0>`` and ``|1>`` wires enter the degree-8 vertex on two arms
    each; ``wiring`` assigns the four input and four output edges to its
    ports. ``output = (a, b)`` averages each output wire's two arms after
    part (c); ``fidelity = |<H (alpha, beta) | (a, b)>|`` with ``H`` the
    Hadamard gate. ``reflected`` is the probability sent back into the
    input edges.
    """
    w = _check_wiring(wiring if wiring is not None else default_wiring())
    ph = part_phases(("a",))
    vec = np.zeros(8, dtype=np.complex128)
    for lab, amp in (("in0a", alpha * ph["0"]), ("in0b", alpha * ph["0"]),
                     ("in1a", beta * ph["1"]), ("in1b", beta * ph["1"])):
        vec[w[lab]] = amp
    out = grover_coin(8) @ vec
    edges = {lab: complex(out[w[lab]]) for lab in EDGE_LABELS}
    a = (edges["out0a"] + edges["out0b"]) / 2 * ph["0"]
    b = (edges["out1a"] + edges["out1b"]) / 2 * ph["1"]
    res = np.array([a, b])
    target = np.array([alpha + beta, alpha - beta]) / np.sqrt(2)
    refl = sum(abs(edges[k]) ** 2 for k in EDGE_LABELS[:4]) / 2
    return WidgetResult(res, float(refl), float(abs(np.vdot(target, res))), edges)


def widget_succeeds(
    samples: Iterable[tuple[complex, complex]], wiring: Mapping[str, int] | None = None
) -> bool:
    """Whether every sample reproduces the Hadamard action up to a phase."""
    return all(hadamard_widget_run(a, b, wiring).is_hadamard for a, b in samples)


__all__ = [
    "CNOT_LABELS",
    "EDGE_LABELS",
    "GateScript",
    "OPERATORS",
    "PhaseGateResult",
    "ScriptOp",
    "WidgetResult",
    "WireState",
    "WireTransfer",
    "cnot_permute",
    "default_wiring",
    "diamond_g2",
    "grover_coin",
    "hadamard_widget_run",
    "part_phases",
    "phase_factor",
    "phase_gate_run",
    "phase_gate_script",
    "widget_succeeds",
    "wire_step",
    "wire_transfer",
]
