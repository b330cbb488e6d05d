"""
Command-line driver: ``quantumwalks <subcommand> [flags]``.

Every subcommand produces a report made of scalar ``summary`` entries and an
optional table, written as ``text`` (``key=value`` lines, then the table),
``csv`` (the table, or ``key,value`` rows when there is none) or ``json``
(with ``schema_version`` and a ``config`` echo). Output goes to stdout, to
``--out``, or, when ``QUANTUMWALKS_OUTDIR`` is set, to
``$QUANTUMWALKS_OUTDIR/<subcommand>.<ext>``; relative ``--out`` paths are
resolved against that directory too.

Exit status: 0 on success, 2 on usage errors, 1 on numerical or domain
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import classical, ctqw, graph_walks, line_walks, oracles, stochastics, szegedy, universality
from .core import (
    DomainError,
    InitSpec,
    NormalizationError,
    QuantumWalkError,
    position_distribution,
    total_variation,
    uniform_distribution,
)
from .graph_walks import Graph

SCHEMA_VERSION = 1
OUTDIR_ENV = "QUANTUMWALKS_OUTDIR"
INIT_TOL = 1e-6

log = logging.getLogger("quantumwalks")


@dataclass
class Report:
    summary: dict[str, Any] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[Sequence[Any]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def parse_complex(token: str) -> complex:
    """``a+bi`` literal (``i`` or ``j``) to complex."""
    s = token.strip().replace(" ", "").replace("i", "j")
    if not s:
        raise DomainError("empty complex literal")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    elif s.endswith("j") and s[-2:-1] in ("+", "-"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise DomainError(f"cannot parse complex literal {token!r}") from exc


def parse_state(text: str) -> np.ndarray:
    """Comma-separated amplitudes, renormalised if within ``1e-6`` of unit norm."""
    v = np.array([parse_complex(t) for t in text.split(",")], dtype=np.complex128)
    n2 = float(np.sum(np.abs(v) ** 2))
    if abs(n2 - 1.0) > INIT_TOL:
        raise NormalizationError(f"initial state has norm^2 {n2:.9f}; expected 1 within {INIT_TOL:g}")
    return v / np.sqrt(n2)


def parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def parse_coin(text: str) -> line_walks.CoinSpec:
    """``hadamard``, ``su2:rho,theta,phi`` or ``matrix:a,b,c,d``."""
    name, _, rest = text.partition(":")
    if name == "hadamard":
        return line_walks.CoinSpec.hadamard()
    if name == "su2":
        rho, theta, phi = (float(x) for x in rest.split(","))
        return line_walks.CoinSpec.general_su2(rho, theta, phi)
    if name == "matrix":
        vals = [parse_complex(t) for t in rest.split(",")]
        if len(vals) != 4:
            raise DomainError("matrix coin needs four entries a,b,c,d")
        return line_walks.CoinSpec.explicit(np.array(vals).reshape(2, 2))
    raise DomainError(f"unknown coin {text!r}")


def parse_graph(text: str) -> Graph:
    """``cycle:N``, ``path:N``, ``hypercube:D``, ``complete:N``, ``diamond``,
    ``vertex``, ``gluedtrees:D`` or ``file:PATH`` (edge list)."""
    name, _, rest = text.partition(":")
    if name == "cycle":
        return Graph.cycle(int(rest))
    if name == "path":
        return ctqw.path_graph(int(rest))
    if name == "hypercube":
        return Graph.hypercube(int(rest))
    if name == "complete":
        n = int(rest)
        return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
    if name == "diamond":
        return Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    if name == "vertex":
        return Graph.from_edges(1, [])
    if name == "gluedtrees":
        return ctqw.glued_trees(int(rest))
    if name == "file":
        return classical.read_edge_list(rest)
    raise DomainError(f"unknown graph {text!r}")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def fmt_phase(z: complex, lo: float) -> str:
    """``e^{ki*pi/4}`` with the angle taken in ``(lo, lo + 2 pi]``."""
    ang = float(np.angle(z))
    while ang <= lo + 1e-12:
        ang += 2 * np.pi
    while ang > lo + 2 * np.pi + 1e-12:
        ang -= 2 * np.pi
    k = ang / (np.pi / 4)
    if abs(k - round(k)) > 1e-9:
        return f"e^{{{ang!r}i}}"
    k = int(round(k))
    if k == 0:
        return "1"
    num = {1: "", -1: "-"}.get(k, str(k))
    return f"e^{{{num}i*pi/4}}"


def distribution_rows(labels, probs) -> list[tuple[int, float]]:
    return [(int(k), float(p)) for k, p in zip(labels, probs)]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_line(a: argparse.Namespace) -> Report:
    coin = parse_coin(a.coin)
    ini = InitSpec(parse_state(a.init), a.start)
    r = Report()
    if a.barrier != "none":
        if a.barrier == "semi":
            b = line_walks.BarrierSpec.semi_infinite(a.left)
        else:
            if a.right is None:
                raise DomainError("--barrier two needs --right")
            b = line_walks.BarrierSpec.two_barriers(a.left, a.right)
        rec = line_walks.absorbing_walk(b, coin, ini, a.steps)
        r.summary.update(p=rec.p, q=rec.q, survivor=rec.survivor, total=rec.total)
        r.columns = ["step", "left", "right"]
        r.rows = [(s, float(x), float(y)) for s, (x, y) in enumerate(zip(rec.left, rec.right))]
        return r
    if a.engine == "fourier":
        st = line_walks.evolve_fourier(a.steps, coin, ini)
    elif a.engine == "path":
        if coin.kind != "hadamard" or not np.allclose(ini.coin_amplitudes, [1, 0]):
            raise DomainError("path counting covers the Hadamard walk from |0> only")
        st = line_walks.path_counting_state(a.steps)
    else:
        st = line_walks.evolve(a.steps, coin, ini)
    d = position_distribution(st)
    r.summary.update(steps=a.steps, mean=d.mean(), variance=d.variance(), std=d.std())
    if a.steps > 0:
        r.summary["sigma_over_t"] = d.std() / a.steps
    if a.amplitudes:
        amps = st.amplitudes
        r.columns = ["index", "re", "im"]
        r.rows = [(i, float(z.real), float(z.imag)) for i, z in enumerate(amps.reshape(-1))]
        r.summary["positions_from"] = int(st.positions[0])
        return r
    keep = (d.support - ini.start_position + a.steps) % 2 == 0
    r.columns = ["position", "probability"]
    r.rows = distribution_rows(d.support[keep], d.probs[keep])
    return r


def cmd_cycle(a: argparse.Namespace) -> Report:
    g = Graph.cycle(a.n)
    ini = InitSpec(parse_state(a.init), a.start)
    coin = parse_coin(a.coin)
    if a.limit:
        d = graph_walks.limiting_average(g, coin, ini, a.shift)
    else:
        d = graph_walks.averaged_distribution(g, coin, ini, a.T, a.shift)
    r = Report(columns=["index", "probability"], rows=distribution_rows(d.support, d.probs))
    r.summary.update(n=a.n, T=None if a.limit else a.T, tv_uniform=total_variation(d, uniform_distribution(a.n)))
    return r


def cmd_hypercube(a: argparse.Namespace) -> Report:
    window = tuple(parse_ints(a.window)) if a.window else None
    if window is not None and len(window) != 2:
        raise DomainError("--window takes lo,hi")
    scan = graph_walks.hypercube_mixing(a.dim, window, a.reference)
    r = Report(columns=["step", "value"], rows=[(int(s), float(v)) for s, v in zip(scan.steps, scan.tv)])
    r.summary.update(dim=a.dim, window=f"{scan.steps[0]},{scan.steps[-1]}", min_tv=scan.min_tv,
                     best_step=scan.best_step)
    return r


def cmd_search(a: argparse.Namespace) -> Report:
    res = graph_walks.skw_search(a.dim, a.marked, a.steps, a.marked_coin)
    r = Report(columns=["step", "value"], rows=[(i, float(p)) for i, p in enumerate(res.trajectory)])
    r.summary.update(dim=a.dim, marked=a.marked, t_f=res.t_f, success=res.success,
                     classical_baseline=res.classical_baseline)
    return r


def cmd_ctqw(a: argparse.Namespace) -> Report:
    if a.line_check:
        lc = ctqw.line_ctqw(a.sites, a.t, a.gamma, a.convention)
        r = Report(columns=["position", "probability"], rows=distribution_rows(lc.positions, lc.probs))
        r.summary.update(
            ks_x_over_t=lc.ks(), ks_front_scaled=lc.ks(2 * a.gamma),
            mass_within_front=lc.mass_within(2 * a.gamma),
        )
        return r
    g = parse_graph(a.graph)
    cfg = ctqw.CTQWConfig(g, a.gamma, a.convention)
    st = ctqw.ctqw_evolve(cfg, a.t, a.start)
    p = np.abs(st.amplitudes[0]) ** 2
    r = Report(columns=["index", "probability"], rows=distribution_rows(range(g.n), p))
    r.summary.update(n=g.n, t=a.t, gamma=a.gamma, norm=float(p.sum()))
    return r


def cmd_gluedtrees(a: argparse.Namespace) -> Report:
    g = ctqw.glued_trees(a.depth, a.variant, a.seed)
    res = ctqw.traversal_experiment(g, a.gamma, a.horizon, a.samples, a.convention, a.classical)
    r = Report(columns=["time", "value"], rows=[(float(t), float(v)) for t, v in zip(res.times, res.quantum_curve)])
    r.summary.update(depth=a.depth, n=g.n, horizon=res.horizon, quantum_max=res.quantum_max,
                     t_at_max=res.t_at_max, classical=res.classical, ratio=res.ratio)
    return r


def cmd_scatter(a: argparse.Namespace) -> Report:
    g = parse_graph(a.graph)
    leads = parse_ints(a.leads)
    res = ctqw.scattering_solve(g, leads, a.k)
    r = Report(columns=["out", "in", "re", "im"])
    L = len(leads)
    r.rows = [(jp, j, float(res.S[jp, j].real), float(res.S[jp, j].imag)) for j in range(L) for jp in range(L)]
    r.summary.update(k=a.k, leads=",".join(map(str, leads)), flux_defect=res.flux_defect(),
                     R0_abs2=float(abs(res.S[0, 0]) ** 2))
    if L > 1:
        r.summary["T01_abs2"] = float(abs(res.S[1, 0]) ** 2)
    return r


def cmd_szegedy(a: argparse.Namespace) -> Report:
    if a.matrix:
        P = szegedy.read_stochastic_matrix(a.matrix)
    else:
        P = szegedy.lazy_cycle_chain(a.lazy_cycle, a.hold)
    w = szegedy.quantize(P)
    marked = parse_ints(a.marked)
    det = szegedy.detect_marked(P, marked, a.steps, a.threshold, a.marking)
    r = Report(columns=["step", "value"], rows=[(i, float(v)) for i, v in enumerate(det.trajectory)])
    r.summary.update(n=P.n, isometry_defect=w.isometry_defect(), unitarity_defect=w.unitarity_defect(),
                     first_crossing=det.first_crossing)
    if P.n <= 8:
        sc = szegedy.spectrum_check(w)
        r.summary.update(spectrum_mismatch=sc.mismatch, spectrum_count_ok=sc.count_ok)
    try:
        start = np.full(P.n, 1.0 / P.n)
        r.summary["classical_hitting_time"] = classical.fundamental_hitting_time(P, marked, start)
    except QuantumWalkError:
        r.summary["classical_hitting_time"] = None
    return r


def cmd_decohere(a: argparse.Namespace) -> Report:
    model = stochastics.DecoherenceModel(a.coin_p, a.position_p, a.break_p, a.seed, a.bounce)
    coin = parse_coin(a.coin)
    ini = InitSpec(parse_state(a.init), a.start)
    if a.t_grid:
        ts = parse_ints(a.t_grid)
        e = stochastics.variance_exponent(model, coin, ts, ini, a.trials, a.workers)
        return Report(summary={"t_grid": a.t_grid, "exponent": e})
    res = stochastics.decohere_evolve(a.steps, coin, ini, model, a.mode, a.trials, a.workers)
    d = res.dist
    r = Report(columns=["position", "probability"], rows=distribution_rows(d.support, d.probs))
    r.summary.update(steps=a.steps, mode=res.mode, trials=res.n_trials, mean=d.mean(),
                     variance=d.variance(), norm_defect=res.norm_defect,
                     tv_classical=total_variation(d, classical.binomial_line_distribution(a.steps)))
    return r


def cmd_oracle(a: argparse.Namespace) -> Report:
    coin = parse_coin(a.coin)
    init = parse_state(a.init)
    r = Report()
    if a.check == "konno":
        r.summary.update(t=a.t, bin_sites=a.bins or oracles.default_bin_sites(a.t),
                         l1_distance=oracles.empirical_limit_distance(a.t, coin, init, a.bins))
    elif a.check == "moments":
        dens = oracles.LimitDensity.of(coin, init)
        r.summary.update(mass=dens.mass(), mean=dens.mean(), mean_closed_form=dens.mean_closed_form(),
                         second_moment=dens.second_moment(),
                         second_moment_closed_form=dens.second_moment_closed_form())
        xs = np.linspace(-dens.edge, dens.edge, a.points + 2)[1:-1]
        r.columns = ["x", "density"]
        r.rows = [(float(x), float(f)) for x, f in zip(xs, dens(xs))]
    elif a.check == "entropy":
        st = line_walks.evolve(a.t, coin, init)
        r.summary.update(t=a.t, entropy=oracles.coin_entropy(st))
    else:
        r.summary["symmetric"] = oracles.is_symmetric_init(coin, init[0], init[1])
    return r


PHASE_EXPECTED = {
    "phase0": np.exp(-5j * np.pi / 4),
    "phase1": np.exp(-4j * np.pi / 4),
    "relative_phase": np.exp(1j * np.pi / 4),
}


def cmd_gate(a: argparse.Namespace) -> Report:
    r = Report()
    alpha, beta = parse_complex(a.alpha), parse_complex(a.beta)
    if a.name == "phase":
        res = universality.phase_gate_run(alpha, beta)
        vals = {"phase0": res.phase0, "phase1": res.phase1, "relative_phase": res.relative_phase}
        for key, z in vals.items():
            lo = -np.pi if key == "relative_phase" else -2 * np.pi
            r.summary[key] = fmt_phase(z, lo)
            r.summary[f"{key}_match"] = bool(abs(z - PHASE_EXPECTED[key]) <= 1e-12)
        r.summary["norm2"] = res.norm2()
        r.columns = ["step", "wire", "index", "re", "im"]
        for step, states in res.states.items():
            for wire in universality.WIRES:
                for i, z in enumerate(states[wire]):
                    r.rows.append((step, wire, i, float(z.real), float(z.imag)))
    elif a.name == "cnot":
        amps = [parse_complex(t) for t in a.wires.split(",")]
        if len(amps) != 4:
            raise DomainError("--wires takes four amplitudes for 00,01,10,11")
        out = universality.cnot_permute(dict(zip(universality.CNOT_LABELS, amps)))
        r.columns = ["index", "re", "im"]
        r.rows = [(lab, float(complex(z).real), float(complex(z).imag)) for lab, z in out.items()]
    elif a.name == "wire":
        w = universality.WireState(np.array([alpha, alpha, 0, 0]) if a.arm_b is None
                                   else np.array([alpha, parse_complex(a.arm_b), 0, 0]))
        tr = universality.wire_transfer(w, a.cells)
        r.summary.update(cells=a.cells, leakage=tr.leakage(w.norm2()) if w.norm2() else 0.0)
        r.columns = ["index", "re", "im"]
        r.rows = [(i, float(z.real), float(z.imag)) for i, z in enumerate(tr.at(a.cells).amps)]
    else:
        res = universality.hadamard_widget_run(alpha, beta)
        r.summary.update(fidelity=res.fidelity, reflected=res.reflected, is_hadamard=res.is_hadamard)
        r.columns = ["index", "re", "im"]
        r.rows = [(i, float(z.real), float(z.imag)) for i, z in enumerate(res.output)]
    return r


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit with 2
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", default=None, help="output file (relative to $QUANTUMWALKS_OUTDIR if set)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true", help="do not log the resolved config")


def _coin_init(p: argparse.ArgumentParser, init: str = "1,0") -> None:
    p.add_argument("--coin", default="hadamard", help="hadamard | su2:rho,theta,phi | matrix:a,b,c,d")
    p.add_argument("--init", default=init, help="coin amplitudes, e.g. 0.70710678,0.70710678i")
    p.add_argument("--start", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="quantumwalks", description="Quantum walk simulation workbench")
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("line", help="coined walk on the integer line")
    _common(p)
    _coin_init(p)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--engine", choices=("direct", "fourier", "path"), default="direct")
    p.add_argument("--amplitudes", action="store_true", help="emit amplitudes instead of probabilities")
    p.add_argument("--barrier", choices=("none", "semi", "two"), default="none")
    p.add_argument("--left", type=int, default=0)
    p.add_argument("--right", type=int, default=None)
    p.set_defaults(func=cmd_line)

    p = sub.add_parser("cycle", help="averaged distribution on an n-cycle")
    _common(p)
    _coin_init(p)
    p.add_argument("--n", type=int, default=11)
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--shift", choices=("moving", "flip_flop"), default="moving")
    p.add_argument("--limit", action="store_true", help="exact T -> infinity average")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("hypercube", help="instantaneous mixing scan on the hypercube")
    _common(p)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--window", default=None, help="lo,hi (inclusive)")
    p.add_argument("--reference", choices=("uniform", "parity"), default="uniform")
    p.set_defaults(func=cmd_hypercube)

    p = sub.add_parser("search", help="hypercube search with a marked coin")
    _common(p)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--marked", type=int, default=0)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--marked-coin", dest="marked_coin", choices=("minus_grover", "minus_identity"),
                   default="minus_grover")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("ctqw", help="continuous-time walk on a graph")
    _common(p)
    p.add_argument("--graph", default="path:801")
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--convention", choices=("laplacian", "adjacency"), default="laplacian")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--line-check", dest="line_check", action="store_true",
                   help="centred path walk compared with the arcsine law")
    p.add_argument("--sites", type=int, default=801)
    p.set_defaults(func=cmd_ctqw)

    p = sub.add_parser("gluedtrees", help="glued-trees traversal experiment")
    _common(p)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--variant", choices=("identified", "random_cycle"), default="identified")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--convention", choices=("laplacian", "adjacency"), default="laplacian")
    p.add_argument("--classical", choices=("discrete", "continuous"), default="discrete")
    p.set_defaults(func=cmd_gluedtrees)

    p = sub.add_parser("scatter", help="scattering matrix of a graph with leads")
    _common(p)
    p.add_argument("--graph", default="diamond")
    p.add_argument("--leads", default="0,3")
    p.add_argument("--k", type=float, default=-np.pi / 4)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("szegedy", help="Szegedy walk of a Markov chain")
    _common(p)
    p.add_argument("--matrix", default=None, help="stochastic matrix file (size header, then rows)")
    p.add_argument("--lazy-cycle", dest="lazy_cycle", type=int, default=16)
    p.add_argument("--hold", type=float, default=1.0 / 3.0)
    p.add_argument("--marked", default="0")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--marking", choices=("phase", "absorbing"), default="phase")
    p.set_defaults(func=cmd_szegedy)

    p = sub.add_parser("decohere", help="decohered line walk")
    _common(p)
    _coin_init(p)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--coin-p", dest="coin_p", type=float, default=0.0)
    p.add_argument("--position-p", dest="position_p", type=float, default=0.0)
    p.add_argument("--break-p", dest="break_p", type=float, default=0.0)
    p.add_argument("--bounce", type=float, choices=(1.0, -1.0), default=1.0)
    p.add_argument("--mode", choices=("trajectories", "exact_classical"), default="trajectories")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--t-grid", dest="t_grid", default=None, help="fit the variance exponent on t1,t2,...")
    p.set_defaults(func=cmd_decohere)

    p = sub.add_parser("oracle", help="closed-form limit laws")
    _common(p)
    _coin_init(p)
    p.add_argument("--check", choices=("konno", "moments", "entropy", "symmetry"), default="konno")
    p.add_argument("--t", type=int, default=2000)
    p.add_argument("--bins", type=int, default=None, help="lattice sites per bin (even)")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gate", help="universality gadgets")
    _common(p)
    p.add_argument("--name", choices=("phase", "cnot", "wire", "widget"), default="phase")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="0")
    p.add_argument("--wires", default="1,0,0,0", help="cnot: amplitudes of 00,01,10,11")
    p.add_argument("--cells", type=int, default=10)
    p.add_argument("--arm-b", dest="arm_b", default=None, help="wire: amplitude on arm b")
    p.set_defaults(func=cmd_gate)
    return root


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _jsonable(v: Any) -> Any:
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return fmt_complex(v)
    return v


def _value(v: Any) -> str:
    v = _jsonable(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    return repr(v) if isinstance(v, float) else str(v)


def render(report: Report, fmt: str, command: str, config: dict[str, Any]) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": config,
            "summary": {k: _jsonable(v) for k, v in report.summary.items()},
            "columns": report.columns,
            "records": [dict(zip(report.columns, map(_jsonable, row))) for row in report.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if fmt == "csv":
        if report.columns:
            w.writerow(report.columns)
            w.writerows([[_value(x) for x in row] for row in report.rows])
        else:
            w.writerow(["key", "value"])
            w.writerows([[k, _value(v)] for k, v in report.summary.items()])
        return buf.getvalue()
    lines = [f"{k}={_value(v)}" for k, v in report.summary.items()]
    if report.columns:
        lines.append("")
        lines.append("\t".join(report.columns))
        lines += ["\t".join(_value(x) for x in row) for row in report.rows]
    return "\n".join(lines) + "\n"


def _resolve_out(out: str | None, command: str, fmt: str) -> Path | None:
    outdir = os.environ.get(OUTDIR_ENV)
    if out is None:
        if not outdir:
            return None
        return Path(outdir) / f"{command}.{'txt' if fmt == 'text' else fmt}"
    p = Path(out)
    if not p.is_absolute() and outdir:
        p = Path(outdir) / p
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if not args.quiet:
        logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(name)s: %(message)s")
        log.info("config %s", json.dumps(config, sort_keys=True))
    try:
        report = args.func(args)
    except (QuantumWalkError, ValueError) as exc:
        print(f"quantumwalks: error: {exc}", file=sys.stderr)
        return 1
    text = render(report, args.format, args.command, config)
    path = _resolve_out(args.out, args.command, args.format)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if not args.quiet:
            log.info("wrote %s", path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
