"""Shared fixtures and the acceptance-criteria summary."""

from __future__ import annotations

import numpy as np
import pytest

CRITERIA = {
    1: "classical binomial P(0) at n=100",
    2: "Hadamard worked states t=1,2,3",
    3: "evolve / fourier / path-counting agreement",
    4: "sigma(t)/t limit at t=2000",
    5: "limit-density L1 distance, mass, second moment",
    6: "symmetry classifier vs brute force",
    7: "one-barrier absorption 2/pi",
    8: "two-barrier absorption p_n + q_n = 1, p_20 ~ 1/sqrt2",
    9: "11-cycle averaged distribution uniform",
    10: "hypercube n=8 instantaneous mixing",
    11: "SKW search n=8",
    12: "CTQW arcsine KS distance",
    13: "glued trees speedup and column reduction",
    14: "Szegedy isometries, unitarity, spectrum",
    15: "coin entanglement entropy at t=2000",
    16: "phase gate, wire transfer, G4, perfect transmission",
    17: "decoherence variance exponents and monotone TV",
    18: "scattering flux and wave-packet oracle",
}

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: pytest.Item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        n = int(mark.args[0])
        res = item.config.stash[_RESULTS].setdefault(n, {"ok": True, "notes": [], "ran": 0})
        res["ran"] += 1
        res["ok"] &= rep.passed
        res["notes"].extend(getattr(item, "_measured", []))


@pytest.fixture
def measured(request: pytest.FixtureRequest):
    """Append ``name=value`` notes that the criterion summary prints."""
    notes: list[str] = []
    request.node._measured = notes

    def add(name: str, value) -> None:
        notes.append(f"{name}={value:.6g}" if isinstance(value, float) else f"{name}={value}")

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config: pytest.Config) -> None:
    results = config.stash[_RESULTS]
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        res = results.get(n)
        if res is None:
            status = "NOT RUN"
            notes = ""
        else:
            status = "PASS" if res["ok"] else "FAIL"
            notes = " ".join(res["notes"])
        line = f"criterion {n:2d} {status:7s} {title}"
        tr.write_line(f"{line}  [{notes}]" if notes else line)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)

