"""Counter-based random numbers shared by the numpy and numba paths.

Each draw is a pure function of ``(seed, trial, step, slot)``: four rounds of
the splitmix64 finaliser. Trials therefore never share state, the result is
independent of execution order, and both backends see identical streams.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ._backend import HAVE_NUMBA

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


def _mix(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _hash4(seed, trial, step, slot):
    h = _mix(seed)
    h = _mix(h ^ trial)
    h = _mix(h ^ step)
    return _mix(h ^ slot)


def uniform(seed: int, trial, step, slot) -> NDArray[np.float64]:
    """Uniform draws in [0, 1) keyed by ``(seed, trial, step, slot)``.

    Any of ``trial``, ``step`` and ``slot`` may be integer arrays; they are
    broadcast against each other.
    """
    s = np.asarray(seed % (1 << 64), dtype=np.uint64)
    tr = np.asarray(trial).astype(np.uint64)
    st = np.asarray(step).astype(np.uint64)
    sl = np.asarray(slot).astype(np.uint64)
    with np.errstate(over="ignore"):
        h = _hash4(s, tr, st, sl)
    return (h >> _S11).astype(np.float64) * _INV53


if HAVE_NUMBA:
    from numba import njit

    _mix_nb = njit(cache=True)(_mix)

    @njit(cache=True)
    def uniform_nb(seed, trial, step, slot):  # pragma: no cover - compiled
        h = _mix_nb(np.uint64(seed))
        h = _mix_nb(h ^ np.uint64(trial))
        h = _mix_nb(h ^ np.uint64(step))
        h = _mix_nb(h ^ np.uint64(slot))
        return np.float64(h >> _S11) * _INV53

else:  # pragma: no cover
    uniform_nb = None


def trial_seed(seed: int, trial: int) -> int:
    """Derived per-trial seed ``hash(seed, trial)`` as a Python int."""
    s = np.asarray(seed % (1 << 64), dtype=np.uint64)
    with np.errstate(over="ignore"):
        return int(_mix(_mix(s) ^ np.asarray(trial, dtype=np.uint64)))
