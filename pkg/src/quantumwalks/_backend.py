"""Backend selection for the compiled kernels.

The hot loops (absorbing walks, decoherence trajectories and Monte Carlo
hitting times) exist twice: as numba ``@njit`` kernels and as vectorised
numpy code. ``QUANTUMWALKS_BACKEND`` picks one of them at call time.
"""

from __future__ import annotations

import os

ENV_VAR = "QUANTUMWALKS_BACKEND"
BACKENDS = ("numba", "numpy")

try:  # pragma: no cover - exercised implicitly
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def resolve_backend(backend: str | None = None) -> str:
    """Return the backend to use for a kernel call.

    Parameters
    ----------
    backend : str, optional
        Explicit choice. When omitted the environment variable is read, and
        numba is used if it is importable.

    Raises
    ------
    ValueError
        For an unknown backend name, or when numba is requested but missing.
    """
    name = backend if backend is not None else os.environ.get(ENV_VAR, "")
    name = name.strip().lower()
    if not name:
        return "numba" if HAVE_NUMBA else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is not installed")
    return name
