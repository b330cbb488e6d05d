"""
Simulation workbench for coined, continuous-time and Szegedy quantum walks.

Submodules
----------
core          states, distributions, errors
classical     classical random-walk baselines
line_walks    coined walks on the integer line
graph_walks   coined walks on graphs, hypercube mixing and search
ctqw          continuous-time walks, glued trees, scattering
szegedy       quantized Markov chains
stochastics   decoherence of the line walk
oracles       closed-form limit laws
universality  wire and gate gadgets
cli           command-line driver
"""

from . import (
    classical,
    core,
    ctqw,
    graph_walks,
    line_walks,
    oracles,
    stochastics,
    szegedy,
    universality,
)
from .core import (
    DimensionError,
    DomainError,
    InitSpec,
    NormalizationError,
    NumericalError,
    ProbDist,
    QuantumWalkError,
    UnitarityError,
    WalkState,
    position_distribution,
    total_variation,
)
from .graph_walks import Graph
from .line_walks import CoinSpec, evolve, evolve_fourier

__version__ = "0.1.0"

__all__ = [
    "CoinSpec",
    "DimensionError",
    "DomainError",
    "Graph",
    "InitSpec",
    "NormalizationError",
    "NumericalError",
    "ProbDist",
    "QuantumWalkError",
    "UnitarityError",
    "WalkState",
    "classical",
    "core",
    "ctqw",
    "evolve",
    "evolve_fourier",
    "graph_walks",
    "line_walks",
    "oracles",
    "position_distribution",
    "stochastics",
    "szegedy",
    "total_variation",
    "universality",
]
