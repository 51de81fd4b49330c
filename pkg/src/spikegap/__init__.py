"""spikegap: spectral-gap toolkit for bit-symmetric spike annealing Hamiltonians.

Four independent routes to the gap of the transverse-field spike model in its
(n+1)-dimensional symmetric subspace: exact tridiagonal diagonalization,
rigorous variational/stoquastic bounds, the spin-coherent instanton action,
and a discrete WKB estimate, plus an avoided-crossing tracker for the
excited states and a power-law-vs-superpolynomial scaling classifier.
"""

from . import crossings, instanton, model, scaling, spectrum, variational, wkb
from .errors import (
    ConfigurationError,
    MethodInapplicableError,
    NearDegenerateError,
    NoBarrierError,
    NoDoubleWellError,
    NodeNotFoundError,
    SpikegapError,
)
from .model import (
    AdiabaticPoint,
    CubicCost,
    CustomCost,
    SpikeCost,
    SpikeParams,
    SpikelessCost,
    TridiagonalOperator,
    build_hamiltonian,
    cost,
    critical_point,
    spikeless_cost,
)
from .scaling import ScalingFit, Verdict
from .spectrum import EigenPair, GapEstimate, GapMethod, gap, lowest_eigenvalues, min_gap_scan
from .variational import BoundPair, bound_pair

__version__ = "0.1.0"

__all__ = [
    "model", "spectrum", "variational", "instanton", "wkb", "scaling", "crossings",
    "SpikeParams", "SpikeCost", "SpikelessCost", "CubicCost", "CustomCost",
    "AdiabaticPoint", "TridiagonalOperator", "build_hamiltonian", "cost",
    "critical_point", "spikeless_cost",
    "EigenPair", "GapEstimate", "GapMethod", "gap", "lowest_eigenvalues",
    "min_gap_scan", "BoundPair", "bound_pair", "ScalingFit", "Verdict",
    "SpikegapError", "ConfigurationError", "NearDegenerateError",
    "NoDoubleWellError", "NoBarrierError", "MethodInapplicableError",
    "NodeNotFoundError",
    "__version__",
]
