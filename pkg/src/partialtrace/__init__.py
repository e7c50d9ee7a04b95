"""Weighted partial trace operators, barrier functions and Hölder estimates.

Submodules
----------
spectral
    Jacobi eigensolver, Loewner order, Courant-Fischer sampling.
operators
    Weight vectors, the operator ``M_a``, Pucci weights, Hamiltonians.
barrier
    Radial barrier ODE solved by quadrature, with property checks.
regularity
    Hölder exponent, explicit constants, doubling-variable matrix checks.
solver
    Monotone wide-stencil scheme in two dimensions and Hölder diagnostics.
counterexample
    A continuous solution without Hölder modulus for ``a_1 = a_N = 0``.
"""
__version__ = "0.1.0"

from .errors import (
    DivergenceError,
    DomainError,
    InconclusiveError,
    InvalidInputError,
    NotApplicableError,
    NotClassAError,
    NumericalError,
    PartialTraceError,
)
from .spectral import Spectrum, eigen_decompose, eigenvalues, loewner_leq
from .operators import HamiltonianSpec, WeightVector, evaluate, pucci_weights
from .barrier import BarrierFunction, BarrierParams, verify_properties
from .regularity import ProblemData, beta, proofcheck, theorem_constants
from .solver import Grid, SolverConfig, estimate_exponent, holder_seminorm, solve
from .expr import Expression

__all__ = [
    "__version__",
    "PartialTraceError", "InvalidInputError", "NotClassAError", "DomainError",
    "NotApplicableError", "NumericalError", "DivergenceError", "InconclusiveError",
    "Spectrum", "eigen_decompose", "eigenvalues", "loewner_leq",
    "WeightVector", "HamiltonianSpec", "evaluate", "pucci_weights",
    "BarrierParams", "BarrierFunction", "verify_properties",
    "ProblemData", "beta", "theorem_constants", "proofcheck",
    "Grid", "SolverConfig", "solve", "holder_seminorm", "estimate_exponent",
    "Expression",
]
