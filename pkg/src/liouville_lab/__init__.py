"""Numerical laboratory for isotropic stable processes on exterior domains.

Exact ball kernels (Green function, exit law, exit time), a kernel-driven
walk simulation, principal-value quadrature of the nonlocal operator, the
annulus potential functionals, and a decision engine for Liouville-type
nonexistence criteria of coupled super-solution systems.
"""

__version__ = "0.1.0"

from .errors import LiouvilleLabError
from .kernels import Ball, KernelConfig
from .model import (
    ExponentSet,
    PairPQ,
    PowerLaw,
    ProblemSpec,
    Quad,
    ScalarP,
    StableIndexPair,
    TabulatedRadial,
    Verdict,
    validate_problem,
)
from .sim import MCConfig, MCEstimate

__all__ = [
    "Ball",
    "ExponentSet",
    "KernelConfig",
    "LiouvilleLabError",
    "MCConfig",
    "MCEstimate",
    "PairPQ",
    "PowerLaw",
    "ProblemSpec",
    "Quad",
    "ScalarP",
    "StableIndexPair",
    "TabulatedRadial",
    "Verdict",
    "validate_problem",
    "__version__",
]
