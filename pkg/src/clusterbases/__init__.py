"""Exact computations with seeds, dominance order, pointed bases and rank-2 scattering diagrams."""

from .errors import (
    ClusterError,
    ConfigurationError,
    DeformationError,
    FamilyContractError,
    InexactDivision,
    InvariantViolation,
    ParseError,
    UnsupportedRegion,
    UsageError,
)
from .lattice import IntMat, int_inverse, interval, solve_dominance
from .laurent import LaurentPoly, TruncatedSeries, format_poly, parse_poly
from .seeds import Seed, TrackedPath, a2, kronecker, seed, track

__version__ = "0.1.0"

__all__ = [
    "ClusterError",
    "ConfigurationError",
    "DeformationError",
    "FamilyContractError",
    "InexactDivision",
    "IntMat",
    "InvariantViolation",
    "LaurentPoly",
    "ParseError",
    "TruncatedSeries",
    "UnsupportedRegion",
    "UsageError",
    "format_poly",
    "int_inverse",
    "interval",
    "parse_poly",
    "Seed",
    "TrackedPath",
    "a2",
    "kronecker",
    "seed",
    "track",
    "solve_dominance",
]
