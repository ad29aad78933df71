"""Symbolic mu-prolongations of vector fields on jet bundles.

The package verifies mu-symmetries of differential equations, generates
determining systems and carries out symmetry reduction in adapted
coordinates.  Expressions are sympy objects; equality is decided by a
two-tier zero test (exact canonicalization, then seeded high-precision
evaluation).
"""

from importlib import resources

from .errors import (
    CyclicRulesError,
    DimensionError,
    EvaluationError,
    JetSuffixError,
    MujetError,
    OrderOverflowError,
    ParseError,
    SingularJacobianError,
    SingularRestrictionError,
    UndeclaredSymbolError,
)
from .expr import SymbolTable, Verdict, ZeroKind, ZeroTestConfig, is_zero, parse, to_text
from .jet import JetBundle, JetVectorField, SemibasicForm, apply_field
from .problem import Problem, load, loads
from .prolong import PointVectorField, prolong_mu, prolong_standard

__version__ = "0.1.0"


def problem_path(name):
    """Path of a bundled problem file, e.g. ``problem_path("heat")``."""
    return resources.files(__package__) / "problems" / f"{name}.mujet"


__all__ = [
    "CyclicRulesError",
    "DimensionError",
    "EvaluationError",
    "JetBundle",
    "JetSuffixError",
    "JetVectorField",
    "MujetError",
    "OrderOverflowError",
    "ParseError",
    "PointVectorField",
    "Problem",
    "SemibasicForm",
    "SingularJacobianError",
    "SingularRestrictionError",
    "SymbolTable",
    "UndeclaredSymbolError",
    "Verdict",
    "ZeroKind",
    "ZeroTestConfig",
    "apply_field",
    "is_zero",
    "load",
    "loads",
    "parse",
    "problem_path",
    "prolong_mu",
    "prolong_standard",
    "to_text",
]
