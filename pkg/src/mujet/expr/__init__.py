from .core import ELEMENTARY, Expression, canonical, diff, function_atoms
from .parser import parse, tokenize
from .printer import to_text
from .subst import SubstitutionSystem, substitute
from .symbols import SymbolTable
from .zero import DEFAULT_CONFIG, Verdict, ZeroKind, ZeroTestConfig, exact_zero, is_zero

__all__ = [
    "ELEMENTARY",
    "DEFAULT_CONFIG",
    "Expression",
    "SubstitutionSystem",
    "SymbolTable",
    "Verdict",
    "ZeroKind",
    "ZeroTestConfig",
    "canonical",
    "diff",
    "exact_zero",
    "function_atoms",
    "is_zero",
    "parse",
    "substitute",
    "to_text",
    "tokenize",
]
