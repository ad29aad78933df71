from __future__ import annotations

import sympy as sp

from ..errors import JetSuffixError


class SymbolTable:
    """Names a parser may resolve: bundle coordinates, jets, parameters, functions."""

    def __init__(self, bundle=None, parameters=(), functions=(), symbols=()):
        self.bundle = bundle
        self.parameters = tuple(parameters)
        self.functions = frozenset(functions)
        self.symbols = tuple(symbols)
        declared = list(self.parameters) + sorted(self.functions) + list(self.symbols)
        if bundle is not None:
            declared += list(bundle.independent) + list(bundle.dependent)
        clash = {n for n in declared if declared.count(n) > 1}
        if clash:
            raise ValueError(f"names declared twice: {sorted(clash)}")

    def is_function(self, name):
        return name in self.functions

    def resolve(self, name):
        if "_" in name:
            if self.bundle is None:
                raise JetSuffixError(f"jet variable {name!r} without a bundle")
            dep, suffix = name.split("_", 1)
            return self.bundle.jet_from_suffix(dep, suffix)
        if self.bundle is not None and (
            name in self.bundle.independent or name in self.bundle.dependent
        ):
            return sp.Symbol(name)
        if name in self.parameters or name in self.symbols:
            return sp.Symbol(name)
        return None

    def extended(self, parameters=(), functions=(), symbols=()):
        return SymbolTable(
            self.bundle,
            self.parameters + tuple(parameters),
            self.functions | set(functions),
            self.symbols + tuple(symbols),
        )
