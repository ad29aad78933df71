"""Oriented rewrite rules ``target -> expression`` with optional closure.

A target is a symbol (jet variable or parameter) or an undefined-function
atom such as ``zeta[0,1](x,t)``.  With closure on, a rule for ``u_t`` also
rewrites ``u_xt``, ``u_tt``, ... by total differentiation of its right-hand
side, and a rule for a function derivative rewrites every higher derivative
of the same application by partial differentiation.
"""

from __future__ import annotations

import sympy as sp
from sympy.core.function import AppliedUndef

from ..errors import CyclicRulesError
from .core import canonical, derivative_orders, function_atoms


def _is_function_atom(e):
    return isinstance(e, AppliedUndef) or (
        isinstance(e, sp.Derivative) and isinstance(e.expr, AppliedUndef)
    )


class SubstitutionSystem:
    def __init__(self, rules=(), closure=False, bundle=None, max_passes=64):
        self.rules = []
        self.closure = closure
        self.bundle = bundle
        self.max_passes = max_passes
        self._exact = {}
        self._derived = {}
        for target, rhs in rules:
            self.add(target, rhs)

    def add(self, target, rhs):
        target = sp.sympify(target)
        if not (isinstance(target, sp.Symbol) or _is_function_atom(target)):
            raise ValueError(f"rule target must be a symbol or function atom, got {target}")
        if self.closure and isinstance(target, sp.Symbol) and self.bundle is None:
            raise ValueError("closure over jet variables needs a bundle")
        rhs = canonical(rhs)
        self.rules.append((target, rhs))
        self._exact.setdefault(target, rhs)
        self._derived.clear()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    @property
    def targets(self):
        return [t for t, _ in self.rules]

    def lookup(self, atom):
        """Right-hand side replacing ``atom``, or ``None``."""
        if atom in self._exact:
            return self._exact[atom]
        if not self.closure:
            return None
        if atom in self._derived:
            return self._derived[atom]
        rhs = self._derive(atom)
        self._derived[atom] = rhs
        return rhs

    def _derive(self, atom):
        if isinstance(atom, sp.Symbol):
            info = self.bundle.jet_info(atom) if self.bundle is not None else None
            if info is None:
                return None
            a, K = info
            for target, rhs in self.rules:
                if not isinstance(target, sp.Symbol):
                    continue
                tinfo = self.bundle.jet_info(target)
                if tinfo is None or tinfo[0] != a:
                    continue
                J = tinfo[1]
                if all(k >= j for k, j in zip(K, J)):
                    out = rhs
                    for i, (k, j) in enumerate(zip(K, J)):
                        for _ in range(k - j):
                            out = self.bundle.total_derivative(out, i, truncate=False)
                    return out
            return None
        if _is_function_atom(atom):
            app, orders = derivative_orders(atom)
            for target, rhs in self.rules:
                if not _is_function_atom(target):
                    continue
                tapp, torders = derivative_orders(target)
                if tapp != app or not all(o >= t for o, t in zip(orders, torders)):
                    continue
                pairs = [(s, o - t) for s, o, t in zip(app.args, orders, torders) if o > t]
                return canonical(sp.diff(rhs, *pairs)) if pairs else rhs
        return None


def substitute(e, rules):
    """Rewrite ``e`` with ``rules`` until no target (or consequence) remains."""
    e = sp.sympify(e)
    for _ in range(rules.max_passes):
        repl = {}
        for s in e.free_symbols:
            rhs = rules.lookup(s)
            if rhs is not None:
                repl[s] = rhs
        for atom in function_atoms(e):
            rhs = rules.lookup(atom)
            if rhs is not None:
                repl[atom] = rhs
        if not repl:
            return canonical(e)
        # plain tree replacement; normalizing once at the end is far cheaper
        e = e.xreplace(repl)
    raise CyclicRulesError(f"substitution did not terminate after {rules.max_passes} passes")
