"""Canonical forms and partial differentiation on top of sympy trees.

Expressions are plain sympy objects.  The constructors in this package only
ever build rational constants, symbols, sums, products, powers with rational
exponents, the elementary functions listed in ``ELEMENTARY`` and applications
of undefined functions to symbol arguments (with formal derivative orders
recorded as ``sympy.Derivative``).
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp
from sympy.core.function import AppliedUndef

Expression = sp.Expr

ELEMENTARY = {
    "exp": sp.exp,
    "log": sp.log,
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "arctan": sp.atan,
    "sqrt": sp.sqrt,
}

ZERO = sp.Integer(0)
ONE = sp.Integer(1)


def _has_sum_denominator(e):
    for term in sp.Add.make_args(e):
        for factor in sp.Mul.make_args(term):
            if factor.is_Pow and factor.exp.is_negative and factor.base.is_Add:
                return True
    return False


# Sparse Laurent polynomials: {((symbol, exponent), ...): Fraction}.  Most
# expressions the engine builds have this shape, and dictionary arithmetic
# is far cheaper than sympy's general expand.

_MAX_POWER = 32


def _add_into(acc, terms, scale=1):
    for mono, c in terms.items():
        v = acc.get(mono, 0) + scale * c
        if v:
            acc[mono] = v
        else:
            acc.pop(mono, None)
    return acc


def _sym_key(pair):
    return pair[0].name


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for s, k in m2:
        exps[s] = exps.get(s, 0) + k
    return tuple(sorted(((s, k) for s, k in exps.items() if k), key=_sym_key))


def _poly_mul(p1, p2):
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _monomial_power(terms, n):
    ((m, c),) = terms.items()
    c = Fraction(c) ** n
    return {tuple((s, k * n) for s, k in m): int(c) if c.denominator == 1 else c}


def laurent_terms(e):
    """Sparse term dictionary of ``e``.

    Returns ``None`` unless ``e`` is a Laurent polynomial with rational
    coefficients in plain symbols.
    """
    if e.is_Symbol:
        return {((e, 1),): 1}
    if e.is_Rational:
        # plain ints where possible; Fraction arithmetic is several times slower
        if not e:
            return {}
        return {(): int(e.p) if e.q == 1 else Fraction(int(e.p), int(e.q))}
    if e.is_Add:
        acc = {}
        for arg in e.args:
            t = laurent_terms(arg)
            if t is None:
                return None
            _add_into(acc, t)
        return acc
    if e.is_Mul:
        acc = {(): 1}
        for arg in e.args:
            t = laurent_terms(arg)
            if t is None:
                return None
            acc = _poly_mul(acc, t)
        return acc
    if e.is_Pow and e.exp.is_Integer:
        n = int(e.exp)
        if e.base.is_Symbol:
            return {((e.base, n),): 1}
        base = laurent_terms(e.base)
        if base is None:
            return None
        if len(base) == 1:
            return _monomial_power(base, n)
        # only a single monomial can be inverted
        if n < 0 or n > _MAX_POWER:
            return None
        acc = base
        for _ in range(n - 1):
            acc = _poly_mul(acc, base)
        return acc
    return None


def from_laurent_terms(terms):
    """Rebuild a sympy expression from a sparse term dictionary."""
    return sp.Add(
        *[
            sp.Mul(sp.Rational(c.numerator, c.denominator), *[s**k for s, k in mono])
            for mono, c in terms.items()
        ]
    )


def laurent_derivative(terms, s):
    """Partial derivative of a sparse term dictionary by the symbol ``s``."""
    out = {}
    for mono, c in terms.items():
        for idx, (sym, k) in enumerate(mono):
            if sym == s:
                rest = mono[:idx] + mono[idx + 1 :]
                if k != 1:
                    rest = mono[:idx] + ((sym, k - 1),) + mono[idx + 1 :]
                _add_into(out, {rest: c * k})
                break
    return out


def laurent_chain_derivative(terms, base, shifts):
    """``d/d base + sum_s shifts[s] * d/ds`` applied to a term dictionary."""
    out = laurent_derivative(terms, base)
    for s, target in shifts.items():
        for mono, c in laurent_derivative(terms, s).items():
            _add_into(out, {_mono_mul(mono, ((target, 1),)): c})
    return out


def canonical(e):
    """Return the canonical form of ``e``.

    Laurent polynomials in the atoms (symbols, function applications, powers
    of sums with fractional exponent) are fully expanded, which is already a
    normal form.  When a sum appears in a denominator the expression is
    brought to a single reduced fraction with ``cancel``.
    """
    e = sp.sympify(e)
    if e.is_Atom:
        return e
    terms = laurent_terms(e)
    if terms is not None:
        return from_laurent_terms(terms)
    if not _has_sum_denominator(e):
        e = sp.expand(e)
        if not _has_sum_denominator(e):
            return e
    # cancelling before expanding avoids distributing over the denominator
    num, den = sp.fraction(sp.cancel(sp.together(e)))
    num, den = sp.expand(num), sp.expand(den)
    return num if den == 1 else num / den


def diff(e, s):
    """Partial derivative of ``e`` with respect to symbol ``s``.

    All other symbols are independent.  Undefined functions pick up formal
    derivative orders through the chain rule.
    """
    return canonical(sp.diff(e, s))


def function_atoms(e):
    """Undefined-function applications and their formal derivatives in ``e``."""
    atoms = set()
    for d in e.atoms(sp.Derivative):
        if isinstance(d.expr, AppliedUndef):
            atoms.add(d)
    for f in e.atoms(AppliedUndef):
        atoms.add(f)
    return atoms


def derivative_orders(atom):
    """Split a function atom into ``(application, orders)``.

    ``orders`` has one entry per argument slot.
    """
    if isinstance(atom, sp.Derivative):
        app = atom.expr
        counts = dict(atom.variable_count)
    else:
        app = atom
        counts = {}
    return app, tuple(int(counts.get(a, 0)) for a in app.args)


def function_derivative(app, orders):
    """Build the derivative of the undefined application ``app`` of ``orders``."""
    pairs = [(a, n) for a, n in zip(app.args, orders) if n]
    if not pairs:
        return app
    return sp.Derivative(app, *pairs)


def free_names(e):
    return {s.name for s in e.free_symbols}
