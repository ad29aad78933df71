"""mu-symmetry checks and determining-system generation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import sympy as sp

from .expr import SubstitutionSystem, is_zero, substitute
from .expr.core import canonical, function_atoms
from .jet import (
    SemibasicForm,
    apply_field,
    contact_forms,
    horizontal_components,
    modulus,
    plus,
    OneForm,
)
from .prolong import prolong_mu, prolong_standard

apply = apply_field


@dataclass
class EquationSystem:
    """Equations ``Delta_i = 0`` and solved forms ``leading -> rhs`` describing S_Delta."""

    equations: list
    solved: list = field(default_factory=list)

    def rules(self, bundle):
        return SubstitutionSystem(self.solved, closure=True, bundle=bundle)

    def check_solved(self, bundle, cfg=None):
        rules = self.rules(bundle)
        for k, eq in enumerate(self.equations):
            if self.solved and not is_zero(substitute(eq, rules), cfg, index=k):
                raise ValueError(f"solved forms do not annihilate equation {eq}")
        return rules


class Classification(enum.Enum):
    STRONG = "StrongSymmetry"
    SYMMETRY = "Symmetry"
    NONE = "NotSymmetry"


@dataclass
class SymmetryVerdict:
    raw: list
    restricted: list
    raw_verdicts: list
    restricted_verdicts: list
    classification: Classification
    factors: list

    def __bool__(self):
        return self.classification is not Classification.NONE


def _jet_gens(bundle, e):
    return sorted(bundle.jet_symbols(e), key=lambda s: _jet_key(bundle, s))


def _jet_key(bundle, s):
    a, J = bundle.jet_info(s)
    return (modulus(J), a, tuple(-j for j in J))


def extract_factor(raw, eq, bundle):
    """``Phi`` with ``raw = Phi * eq`` by exact polynomial division, else ``None``."""
    gens = _jet_gens(bundle, raw + eq)
    if not gens:
        return None
    try:
        if not (raw.is_polynomial(*gens) and eq.is_polynomial(*gens)):
            return None
        quo, rem = sp.div(sp.Poly(raw, *gens), sp.Poly(eq, *gens))
    except (sp.PolynomialError, sp.CoercionFailed):
        return None
    if rem.is_zero:
        return canonical(quo.as_expr())
    return None


def check_field(Y, system, bundle, cfg=None):
    """Classify the jet field ``Y`` against ``system``."""
    rules = system.check_solved(bundle, cfg) if system.solved else None
    raw = [apply_field(Y, eq) for eq in system.equations]
    raw_v = [is_zero(r, cfg, index=k) for k, r in enumerate(raw)]
    if all(raw_v):
        return SymmetryVerdict(
            raw, [sp.Integer(0)] * len(raw), raw_v, raw_v, Classification.STRONG,
            [sp.Integer(0)] * len(raw),
        )
    restricted = [substitute(r, rules) if rules is not None else r for r in raw]
    res_v = [is_zero(r, cfg, index=len(raw) + k) for k, r in enumerate(restricted)]
    factors = [extract_factor(r, eq, bundle) for r, eq in zip(raw, system.equations)]
    cls = Classification.SYMMETRY if all(res_v) else Classification.NONE
    return SymmetryVerdict(raw, restricted, raw_v, res_v, cls, factors)


def check_mu_symmetry(X, mu, system, bundle, cfg=None):
    """Is ``X`` a (strong) mu-symmetry of ``system``?  ``mu=None`` is the standard case."""
    Y = prolong_standard(X, bundle) if mu is None else prolong_mu(X, mu, bundle)
    return check_field(Y, system, bundle, cfg)


def mu_preservation_residual(Y, mu):
    """dx^i-components of ``L_Y theta^a_J + (Y _| Lambda_i theta_J)^a dx^i``.

    Computed with Cartan's formula on the coordinate coframe; the table is
    keyed by ``(a, J, i)`` and vanishes exactly when ``Y`` is the
    mu-prolongation of its projection.
    """
    b = Y.bundle
    if mu is not None:
        mu.check(b)
    free = b.unbounded()
    out = {}
    for theta in contact_forms(b):
        contractions = {}
        for c in range(b.q):
            contractions[c] = Y.psi[(c, theta.J)] - sum(
                b.jet(c, plus(theta.J, m)) * Y.xi[m] for m in range(b.p)
            )
        a, J = theta.a, theta.J
        interior = OneForm(
            {m: -Y.psi[(a, plus(J, m))] for m in range(b.p)},
            {(a, plus(J, m)): Y.xi[m] for m in range(b.p)},
        )
        comps = horizontal_components(interior, free)
        for i in range(b.p):
            # the horizontal part of d(Y _| theta) is its total derivative
            terms = [free.total_derivative(contractions[a], i), comps[i]]
            if mu is not None:
                Lam = mu.matrices[i]
                terms += [Lam[a, c] * contractions[c] for c in range(b.q)]
            out[(a, J, i)] = canonical(sp.Add(*terms))
    return out


# --- determining systems -------------------------------------------------------


def _unknown_arguments(exprs):
    args = set()
    for e in exprs:
        for atom in function_atoms(sp.sympify(e)):
            app = atom.expr if isinstance(atom, sp.Derivative) else atom
            args |= set(app.args)
    return args


def collect_monomials(e, gens):
    """Coefficients of ``e`` as a polynomial in ``gens``.

    Ordered by total degree, then lexicographically in ``gens`` order.
    Denominators involving ``gens`` are cleared first.
    """
    e = canonical(e)
    if e == 0:
        return []
    num, den = sp.fraction(sp.together(e))
    if den.free_symbols & set(gens):
        e = sp.expand(num)
    if not gens:
        return [((), canonical(e))]
    poly = sp.Poly(e, *gens)
    terms = sorted(poly.terms(), key=lambda t: (sum(t[0]), tuple(-d for d in t[0])))
    return [(m, canonical(c)) for m, c in terms if canonical(c) != 0]


def determining_system(system, X, mu, bundle):
    """Coefficients of ``Y(Delta)`` restricted to S_Delta, one equation per monomial.

    ``X`` (and ``mu``) carry unknown undefined functions; monomials are taken
    in the jet variables that are not arguments of those unknowns.
    """
    Y = prolong_standard(X, bundle) if mu is None else prolong_mu(X, mu, bundle)
    rules = system.rules(bundle)
    known = list(X.xi) + list(X.phi)
    if mu is not None:
        known += [c for m in mu.matrices for c in m]
    ansatz_args = _unknown_arguments(known)
    out = []
    seen = set()
    for eq in system.equations:
        restricted = substitute(apply_field(Y, eq), rules)
        gens = [g for g in _jet_gens(bundle, restricted) if g not in ansatz_args]
        for mono, coeff in collect_monomials(restricted, gens):
            key = coeff
            if key in seen or -key in seen:
                continue
            seen.add(key)
            out.append(coeff)
    return out


def evaluate_family(equations, family, relations=()):
    """Plug concrete functions into determining equations.

    ``family`` maps unknown names to ``sympy.Lambda`` objects; ``relations``
    are oriented rules for any free functions the family still contains.
    """
    rules = SubstitutionSystem(list(relations), closure=True)
    repl = {sp.Function(name): lam for name, lam in family.items()}
    return [substitute(sp.sympify(e).subs(repl).doit(), rules) for e in equations]


__all__ = [
    "Classification",
    "EquationSystem",
    "SymmetryVerdict",
    "apply",
    "check_field",
    "check_mu_symmetry",
    "collect_monomials",
    "determining_system",
    "evaluate_family",
    "extract_factor",
    "mu_preservation_residual",
]
