"""Symmetry-adapted coordinates, invariant checks and reduced equations."""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .errors import SingularJacobianError, SingularRestrictionError
from .expr import is_zero, substitute
from .expr.core import canonical
from .jet import JetBundle, apply_field, modulus

MAX_TRANSFORM_ORDER = 2


@dataclass(frozen=True)
class CoordinateChange:
    """Adapted coordinates ``(y^1..y^{p-1}, sigma; v^a)`` for old ``(x; u)``.

    ``forward`` maps new names to expressions in the old coordinates;
    ``inverse`` maps old names to expressions in the new ones.  The
    parametric coordinate ``sigma`` is the last new independent name.
    """

    old: JetBundle
    new_independent: tuple
    new_dependent: tuple
    forward: dict
    inverse: dict

    @property
    def parametric(self):
        return self.new_independent[-1]

    def new_bundle(self, order=None):
        return JetBundle(self.new_independent, self.new_dependent, order)

    def inverted(self):
        """The same change read backwards (old coordinates become 'new')."""
        return CoordinateChange(
            self.new_bundle(self.old.order),
            self.old.independent,
            self.old.dependent,
            self.inverse,
            self.forward,
        )

    def roundtrip_residuals(self):
        """``forward(inverse) - id`` for every new coordinate."""
        old_syms = {sp.Symbol(n): self.inverse[n] for n in self.old.independent + self.old.dependent}
        return {
            name: canonical(sp.sympify(expr).xreplace(old_syms) - sp.Symbol(name))
            for name, expr in self.forward.items()
        }


def _jacobian_inverse(change, new, cfg=None):
    # M[j, i] = D~_j chi^i ; then D_{x^i} = sum_j Minv[i, j] D~_j
    chis = [sp.sympify(change.inverse[n]) for n in change.old.independent]
    M = sp.Matrix(
        [[new.total_derivative(chi, j, truncate=False) for chi in chis] for j in range(new.p)]
    )
    det = canonical(M.det(method="berkowitz"))
    if is_zero(det, cfg):
        raise SingularJacobianError(
            f"coordinate change is not transversal: Jacobian determinant {det} vanishes"
        )
    inv = M.inv(method="ADJ").applyfunc(sp.cancel)
    if inv.has(sp.sin, sp.cos, sp.tan):
        inv = inv.applyfunc(sp.trigsimp)
    return inv.applyfunc(canonical)


def transform_jet(change, order=2, cfg=None):
    """Express old jet variables ``u^a_J`` (``|J| <= order``) in adapted coordinates.

    Returns ``{old jet symbol: expression}`` over new base coordinates, new
    dependent variables and their derivatives in the new jet space.
    """
    if order > MAX_TRANSFORM_ORDER:
        raise ValueError(f"jet transformation is implemented up to order {MAX_TRANSFORM_ORDER}")
    old = change.old
    new = change.new_bundle()
    Minv = _jacobian_inverse(change, new, cfg)

    def D(f, i):
        e = sp.cancel(sum(Minv[i, j] * new.total_derivative(f, j, truncate=False) for j in range(new.p)))
        if e.has(sp.sin, sp.cos, sp.tan):
            e = sp.trigsimp(e)
        return canonical(e)

    table = {}
    for a, name in enumerate(old.dependent):
        table[old.jet(a, old.zero())] = canonical(sp.sympify(change.inverse[name]))
    for n in range(1, order + 1):
        for L in old.multi_indices(n):
            i = max(m for m, l in enumerate(L) if l)
            J = tuple(l - (1 if m == i else 0) for m, l in enumerate(L))
            for a in range(old.q):
                table[old.jet(a, L)] = D(table[old.jet(a, J)], i)
    return table


def rewrite(e, change, order=2, cfg=None):
    """Rewrite ``e`` (old coordinates and jets) entirely in adapted coordinates."""
    table = transform_jet(change, order, cfg)
    repl = dict(table)
    for name in change.old.independent:
        repl[sp.Symbol(name)] = sp.sympify(change.inverse[name])
    return canonical(sp.cancel(sp.sympify(e).xreplace(repl)))


def impose_invariance(e, change):
    """Set every derivative of the new dependents along ``sigma`` to zero."""
    new = change.new_bundle()
    s = new.p - 1
    repl = {sym: 0 for sym, (a, J) in new.jet_symbols(e).items() if J[s] > 0}
    return canonical(sp.sympify(e).xreplace(repl))


def verify_invariant(Y, inv, cfg=None, index=0):
    """Zero-test ``Y(inv)``; the verdict keeps the residual for diagnosis."""
    return is_zero(apply_field(Y, inv), cfg, index=index)


@dataclass
class RestrictedInvariant:
    name: str
    value: sp.Expr
    singular: bool = False
    note: str = ""


def restrict_invariants(invariants, rules, supplied=None, cfg=None):
    """Substitute the ``I_X`` rules into each invariant.

    ``invariants`` maps names to expressions.  A substitution that hits a
    singularity (``log(0)``, division by zero) is only accepted when
    ``supplied`` gives ``name -> (value, note)`` with a non-empty note.
    """
    supplied = supplied or {}
    out = []
    for k, (name, expr) in enumerate(invariants.items()):
        try:
            value = substitute(expr, rules)
            singular = value.has(sp.zoo, sp.nan, sp.oo, -sp.oo)
        except ZeroDivisionError:
            value, singular = None, True
        if singular:
            if name not in supplied:
                raise SingularRestrictionError(
                    f"restriction of {name} to I_X is singular; supply its value with a note"
                )
            val, note = supplied[name]
            if not note or not note.strip():
                raise SingularRestrictionError(f"supplied value for {name} needs a consistency note")
            out.append(RestrictedInvariant(name, canonical(val), True, note.strip()))
            continue
        if name in supplied:
            val, note = supplied[name]
            if not is_zero(value - val, cfg, index=k):
                raise ValueError(f"supplied value for {name} disagrees with the restriction {value}")
        out.append(RestrictedInvariant(name, value))
    return out


def verify_section_solution(equations, section, bundle, cfg=None):
    """Substitute ``u^a = f^a(x)`` and all its partial derivatives into each equation."""
    fs = {a: sp.sympify(section[name]) for a, name in enumerate(bundle.dependent) if name in section}
    verdicts = []
    for k, eq in enumerate(equations):
        repl = {}
        for s, (a, J) in bundle.jet_symbols(eq).items():
            if a not in fs:
                raise ValueError(f"no section given for {bundle.dependent[a]}")
            f = fs[a]
            for i, j in enumerate(J):
                if j:
                    f = sp.diff(f, bundle.x[i], j)
            repl[s] = f
        verdicts.append(is_zero(canonical(sp.sympify(eq).xreplace(repl)), cfg, index=k))
    return verdicts


def reduced_equation(F, restricted, symbols=None):
    """Compose ``F`` (over invariant names) with restricted invariant values.

    ``restricted`` maps names to expressions; names of ``F`` absent from the
    map are an error unless listed in ``symbols`` (kept as they are).
    """
    F = sp.sympify(F)
    keep = set(symbols or ())
    repl = {}
    for s in F.free_symbols:
        if s.name in restricted:
            repl[s] = restricted[s.name]
        elif s.name not in keep:
            raise KeyError(f"unknown invariant {s.name!r} in reduced equation")
    return canonical(F.xreplace(repl))


@dataclass
class ReductionReport:
    transformed: dict = field(default_factory=dict)
    restricted: list = field(default_factory=list)
    reduced: list = field(default_factory=list)
    adapted: list = field(default_factory=list)
    solutions: list = field(default_factory=list)


__all__ = [
    "CoordinateChange",
    "ReductionReport",
    "RestrictedInvariant",
    "impose_invariance",
    "reduced_equation",
    "restrict_invariants",
    "rewrite",
    "transform_jet",
    "verify_invariant",
    "verify_section_solution",
]
