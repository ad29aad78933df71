"""Standard and mu-prolongations of point vector fields.

Everything is built from the recursive formulas.  A scalar form is the
``q = 1`` case of the matrix recursion, and the one-variable case ``p = 1``
is the lambda-prolongation of an ODE field.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .errors import DimensionError
from .expr import SubstitutionSystem, is_zero
from .expr.core import canonical
from .jet import JetVectorField, SemibasicForm, minus, modulus, plus


@dataclass(frozen=True)
class PointVectorField:
    """``xi^i d/dx^i + phi^a d/du^a`` on the bundle's total space.

    ``generalized`` allows the coefficients to depend on derivatives.
    """

    xi: tuple
    phi: tuple
    generalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(canonical(c) for c in self.xi))
        object.__setattr__(self, "phi", tuple(canonical(c) for c in self.phi))

    def check(self, bundle):
        if len(self.xi) != bundle.p or len(self.phi) != bundle.q:
            raise DimensionError(
                f"field has {len(self.xi)}+{len(self.phi)} components, bundle is p={bundle.p}, q={bundle.q}"
            )
        if not self.generalized:
            for c in self.xi + self.phi:
                if bundle.expression_order(c) > 0:
                    raise ValueError(f"coefficient {c} depends on derivatives; pass generalized=True")

    def scaled(self, factor):
        return PointVectorField(
            tuple(factor * c for c in self.xi), tuple(factor * c for c in self.phi), self.generalized
        )


def characteristic(X, bundle):
    """``Q^a = phi^a - u^a_i xi^i``."""
    X.check(bundle)
    return tuple(
        canonical(X.phi[a] - sum(bundle.jet(a, bundle.unit(i)) * X.xi[i] for i in range(bundle.p)))
        for a in range(bundle.q)
    )


def _predecessor(L):
    # step along the last nonzero direction: L = J + e_i
    i = max(m for m, l in enumerate(L) if l)
    return minus(L, i), i


def _prolong(X, mu, bundle):
    X.check(bundle)
    if mu is not None:
        mu.check(bundle)
    b = bundle
    psi = {(a, b.zero()): X.phi[a] for a in range(b.q)}
    for n in range(1, b.order + 1):
        for L in b.multi_indices(n):
            J, i = _predecessor(L)
            dxi = [b.total_derivative(X.xi[m], i) for m in range(b.p)]
            contracted = None
            if mu is not None:
                contracted = [
                    psi[(c, J)] - sum(b.jet(c, plus(J, m)) * X.xi[m] for m in range(b.p))
                    for c in range(b.q)
                ]
            for a in range(b.q):
                val = b.total_derivative(psi[(a, J)], i)
                val -= sum(b.jet(a, plus(J, m)) * dxi[m] for m in range(b.p))
                if mu is not None:
                    Lam = mu.matrices[i]
                    val += sum(Lam[a, c] * contracted[c] for c in range(b.q) if Lam[a, c] != 0)
                psi[(a, L)] = canonical(val)
    return JetVectorField(b, X.xi, psi)


def prolong_standard(X, bundle):
    """``Psi^a_{J+e_i} = D_i Psi^a_J - u^a_{J+e_m} D_i xi^m`` with ``Psi^a_0 = phi^a``."""
    return _prolong(X, None, bundle)


def prolong_mu(X, mu, bundle):
    """mu-prolongation: ``D_i`` replaced by ``delta D_i + Lambda_i`` in the recursion."""
    return _prolong(X, mu, bundle)


def prolong_closed_form(X, bundle):
    """``Psi^a_J = D_J(phi^a - xi^i u^a_i) + xi^i u^a_{J+e_i}`` (cross-check only)."""
    Q = characteristic(X, bundle)
    free = bundle.unbounded()
    psi = {}
    for J in bundle.multi_indices_upto(bundle.order):
        for a in range(bundle.q):
            val = free.total_derivative_multi(Q[a], J)
            val += sum(X.xi[i] * bundle.jet(a, plus(J, i)) for i in range(bundle.p))
            psi[(a, J)] = canonical(val)
    return JetVectorField(bundle, X.xi, psi)


def characteristic_derivatives(X, bundle, upto=None, truncate=True):
    """Table ``(a, J) -> D_J Q^a`` for ``|J| <= upto`` (default ``k - 1``)."""
    Q = characteristic(X, bundle)
    upto = bundle.order - 1 if upto is None else upto
    b = bundle if truncate else bundle.unbounded()
    table = {(a, bundle.zero()): Q[a] for a in range(bundle.q)}
    for n in range(1, upto + 1):
        for L in bundle.multi_indices(n):
            J, i = _predecessor(L)
            for a in range(bundle.q):
                table[(a, L)] = b.total_derivative(table[(a, J)], i)
    return table


def difference_terms(X, mu, bundle):
    """``F^a_J`` with ``mu-prolongation = standard prolongation + F``.

    ``F^a_0 = 0`` and ``F^a_{J+e_i} = (delta D_i + Lambda_i) F_J + Lambda_i D_J Q``.
    """
    X.check(bundle)
    mu.check(bundle)
    b = bundle
    DQ = characteristic_derivatives(X, bundle)
    F = {(a, b.zero()): sp.Integer(0) for a in range(b.q)}
    for n in range(1, b.order + 1):
        for L in b.multi_indices(n):
            J, i = _predecessor(L)
            Lam = mu.matrices[i]
            for a in range(b.q):
                val = b.total_derivative(F[(a, J)], i)
                for c in range(b.q):
                    if Lam[a, c] != 0:
                        val += Lam[a, c] * (F[(c, J)] + DQ[(c, J)])
                F[(a, L)] = canonical(val)
    return F


def invariant_manifold(X, bundle):
    """The equations ``D_J Q^a = 0``, ``|J| <= k - 1``, as ``((a, J), D_J Q^a)``."""
    table = characteristic_derivatives(X, bundle)
    return [
        ((a, J), table[(a, J)])
        for J in bundle.multi_indices_upto(bundle.order - 1)
        for a in range(bundle.q)
    ]


def solve_for_leading(equations, leading, bundle, closure=False, cfg=None):
    """Orient each equation into a rule ``leading -> ...``.

    ``equations`` is a list of expressions (each ``= 0``) and ``leading`` the
    jet variable to solve for in each; equations must be linear in it.
    """
    if len(equations) != len(leading):
        raise ValueError(f"{len(equations)} equations but {len(leading)} leading variables")
    rules = SubstitutionSystem(closure=closure, bundle=bundle)
    for k, (eq, lead) in enumerate(zip(equations, leading)):
        coeff = canonical(sp.diff(eq, lead))
        if lead in coeff.free_symbols:
            raise ValueError(f"equation {eq} is not linear in {lead}")
        if is_zero(coeff, cfg, index=k):
            raise ValueError(f"{lead} has identically zero coefficient in {eq}")
        rest = canonical(eq - coeff * lead)
        rules.add(lead, canonical(-rest / coeff))
    return rules


def invariant_rules(X, bundle, leading, cfg=None):
    """``I_X`` as substitution rules.

    ``leading`` maps ``(a, J)`` (the equation ``D_J Q^a = 0``) to the jet
    variable it is solved for; a plain list follows ``invariant_manifold``'s
    order.
    """
    eqs = invariant_manifold(X, bundle)
    if isinstance(leading, dict):
        missing = [key for key, _ in eqs if key not in leading]
        if missing:
            raise ValueError(f"no leading variable for D_J Q equations {missing}")
        leads = [leading[key] for key, _ in eqs]
    else:
        leads = list(leading)
    return solve_for_leading([e for _, e in eqs], leads, bundle, cfg=cfg)


def evolutionary_identity_residual(X, bundle):
    """Coefficientwise ``X^(k) - X_Q^(k) - xi^i D_i``; every entry should vanish.

    The top-order entries use the untruncated total derivative.
    """
    Y = prolong_standard(X, bundle)
    DQ = characteristic_derivatives(X, bundle, upto=bundle.order, truncate=False)
    out = []
    for J in bundle.multi_indices_upto(bundle.order):
        for a in range(bundle.q):
            res = Y.psi[(a, J)] - DQ[(a, J)]
            res -= sum(X.xi[i] * bundle.jet(a, plus(J, i)) for i in range(bundle.p))
            out.append(((a, J), canonical(res)))
    return out


def restrict_field(Y, rules):
    """Substitute ``rules`` into every coefficient of ``Y``."""
    from .expr import substitute

    return Y.map(lambda c: substitute(c, rules))


__all__ = [
    "PointVectorField",
    "characteristic",
    "characteristic_derivatives",
    "difference_terms",
    "evolutionary_identity_residual",
    "invariant_manifold",
    "invariant_rules",
    "modulus",
    "prolong_closed_form",
    "prolong_mu",
    "prolong_standard",
    "restrict_field",
    "solve_for_leading",
]
