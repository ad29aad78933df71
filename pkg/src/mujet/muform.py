"""Compatibility of the semibasic form mu with the contact structure."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import sympy as sp

from .errors import DimensionError
from .expr import is_zero, substitute
from .expr.core import canonical
from .jet import SemibasicForm


def _total(bundle, M, i):
    return M.applyfunc(lambda c: bundle.total_derivative(c, i))


def compat_residual(mu, bundle):
    """``D_i Lambda_j - D_j Lambda_i + [Lambda_i, Lambda_j]`` for ``i < j``.

    Keys are ``(i, j)``; values are ``q x q`` matrices (``1 x 1`` when scalar,
    where the commutator drops out).
    """
    mu.check(bundle)
    out = {}
    for i, j in itertools.combinations(range(bundle.p), 2):
        Li, Lj = mu.matrices[i], mu.matrices[j]
        R = _total(bundle, Lj, i) - _total(bundle, Li, j) + (Li * Lj - Lj * Li)
        out[(i, j)] = sp.ImmutableMatrix(R.applyfunc(canonical))
    return out


def is_compatible(mu, bundle, cfg=None):
    return all(
        is_zero(c, cfg, index=k)
        for k, c in enumerate(c for R in compat_residual(mu, bundle).values() for c in R)
    )


def compat_on_solution(mu, rules, bundle, cfg=None):
    """Zero-test every residual entry after restriction to the solution manifold.

    Returns ``{(i, j, a, b): Verdict}``.
    """
    out = {}
    k = 0
    for (i, j), R in compat_residual(mu, bundle).items():
        for a in range(R.shape[0]):
            for b in range(R.shape[1]):
                out[(i, j, a, b)] = is_zero(substitute(R[a, b], rules), cfg, index=k)
                k += 1
    return out


def nabla(mu, i, f, bundle):
    """``(delta D_i + Lambda_i) f`` for a column vector (or scalar) ``f``."""
    vec = sp.Matrix(f) if isinstance(f, (list, tuple, sp.MatrixBase)) else sp.Matrix([f])
    out = vec.applyfunc(lambda c: bundle.total_derivative(c, i)) + mu.matrices[i] * vec
    return out.applyfunc(canonical)


def nabla_commutator(mu, i, j, f, bundle):
    """``[nabla_i, nabla_j] f``."""
    R = nabla(mu, i, nabla(mu, j, f, bundle), bundle) - nabla(mu, j, nabla(mu, i, f, bundle), bundle)
    return R.applyfunc(canonical)


def exact_from_potential(P, bundle):
    """``mu = dP`` restricted to horizontal directions: ``lambda_i = D_i P``."""
    if bundle.q != 1:
        raise DimensionError("potential forms are scalar (q = 1)")
    if bundle.expression_order(sp.sympify(P)) > 0:
        raise ValueError("the potential must depend on (x, u) only")
    return SemibasicForm.scalar([bundle.total_derivative(P, i) for i in range(bundle.p)])


# --- gauged Lie algebra forms ---------------------------------------------------


def bracket(A, B):
    return A * B - B * A


def structure_constants(generators):
    """``c[i][j][k]`` with ``[L_i, L_j] = c^k_ij L_k``; raises if not closed."""
    Ls = [sp.Matrix(L) for L in generators]
    r = len(Ls)
    basis = sp.Matrix.hstack(*[L.reshape(L.rows * L.cols, 1) for L in Ls])
    c = [[[sp.Integer(0)] * r for _ in range(r)] for _ in range(r)]
    for i, j in itertools.product(range(r), repeat=2):
        target = bracket(Ls[i], Ls[j])
        vec = target.reshape(target.rows * target.cols, 1)
        sol, params = basis.gauss_jordan_solve(vec)
        if params.shape[0]:
            sol = sol.subs({p: 0 for p in params})
        if (basis * sol - vec).applyfunc(sp.simplify) != sp.zeros(*vec.shape):
            raise ValueError(f"[L_{i}, L_{j}] is not in the span of the generators")
        for k in range(r):
            c[i][j][k] = sp.nsimplify(sol[k])
    return c


@dataclass(frozen=True)
class GaugedAlgebraSpec:
    """``Lambda_i = lambda_i^k L_k`` with ``[L_a, L_b] = c^k_ab L_k``.

    ``coefficients[i][k]`` is ``lambda_i^k``; ``constants[a][b][k]`` is ``c^k_ab``.
    """

    generators: tuple
    constants: tuple
    coefficients: tuple

    def __post_init__(self):
        gens = tuple(sp.ImmutableMatrix(L) for L in self.generators)
        object.__setattr__(self, "generators", gens)
        r = len(gens)
        for row in self.coefficients:
            if len(row) != r:
                raise DimensionError(f"need {r} coefficients per direction")
        for a, b in itertools.product(range(r), repeat=2):
            lhs = bracket(gens[a], gens[b])
            rhs = sum((self.constants[a][b][k] * gens[k] for k in range(r)), sp.zeros(*lhs.shape))
            if not all(sp.simplify(e) == 0 for e in lhs - rhs):
                raise ValueError(f"structure constants do not match [L_{a}, L_{b}]")

    @classmethod
    def from_generators(cls, generators, coefficients):
        return cls(tuple(generators), structure_constants(generators), tuple(map(tuple, coefficients)))

    def assemble(self):
        q = self.generators[0].shape[0]
        mats = []
        for row in self.coefficients:
            M = sp.zeros(q, q)
            for lam, L in zip(row, self.generators):
                M += lam * L
            mats.append(M)
        return SemibasicForm(tuple(mats))


def gauged_residual(spec, bundle):
    """``(D_i lambda_j^k - D_j lambda_i^k) + c^k_ab lambda_i^a lambda_j^b`` keyed ``(i, j, k)``."""
    r = len(spec.generators)
    lam = spec.coefficients
    if len(lam) != bundle.p:
        raise DimensionError("one coefficient row per independent variable")
    out = {}
    for i, j in itertools.combinations(range(bundle.p), 2):
        for k in range(r):
            val = bundle.total_derivative(lam[j][k], i) - bundle.total_derivative(lam[i][k], j)
            for a, b in itertools.product(range(r), repeat=2):
                c = spec.constants[a][b][k]
                if c != 0:
                    val += c * lam[i][a] * lam[j][b]
            out[(i, j, k)] = canonical(val)
    return out


def exponential_factor_check(X0, P, system, bundle, cfg=None):
    """Compare the two sides of the exponential-field correspondence for ``mu = dP``.

    Returns ``(mu_verdict, rescaled_verdict)``: whether ``X0`` is a
    mu-symmetry, and whether ``exp(P) X0`` is an ordinary symmetry.
    """
    from .prolong import PointVectorField
    from .symmetry import check_mu_symmetry

    mu = exact_from_potential(P, bundle)
    left = check_mu_symmetry(X0, mu, system, bundle, cfg)
    scaled = PointVectorField(
        tuple(sp.exp(P) * c for c in X0.xi), tuple(sp.exp(P) * c for c in X0.phi), X0.generalized
    )
    right = check_mu_symmetry(scaled, None, system, bundle, cfg)
    return left, right


__all__ = [
    "GaugedAlgebraSpec",
    "bracket",
    "compat_on_solution",
    "compat_residual",
    "exact_from_potential",
    "exponential_factor_check",
    "gauged_residual",
    "is_compatible",
    "nabla",
    "nabla_commutator",
    "structure_constants",
]
