"""Shared builders for the test-suite: bundles, parsing shortcuts, random inputs."""

import random
from functools import lru_cache
from pathlib import Path

import sympy as sp

from mujet import load
from mujet.expr import SymbolTable, parse
from mujet.jet import JetBundle, SemibasicForm
from mujet.muform import exact_from_potential
from mujet.prolong import PointVectorField

PROBLEMS = Path(__file__).resolve().parent.parent / "src" / "mujet" / "problems"
GOLDEN = Path(__file__).resolve().parent / "golden"

XT = JetBundle(("x", "t"), ("u",), 2)
XY = JetBundle(("x", "y"), ("u", "v"), 2)


@lru_cache(maxsize=None)
def problem(name):
    return load(PROBLEMS / f"{name}.mujet")


def parser(bundle=XT, parameters=(), functions=(), symbols=()):
    ctx = SymbolTable(bundle, parameters, functions, symbols)
    return lambda text: parse(text, ctx)


def field(bundle, xi, phi, **names):
    P = parser(bundle, **names)
    return PointVectorField(tuple(P(s) for s in xi), tuple(P(s) for s in phi))


def scalar_form(bundle, lambdas, **names):
    P = parser(bundle, **names)
    return SemibasicForm.scalar([P(s) for s in lambdas])


def matrix_form(bundle, matrices, **names):
    P = parser(bundle, **names)
    return SemibasicForm(tuple(sp.Matrix([[P(c) for c in row] for row in M]) for M in matrices))


# --- random instances ---------------------------------------------------------------


def random_poly(rng, symbols, degree=2, terms=3):
    out = sp.Integer(rng.randint(-3, 3))
    for _ in range(terms):
        mono = sp.Integer(rng.choice([-3, -2, -1, 1, 2, 3]))
        for _ in range(rng.randint(1, degree)):
            mono *= rng.choice(symbols)
        out += mono
    return sp.expand(out)


def base_symbols(bundle):
    return [sp.Symbol(n) for n in bundle.independent + bundle.dependent]


def random_point_field(rng, bundle, degree=2):
    syms = base_symbols(bundle)
    return PointVectorField(
        tuple(random_poly(rng, syms, degree, terms=2) for _ in range(bundle.p)),
        tuple(random_poly(rng, syms, degree, terms=2) for _ in range(bundle.q)),
    )


def random_transversal_field(rng, bundle, degree=2):
    """Random field whose ``x``-component is a nonzero constant.

    ``D_J Q = 0`` then solves for ``u_{J,x}`` without denominators.
    """
    X = random_point_field(rng, bundle, degree)
    xi = (sp.Integer(rng.choice([-3, -2, -1, 1, 2, 3])),) + X.xi[1:]
    return PointVectorField(xi, X.phi)


def x_leading(bundle):
    """Leading variables ``u^a_{J+e_x}`` for ``D_J Q^a = 0``; fine whenever ``xi^x != 0``."""
    return {
        (a, J): bundle.jet(a, tuple(j + (m == 0) for m, j in enumerate(J)))
        for J in bundle.multi_indices_upto(bundle.order - 1)
        for a in range(bundle.q)
    }


def random_scalar_form(rng, bundle):
    """A compatible scalar form ``D_i P`` of source order 1."""
    return exact_from_potential(random_poly(rng, base_symbols(bundle), terms=2), bundle)


def random_matrix_form(rng, bundle):
    """A compatible 2x2 form ``-(D_i G) G^{-1}`` with ``det G = 1``."""
    syms = base_symbols(bundle)
    # affine entries keep the prolongations small enough for bulk checks
    a = random_poly(rng, syms, degree=1, terms=1)
    c = random_poly(rng, syms, degree=1, terms=1)
    G = sp.Matrix([[1, a], [c, 1 + a * c]])
    Ginv = sp.Matrix([[1 + a * c, -a], [-c, 1]])
    mats = []
    for i in range(bundle.p):
        DG = G.applyfunc(lambda e: bundle.total_derivative(e, i))
        mats.append((-DG * Ginv).applyfunc(sp.expand))
    return SemibasicForm(tuple(mats))


def random_loose_form(rng, bundle):
    """A scalar or matrix form with independent random coefficients (rarely compatible)."""
    syms = base_symbols(bundle) + [bundle.jet(0, bundle.unit(0))]
    return SemibasicForm(
        tuple(
            sp.Matrix(bundle.q, bundle.q, lambda r, c: random_poly(rng, syms, degree=1, terms=2))
            for _ in range(bundle.p)
        )
    )


def rngs(count, label):
    return [random.Random(f"{label}:{k}") for k in range(count)]
