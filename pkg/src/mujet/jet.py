"""Jet bundles, total derivatives, contact forms and jet vector fields."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import sympy as sp

from .errors import DimensionError, JetSuffixError, OrderOverflowError
from .expr.core import canonical, from_laurent_terms, laurent_chain_derivative, laurent_terms

MultiIndex = tuple


def modulus(J):
    return sum(J)


def plus(J, i):
    """``J + e_i``."""
    return tuple(j + (1 if m == i else 0) for m, j in enumerate(J))


def minus(J, i):
    if J[i] == 0:
        raise ValueError(f"cannot lower index {i} of {J}")
    return tuple(j - (1 if m == i else 0) for m, j in enumerate(J))


@dataclass(frozen=True)
class JetBundle:
    """Trivial bundle of ``dependent`` over ``independent``, truncated at ``order``.

    ``order=None`` means no truncation; it is used internally where the
    identities are formal (closure of substitution rules).
    """

    independent: tuple
    dependent: tuple
    order: int | None = 2

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        names = self.independent + self.dependent
        if not self.independent or not self.dependent:
            raise ValueError("need at least one independent and one dependent variable")
        if len(set(names)) != len(names):
            raise ValueError(f"bundle names must be distinct: {names}")
        for n in names:
            if not n.isalnum() or not n[0].isalpha():
                raise ValueError(f"bad variable name {n!r}")
        for a, b in itertools.permutations(self.independent, 2):
            if b.startswith(a):
                raise ValueError(f"independent names {a!r} and {b!r} make jet suffixes ambiguous")
        if self.order is not None and self.order < 1:
            raise ValueError("truncation order must be at least 1")

    @property
    def p(self):
        return len(self.independent)

    @property
    def q(self):
        return len(self.dependent)

    @property
    def x(self):
        return tuple(sp.Symbol(n) for n in self.independent)

    def with_order(self, order):
        return JetBundle(self.independent, self.dependent, order)

    def unbounded(self):
        return self.with_order(None)

    # --- multi-indices and jet symbols -------------------------------------

    def zero(self):
        return (0,) * self.p

    def unit(self, i):
        return plus(self.zero(), i)

    def multi_indices(self, n):
        """All ``J`` with ``|J| = n``: ``xx, xt, tt`` for ``(x, t)``."""
        out = []
        for combo in itertools.combinations_with_replacement(range(self.p), n):
            J = [0] * self.p
            for i in combo:
                J[i] += 1
            out.append(tuple(J))
        return out

    def multi_indices_upto(self, n):
        return [J for m in range(n + 1) for J in self.multi_indices(m)]

    def suffix(self, J):
        return "".join(name * j for name, j in zip(self.independent, J))

    def jet_name(self, a, J):
        dep = self.dependent[a]
        return dep if modulus(J) == 0 else f"{dep}_{self.suffix(J)}"

    def jet(self, a, J):
        return sp.Symbol(self.jet_name(a, J))

    def u(self, a=0):
        return sp.Symbol(self.dependent[a])

    def jet_from_suffix(self, dep, suffix):
        if dep not in self.dependent:
            raise JetSuffixError(f"{dep!r} is not a dependent variable")
        J = _parse_suffix(self.independent, suffix)
        if J is None:
            raise JetSuffixError(f"malformed jet suffix {suffix!r} for {dep!r}")
        return self.jet(self.dependent.index(dep), J)

    def jet_info(self, sym):
        """``(a, J)`` for a jet symbol of this bundle, else ``None``."""
        return _jet_info(self.independent, self.dependent, sym.name)

    def jet_symbols(self, e):
        return {s: self.jet_info(s) for s in e.free_symbols if self.jet_info(s) is not None}

    def expression_order(self, e):
        """Highest derivative order among jet variables of ``e`` (-1 if none)."""
        orders = [modulus(J) for _, J in self.jet_symbols(e).values()]
        return max(orders, default=-1)

    # --- total derivatives -------------------------------------------------

    def total_derivative(self, e, i, truncate=True):
        """``D_i e = de/dx^i + sum u^a_{J+e_i} de/du^a_J``.

        With truncation on, every jet variable of ``e`` must have order at
        most ``k - 1``.
        """
        e = sp.sympify(e)
        jets = self.jet_symbols(e)
        if truncate and self.order is not None:
            for s, (a, J) in jets.items():
                if modulus(J) > self.order - 1:
                    raise OrderOverflowError(
                        f"D_{self.independent[i]} of {s} leaves J^({self.order})", variable=s
                    )
        terms = laurent_terms(e)
        if terms is not None:
            shifts = {s: self.jet(a, plus(J, i)) for s, (a, J) in jets.items()}
            return from_laurent_terms(laurent_chain_derivative(terms, self.x[i], shifts))
        terms = [sp.diff(e, self.x[i])]
        terms += [self.jet(a, plus(J, i)) * sp.diff(e, s) for s, (a, J) in jets.items()]
        return canonical(sp.Add(*terms))

    def total_derivative_multi(self, e, J, truncate=True):
        """``D_J e`` applied index by index."""
        for i, j in enumerate(J):
            for _ in range(j):
                e = self.total_derivative(e, i, truncate=truncate)
        return e


@lru_cache(maxsize=None)
def _parse_suffix(independent, suffix):
    counts = [0] * len(independent)
    pos = 0
    while pos < len(suffix):
        for i, name in enumerate(independent):
            if suffix.startswith(name, pos):
                counts[i] += 1
                pos += len(name)
                break
        else:
            return None
    if pos == 0:
        return None
    return tuple(counts)


@lru_cache(maxsize=None)
def _jet_info(independent, dependent, name):
    if "_" not in name:
        if name in dependent:
            return dependent.index(name), (0,) * len(independent)
        return None
    dep, suffix = name.split("_", 1)
    if dep not in dependent:
        return None
    J = _parse_suffix(independent, suffix)
    if J is None:
        return None
    return dependent.index(dep), J


# --- contact structure -----------------------------------------------------


@dataclass(frozen=True)
class ContactForm:
    """``theta^a_J = du^a_J - u^a_{J+e_m} dx^m`` stored structurally."""

    a: int
    J: tuple

    def check(self, bundle):
        if self.a >= bundle.q or len(self.J) != bundle.p:
            raise DimensionError(f"contact form {self} does not fit {bundle}")
        if bundle.order is not None and modulus(self.J) > bundle.order - 1:
            raise OrderOverflowError(f"contact form of order {modulus(self.J)} in J^({bundle.order})")


def contact_forms(bundle):
    """Every contact form of ``J^(k)``, in canonical order."""
    return [
        ContactForm(a, J)
        for J in bundle.multi_indices_upto(bundle.order - 1)
        for a in range(bundle.q)
    ]


@dataclass
class OneForm:
    """A one-form ``sum h_i dx^i + sum c^a_J du^a_J`` on jet space."""

    dx: dict = field(default_factory=dict)
    du: dict = field(default_factory=dict)

    def __add__(self, other):
        out = OneForm(dict(self.dx), dict(self.du))
        for k, v in other.dx.items():
            out.dx[k] = out.dx.get(k, 0) + v
        for k, v in other.du.items():
            out.du[k] = out.du.get(k, 0) + v
        return out

    def scaled(self, c):
        return OneForm(
            {k: c * v for k, v in self.dx.items()}, {k: c * v for k, v in self.du.items()}
        )


def differential(f, bundle):
    """``df`` in the coordinate coframe ``dx^i, du^a_J``."""
    f = sp.sympify(f)
    dx = {i: sp.diff(f, x) for i, x in enumerate(bundle.x)}
    du = {info: sp.diff(f, s) for s, info in bundle.jet_symbols(f).items()}
    return OneForm(dx, du)


def horizontal_components(form, bundle):
    """dx-components after rewriting ``du^a_J = theta^a_J + u^a_{J+e_i} dx^i``.

    A one-form lies in the contact module exactly when all of them vanish.
    """
    out = []
    for i in range(bundle.p):
        terms = [c * bundle.jet(a, plus(J, i)) for (a, J), c in form.du.items()]
        out.append(canonical(sp.Add(form.dx.get(i, 0), *terms)))
    return out


def contact_decompose(f, bundle):
    """Split ``df`` into horizontal part ``D_i f`` and contact coefficients.

    Returns ``(h, remainder)`` with ``df = h_i dx^i + sum remainder[a, J] theta^a_J``.
    """
    f = sp.sympify(f)
    for s, (a, J) in bundle.jet_symbols(f).items():
        if bundle.order is not None and modulus(J) > bundle.order - 1:
            raise OrderOverflowError(f"{s} leaves J^({bundle.order})", variable=s)
    form = differential(f, bundle)
    h = horizontal_components(form, bundle)
    remainder = {k: canonical(v) for k, v in form.du.items() if canonical(v) != 0}
    return h, remainder


# --- vector fields on jet space ---------------------------------------------


@dataclass
class JetVectorField:
    """``xi^i d/dx^i + sum_{a, |J| <= k} Psi^a_J d/du^a_J``."""

    bundle: JetBundle
    xi: tuple
    psi: dict

    def __post_init__(self):
        self.xi = tuple(canonical(c) for c in self.xi)
        if len(self.xi) != self.bundle.p:
            raise DimensionError("need one xi per independent variable")
        missing = [
            (a, J)
            for J in self.bundle.multi_indices_upto(self.bundle.order)
            for a in range(self.bundle.q)
            if (a, J) not in self.psi
        ]
        if missing:
            raise DimensionError(f"coefficient table incomplete, missing {missing[:3]}")

    def coefficient(self, a, J):
        try:
            return self.psi[(a, tuple(J))]
        except KeyError:
            raise OrderOverflowError(f"no coefficient Psi^{a}_{J} in J^({self.bundle.order})")

    @property
    def phi(self):
        return tuple(self.psi[(a, self.bundle.zero())] for a in range(self.bundle.q))

    def entries(self):
        """``((a, J), Psi)`` pairs in canonical order, ``|J| >= 1``."""
        b = self.bundle
        return [
            ((a, J), self.psi[(a, J)])
            for n in range(1, b.order + 1)
            for a in range(b.q)
            for J in b.multi_indices(n)
        ]

    def replace(self, key, value):
        psi = dict(self.psi)
        psi[key] = canonical(value)
        return JetVectorField(self.bundle, self.xi, psi)

    def map(self, fn):
        return JetVectorField(
            self.bundle, tuple(fn(c) for c in self.xi), {k: fn(v) for k, v in self.psi.items()}
        )

    def __call__(self, f):
        return apply_field(self, f)


def apply_field(Y, f):
    """Directional derivative ``Y(f)``."""
    b = Y.bundle
    f = sp.sympify(f)
    terms = [Y.xi[i] * sp.diff(f, x) for i, x in enumerate(b.x) if Y.xi[i] != 0]
    for s, (a, J) in b.jet_symbols(f).items():
        if modulus(J) > b.order:
            raise OrderOverflowError(f"{s} is beyond the field's order {b.order}", variable=s)
        terms.append(Y.psi[(a, J)] * sp.diff(f, s))
    return canonical(sp.Add(*terms))


def contract(Y, theta):
    """``Y _| theta^a_J = Psi^a_J - u^a_{J+e_m} xi^m``."""
    b = Y.bundle
    theta.check(b)
    out = Y.coefficient(theta.a, theta.J)
    for m in range(b.p):
        out -= b.jet(theta.a, plus(theta.J, m)) * Y.xi[m]
    return canonical(out)


def commutator_contract(Y, i, theta):
    """``[D_i, Y] _| theta^a_J = -Psi^a_{J+e_i} + D_i Psi^a_J - u^a_{J+e_m} D_i xi^m``."""
    b = Y.bundle
    theta.check(b)
    a, J = theta.a, theta.J
    out = -Y.coefficient(a, plus(J, i)) + b.total_derivative(Y.coefficient(a, J), i)
    for m in range(b.p):
        out -= b.jet(a, plus(J, m)) * b.total_derivative(Y.xi[m], i)
    return canonical(out)


# --- semibasic forms ----------------------------------------------------------


@dataclass(frozen=True)
class SemibasicForm:
    """``mu = Lambda_i dx^i`` with one ``q x q`` matrix per independent variable.

    A scalar form ``lambda_i dx^i`` is the ``q = 1`` case.  ``source_order`` is
    the jet order the coefficients may depend on (1 unless generalized).
    """

    matrices: tuple
    source_order: int = 1

    def __post_init__(self):
        mats = tuple(sp.ImmutableMatrix(m) for m in self.matrices)
        if not mats:
            raise DimensionError("a semibasic form needs at least one component")
        q = mats[0].shape[0]
        for m in mats:
            if m.shape != (q, q):
                raise DimensionError(f"coefficient matrices must be square {q}x{q}, got {m.shape}")
        object.__setattr__(self, "matrices", tuple(m.applyfunc(canonical) for m in mats))

    @classmethod
    def scalar(cls, lambdas, source_order=1):
        return cls(tuple(sp.Matrix([[lam]]) for lam in lambdas), source_order)

    @classmethod
    def zero(cls, bundle):
        return cls(tuple(sp.zeros(bundle.q, bundle.q) for _ in range(bundle.p)))

    @property
    def p(self):
        return len(self.matrices)

    @property
    def q(self):
        return self.matrices[0].shape[0]

    @property
    def is_scalar(self):
        return self.q == 1

    @property
    def lambdas(self):
        if not self.is_scalar:
            raise DimensionError("matrix-valued form has no scalar components")
        return tuple(m[0, 0] for m in self.matrices)

    def check(self, bundle):
        if self.p != bundle.p:
            raise DimensionError(f"form has {self.p} components, bundle has p = {bundle.p}")
        if self.q != bundle.q:
            raise DimensionError(f"form acts on q = {self.q}, bundle has q = {bundle.q}")
        for m in self.matrices:
            for c in m:
                order = bundle.expression_order(c)
                if order > self.source_order:
                    raise OrderOverflowError(
                        f"coefficient {c} has order {order} > declared source order {self.source_order}"
                    )
