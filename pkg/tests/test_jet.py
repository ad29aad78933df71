import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import XT, XY, base_symbols, field, parser, random_point_field, random_poly, rngs
from mujet.errors import DimensionError, OrderOverflowError
from mujet.expr import exact_zero
from mujet.jet import (
    ContactForm,
    JetBundle,
    JetVectorField,
    SemibasicForm,
    apply_field,
    commutator_contract,
    contact_decompose,
    contact_forms,
    contract,
    plus,
)
from mujet.prolong import prolong_standard

P = parser(XT, functions=("P",))
x, t, u = sp.symbols("x t u")


# --- bundle bookkeeping ------------------------------------------------------------


def test_multi_indices_in_canonical_order():
    assert XT.multi_indices(2) == [(2, 0), (1, 1), (0, 2)]
    assert [XT.jet_name(0, J) for J in XT.multi_indices_upto(2)] == [
        "u", "u_x", "u_t", "u_xx", "u_xt", "u_tt",
    ]


def test_jet_info_round_trip():
    for J in XY.multi_indices_upto(2):
        for a in range(XY.q):
            assert XY.jet_info(XY.jet(a, J)) == (a, J)
    assert XY.jet_info(sp.Symbol("w_x")) is None
    assert XY.jet_info(sp.Symbol("x")) is None


@pytest.mark.parametrize(
    "args",
    [
        ((), ("u",)),
        (("x",), ()),
        (("x", "x"), ("u",)),
        (("x", "u"), ("u",)),
        (("x", "xy"), ("u",)),
    ],
)
def test_bundle_validation(args):
    with pytest.raises(ValueError):
        JetBundle(*args)


def test_expression_order():
    assert XT.expression_order(P("x*u_t + u_xt^2")) == 2
    assert XT.expression_order(P("x + t")) == -1


# --- total derivatives -------------------------------------------------------------


def test_total_derivative_examples():
    assert XT.total_derivative(u, 0) == sp.Symbol("u_x")
    assert exact_zero(XT.total_derivative(P("u*u_x"), 1) - P("u_t*u_x + u*u_xt"))
    Dx = XT.total_derivative(P("P(x,t,u)"), 0)
    assert exact_zero(Dx - P("P[1,0,0](x,t,u) + u_x*P[0,0,1](x,t,u)"))


def test_total_derivative_overflow_names_variable():
    with pytest.raises(OrderOverflowError) as info:
        XT.total_derivative(P("u_xt"), 0)
    assert info.value.variable == sp.Symbol("u_xt")
    assert XT.unbounded().total_derivative(P("u_xt"), 0) == sp.Symbol("u_xxt")


def _random_expression(rng, bundle, max_order):
    syms = base_symbols(bundle) + [
        bundle.jet(a, J)
        for J in bundle.multi_indices_upto(max_order)
        if sum(J)
        for a in range(bundle.q)
    ]
    e = random_poly(rng, syms, degree=3, terms=4)
    # a non-polynomial factor in a base variable keeps the chain rule honest
    return e * sp.exp(rng.choice(base_symbols(bundle)[: bundle.p])) + sp.log(syms[0]) * syms[-1]


@pytest.mark.parametrize("bundle", [XT.with_order(3), XY.with_order(3)], ids=["xt", "xy"])
def test_total_derivatives_commute(bundle):
    for rng in rngs(10, f"commute-{bundle.q}"):
        e = _random_expression(rng, bundle, 1)
        DxDt = bundle.total_derivative(bundle.total_derivative(e, 1), 0)
        DtDx = bundle.total_derivative(bundle.total_derivative(e, 0), 1)
        assert exact_zero(DxDt - DtDx)


# --- contact decomposition ---------------------------------------------------------


def test_contact_decompose_examples():
    h, rem = contact_decompose(x, XT)
    assert h == [1, 0] and rem == {}
    h, rem = contact_decompose(u, XT)
    assert h == [sp.Symbol("u_x"), sp.Symbol("u_t")] and rem == {(0, (0, 0)): 1}
    h, _ = contact_decompose(P("u*u_x"), XT)
    assert exact_zero(h[0] - P("u_x^2 + u*u_xx"))


def test_contact_decompose_matches_total_derivative():
    for k, rng in enumerate(rngs(100, "decompose")):
        bundle = XT if k % 2 else XY
        e = _random_expression(rng, bundle, 1)
        h, rem = contact_decompose(e, bundle)
        for i in range(bundle.p):
            assert exact_zero(h[i] - bundle.total_derivative(e, i))
        for (a, J), c in rem.items():
            assert exact_zero(c - sp.diff(e, bundle.jet(a, J)))


def test_contact_decompose_overflow():
    with pytest.raises(OrderOverflowError):
        contact_decompose(P("u_xx"), XT)


# --- contractions -----------------------------------------------------------------


def _table(bundle, fn):
    return {(a, J): fn(a, J) for J in bundle.multi_indices_upto(bundle.order) for a in range(bundle.q)}


def test_contract_examples():
    Q = P("u*x + t")
    psi = _table(XT, lambda a, J: 0)
    psi[(0, (0, 0))] = Q
    evolutionary = JetVectorField(XT, (0, 0), psi)
    assert contract(evolutionary, ContactForm(0, (0, 0))) == Q

    Y = prolong_standard(field(XT, ["x", "2*t"], ["u"]), XT)
    assert exact_zero(contract(Y, ContactForm(0, (0, 0))) - P("u - x*u_x - 2*t*u_t"))

    xi = (P("x*u"), P("t"))
    # Psi_J = u_{J,m} xi^m makes every contraction vanish
    psi = _table(XT, lambda a, J: sum(XT.jet(a, plus(J, i)) * xi[i] for i in range(2)))
    Y = JetVectorField(XT, xi, psi)
    for theta in contact_forms(XT):
        assert contract(Y, theta) == 0


def test_contract_rejects_top_order_forms():
    Y = prolong_standard(field(XT, ["1", "0"], ["0"]), XT)
    with pytest.raises(OrderOverflowError):
        contract(Y, ContactForm(0, (2, 0)))
    with pytest.raises(DimensionError):
        contract(Y, ContactForm(1, (0, 0)))


def test_commutator_contract_examples():
    Y = prolong_standard(field(XT, ["x", "2*t"], ["u"]), XT)
    theta = ContactForm(0, (0, 0))
    for i in range(2):
        assert commutator_contract(Y, i, theta) == 0
    bumped = Y.replace((0, (1, 0)), Y.coefficient(0, (1, 0)) + 1)
    assert commutator_contract(bumped, 0, theta) == -1
    assert commutator_contract(bumped, 1, theta) == 0


def _random_jet_field(rng, bundle):
    firsts = [bundle.jet(a, bundle.unit(i)) for i in range(bundle.p) for a in range(bundle.q)]
    syms = base_symbols(bundle) + firsts
    xi = tuple(random_poly(rng, syms[: bundle.p + bundle.q]) for _ in range(bundle.p))
    psi = _table(bundle, lambda a, J: random_poly(rng, syms))
    return JetVectorField(bundle, xi, psi)


def _combine(Y1, Y2, c):
    return JetVectorField(
        Y1.bundle,
        tuple(a + c * b for a, b in zip(Y1.xi, Y2.xi)),
        {k: Y1.psi[k] + c * Y2.psi[k] for k in Y1.psi},
    )


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(-5, 5))
def test_contractions_are_linear_in_the_field(seed, c):
    rng = random.Random(seed)
    Y1, Y2 = _random_jet_field(rng, XT), _random_jet_field(rng, XT)
    Y = _combine(Y1, Y2, c)
    for theta in contact_forms(XT):
        assert exact_zero(contract(Y, theta) - contract(Y1, theta) - c * contract(Y2, theta))
        for i in range(XT.p):
            lhs = commutator_contract(Y, i, theta)
            rhs = commutator_contract(Y1, i, theta) + c * commutator_contract(Y2, i, theta)
            assert exact_zero(lhs - rhs)


# --- jet vector fields and forms -----------------------------------------------------


def test_field_table_must_be_complete():
    with pytest.raises(DimensionError):
        JetVectorField(XT, (0, 0), {(0, (0, 0)): u})


def test_apply_field_examples():
    X = field(XT, ["x*u + t", "2*t"], ["u"])
    Y = prolong_standard(X, XT)
    assert apply_field(Y, x) == X.xi[0]
    Ydx = prolong_standard(field(XT, ["1", "0"], ["0"]), XT)
    assert apply_field(Ydx, sp.Symbol("u_x")) == 0
    with pytest.raises(OrderOverflowError):
        apply_field(Y, sp.Symbol("u_xxx"))


def test_semibasic_form_validation():
    with pytest.raises(DimensionError):
        SemibasicForm((sp.Matrix([[1, 2]]),))
    mu = SemibasicForm.scalar([P("u_xx"), 0])
    with pytest.raises(OrderOverflowError):
        mu.check(XT)
    with pytest.raises(DimensionError):
        SemibasicForm.scalar([1]).check(XT)
    assert SemibasicForm.scalar([x, t]).lambdas == (x, t)
    with pytest.raises(DimensionError):
        SemibasicForm.zero(XY).lambdas


def test_random_point_field_prolongs_within_table():
    for rng in rngs(3, "within"):
        Y = prolong_standard(random_point_field(rng, XT), XT)
        assert all(XT.expression_order(c) <= 2 for c in Y.psi.values())
