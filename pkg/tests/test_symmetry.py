import pytest
import sympy as sp

from helpers import XT, field, parser, problem, random_point_field, random_scalar_form, rngs
from mujet.expr import exact_zero, is_zero
from mujet.jet import SemibasicForm
from mujet.prolong import characteristic, prolong_mu, prolong_standard
from mujet.symmetry import (
    Classification,
    EquationSystem,
    apply,
    check_mu_symmetry,
    collect_monomials,
    determining_system,
    evaluate_family,
    extract_factor,
    mu_preservation_residual,
)

P = parser(XT, parameters=("lambda",), functions=("zeta", "A", "B"))
x, t, u = sp.symbols("x t u")
HEAT = EquationSystem([P("u_t - u_xx")], [(P("u_t"), P("u_xx"))])
# zeta solves the heat equation itself
HEAT_WITH_ZETA = EquationSystem(
    [P("u_t - u_xx")], [(P("u_t"), P("u_xx")), (P("zeta[0,1](x,t)"), P("zeta[2,0](x,t)"))]
)

CLASSICAL = {
    "dx": (["1", "0"], ["0"]),
    "dt": (["0", "1"], ["0"]),
    "u_du": (["0", "0"], ["u"]),
    "scaling": (["x", "2*t"], ["0"]),
    "galilei": (["2*t", "0"], ["-x*u"]),
    "zeta_du": (["0", "0"], ["zeta(x,t)"]),
}


# --- vector-field action ------------------------------------------------------------


def test_apply_examples():
    X = field(XT, ["x*u + t", "2*t"], ["u"])
    assert apply(prolong_standard(X, XT), x) == X.xi[0]
    Y = prolong_mu(field(XT, ["x", "2*t"], ["u"]), SemibasicForm.scalar([sp.Symbol("lambda"), 0]), XT)
    assert apply(Y, x**2 / t) == 0
    assert apply(prolong_standard(field(XT, ["1", "0"], ["0"]), XT), P("u_x")) == 0


# --- classical symmetries of the heat equation ------------------------------------------


@pytest.mark.parametrize("name", CLASSICAL)
def test_classical_heat_generators_are_symmetries(name):
    xi, phi = CLASSICAL[name]
    X = field(XT, xi, phi, functions=("zeta",))
    verdict = check_mu_symmetry(X, None, HEAT_WITH_ZETA, XT)
    assert verdict
    assert all(v for v in verdict.restricted_verdicts)


def test_translation_is_strong():
    verdict = check_mu_symmetry(field(XT, ["1", "0"], ["0"]), None, HEAT, XT)
    assert verdict.classification is Classification.STRONG
    assert verdict.raw == [0]


def test_scaling_factor_is_extracted():
    # Y(Delta) = -2 Delta for x d/dx + 2t d/dt
    verdict = check_mu_symmetry(field(XT, ["x", "2*t"], ["0"]), None, HEAT, XT)
    assert verdict.classification is Classification.SYMMETRY
    assert verdict.factors == [-2]


def test_quadratic_vertical_field_is_not_a_symmetry():
    verdict = check_mu_symmetry(field(XT, ["0", "0"], ["u^2"]), None, HEAT, XT)
    assert verdict.classification is Classification.NONE
    (residual,) = verdict.restricted
    assert exact_zero(residual + 2 * P("u_x^2"))
    assert not verdict.restricted_verdicts[0]


def test_inconsistent_solved_forms_are_rejected():
    bad = EquationSystem([P("u_t - u_xx")], [(P("u_t"), P("u_x"))])
    with pytest.raises(ValueError):
        check_mu_symmetry(field(XT, ["1", "0"], ["0"]), None, bad, XT)


def test_classical_generators_solve_determining_system():
    prob = problem("heat")
    eqs = determining_system(prob.system, prob.field, None, prob.bundle)
    assert eqs
    relations = [(P("zeta[0,1](x,t)"), P("zeta[2,0](x,t)"))]
    for name, (xi, phi) in CLASSICAL.items():
        X = field(XT, xi, phi, functions=("zeta",))
        family = {
            "xi": sp.Lambda((x, t, u), X.xi[0]),
            "tau": sp.Lambda((x, t, u), X.xi[1]),
            "phi": sp.Lambda((x, t, u), X.phi[0]),
        }
        for k, value in enumerate(evaluate_family(eqs, family, relations)):
            assert is_zero(value, index=k), name


def test_non_symmetry_violates_determining_system():
    prob = problem("heat")
    eqs = determining_system(prob.system, prob.field, None, prob.bundle)
    family = {
        "xi": sp.Lambda((x, t, u), 0),
        "tau": sp.Lambda((x, t, u), 0),
        "phi": sp.Lambda((x, t, u), u**2),
    }
    assert not all(is_zero(v) for v in evaluate_family(eqs, family))


# --- Euler equation --------------------------------------------------------------------


def test_euler_special_solution_is_a_mu_symmetry():
    prob = problem("euler")
    verdict = check_mu_symmetry(prob.field, prob.mu, prob.system, prob.bundle)
    assert verdict.classification is Classification.SYMMETRY
    assert verdict.restricted == [0]


def test_euler_special_solution_fails_as_a_plain_symmetry():
    prob = problem("euler")
    verdict = check_mu_symmetry(prob.field, None, prob.system, prob.bundle)
    assert verdict.classification is Classification.NONE


def test_euler_determining_system_splits_in_two():
    prob = problem("euler_ansatz")
    eqs = determining_system(prob.system, prob.field, prob.mu, prob.bundle)
    Q = parser(XT, functions=("xi", "tau", "phi", "alpha", "beta"))
    expected = [
        Q("(alpha(x,t,u)*u + beta(x,t,u))*phi(x,t,u) + phi[0,1,0](x,t,u) + u*phi[1,0,0](x,t,u)"),
        Q(
            "phi(x,t,u) + (alpha(x,t,u)*u^2 + beta(x,t,u)*u)*tau(x,t,u)"
            " - (alpha(x,t,u)*u + beta(x,t,u))*xi(x,t,u) + u*tau[0,1,0](x,t,u)"
            " - xi[0,1,0](x,t,u) + u^2*tau[1,0,0](x,t,u) - u*xi[1,0,0](x,t,u)"
        ),
    ]
    assert len(eqs) == 2
    for e, ref in zip(eqs, expected):
        assert exact_zero(e - ref) or exact_zero(e + ref)


def test_transport_determining_equation():
    prob = problem("transport_trivial")
    (eq,) = determining_system(prob.system, prob.field, None, prob.bundle)
    Q = parser(prob.bundle, functions=("phi",))
    assert exact_zero(eq - Q("phi[1,0](x,u)")) or exact_zero(eq + Q("phi[1,0](x,u)"))


# --- monomials and factors -----------------------------------------------------------------


def test_collect_monomials_orders_by_degree():
    ux, ut = sp.symbols("u_x u_t")
    terms = collect_monomials(3 * ux**2 + x * ut + 5 + t * ux, [ux, ut])
    assert terms == [((0, 0), 5), ((1, 0), t), ((0, 1), x), ((2, 0), 3)]
    assert collect_monomials(0, [ux]) == []


def test_extract_factor():
    eq = P("u_t - u_xx")
    assert extract_factor(P("-2*u_t + 2*u_xx"), eq, XT) == -2
    assert extract_factor(P("u*(u_t - u_xx)"), eq, XT) == u
    assert extract_factor(P("u_x^2"), eq, XT) is None
    assert extract_factor(P("exp(u_x)"), eq, XT) is None


# --- contact structure preservation ----------------------------------------------------------


def test_mu_prolongation_preserves_contact_structure():
    for rng in rngs(5, "preserve"):
        X, mu = random_point_field(rng, XT), random_scalar_form(rng, XT)
        table = mu_preservation_residual(prolong_mu(X, mu, XT), mu)
        assert all(exact_zero(v) for v in table.values())


def test_standard_prolongation_defect_is_lambda_times_characteristic():
    X = field(XT, ["x", "2*t"], ["u"])
    mu = SemibasicForm.scalar([sp.Symbol("lambda"), P("u_x")])
    table = mu_preservation_residual(prolong_standard(X, XT), mu)
    (Q,) = characteristic(X, XT)
    for i in range(2):
        assert exact_zero(table[(0, (0, 0), i)] - mu.lambdas[i] * Q)
    assert not is_zero(table[(0, (0, 0), 0)])
    # the standard prolongation preserves the undeformed structure
    assert all(v == 0 for v in mu_preservation_residual(prolong_standard(X, XT), None).values())


def test_preservation_detects_a_perturbed_coefficient():
    X, mu = field(XT, ["x", "2*t"], ["u"]), SemibasicForm.scalar([sp.Symbol("lambda"), 0])
    Y = prolong_mu(X, mu, XT)
    for key in Y.psi:
        if sum(key[1]) == 0:
            continue
        table = mu_preservation_residual(Y.replace(key, Y.psi[key] + 1), mu)
        assert any(not is_zero(v) for v in table.values()), key
