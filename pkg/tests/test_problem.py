import textwrap

import pytest
import sympy as sp

from helpers import PROBLEMS
from mujet.cli import MALFORMED, run
from mujet.problem import ProblemError, loads

MINIMAL = """\
mujet 1
# comment lines are ignored

[bundle]
independent = x, t
dependent = u
order = 2

[parameters]
lambda

[field]
x = x
t = 2*t
u = u

[mu]
kind = scalar
x = lambda

[equations]
x*t*u_tt + u_x
    - u/x
"""


def body(text):
    return textwrap.dedent(text).lstrip("\n")


def test_minimal_problem_loads():
    prob = loads(MINIMAL)
    x, t, u = sp.symbols("x t u")
    assert prob.bundle.independent == ("x", "t") and prob.bundle.order == 2
    assert prob.field.xi == (x, 2 * t) and prob.field.phi == (u,)
    assert prob.mu.lambdas == (sp.Symbol("lambda"), 0)
    # the indented line continues the equation
    assert prob.equations == [x * t * sp.Symbol("u_tt") + sp.Symbol("u_x") - u / x]


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.mujet")), ids=lambda p: p.stem)
def test_shipped_problems_load(path):
    prob = loads(path.read_text(encoding="utf-8"))
    assert prob.bundle is not None


BROKEN = {
    "no header": ("[bundle]\nindependent = x\ndependent = u\n", "header"),
    "wrong version": ("mujet 2\n[bundle]\nindependent = x\ndependent = u\n", "header"),
    "unknown section": ("mujet 1\n[bundle]\nindependent = x\ndependent = u\n[extras]\n", "unknown section"),
    "bundle twice": ("mujet 1\n[bundle]\nindependent = x\ndependent = u\n[bundle]\n", "twice"),
    "bundle not first": ("mujet 1\n[parameters]\na\n[bundle]\nindependent = x\ndependent = u\n", "[bundle]"),
    "missing dependent": ("mujet 1\n[bundle]\nindependent = x\n", "dependent"),
    "bad order": ("mujet 1\n[bundle]\nindependent = x\ndependent = u\norder = two\n", "order"),
    "undeclared name": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[field]\nx = a*x\n",
        "a",
    ),
    "use before declaration": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[field]\nx = a\n[parameters]\na\n",
        "a",
    ),
    "field key": ("mujet 1\n[bundle]\nindependent = x\ndependent = u\n[field]\ny = 1\n", "base coordinate"),
    "scalar form on a system": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u, v\n[mu]\nkind = scalar\nx = 1\n",
        "matrix",
    ),
    "form kind": ("mujet 1\n[bundle]\nindependent = x\ndependent = u\n[mu]\nkind = wavy\n", "kind"),
    "ragged matrix": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u, v\n[mu]\nkind = matrix\nx = [[1, 0], [0]]\n",
        "matrix",
    ),
    "solved target": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[solved]\nx = u\n",
        "jet variable",
    ),
    "duplicate invariant": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[invariants]\na = u\na = x\n",
        "duplicate",
    ),
    "inverse without change": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[inverse]\nx = y\n",
        "[change]",
    ),
    "zero-test key": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[zero_test]\nshots = 3\n",
        "shots",
    ),
    "zero-test digits": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[zero_test]\ndigits = 5\n",
        "digits",
    ),
    "stray text": ("mujet 1\nhello\n[bundle]\nindependent = x\ndependent = u\n", "before the first section"),
    "unbalanced parenthesis": (
        "mujet 1\n[bundle]\nindependent = x\ndependent = u\n[equations]\n(u_x + u\n",
        "",
    ),
}


@pytest.mark.parametrize("name", BROKEN)
def test_malformed_problem_is_rejected(name):
    text, fragment = BROKEN[name]
    with pytest.raises(ProblemError) as info:
        loads(text)
    assert fragment in str(info.value)


def test_errors_carry_line_numbers():
    with pytest.raises(ProblemError) as info:
        loads("mujet 1\n[bundle]\nindependent = x\ndependent = u\n[field]\nx = a*x\n")
    assert info.value.line == 6 and "line 6" in str(info.value)


@pytest.mark.parametrize("name", ["undeclared name", "ragged matrix", "zero-test digits"])
def test_malformed_problem_exits_2(tmp_path, name):
    path = tmp_path / "broken.mujet"
    path.write_text(BROKEN[name][0], encoding="utf-8")
    code, out, err = run(["prolong", str(path)])
    assert code == MALFORMED and out == "" and err.startswith("mujet: ")
