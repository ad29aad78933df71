"""``mujet`` command line: prolong | check | determining | reduce.

Exit codes: 0 all checks OK, 1 some check failed, 2 malformed input,
3 order overflow or singular coordinate change.
"""

from __future__ import annotations

import argparse
import difflib
import os
import sys

from .errors import (
    CyclicRulesError,
    DimensionError,
    EvaluationError,
    MujetError,
    OrderOverflowError,
    ParseError,
    SingularJacobianError,
    SingularRestrictionError,
)
from .expr import is_zero, to_text
from .jet import apply_field
from .muform import compat_on_solution, compat_residual, gauged_residual
from .problem import load
from .prolong import invariant_rules, prolong_mu, prolong_standard
from .reduction import (
    impose_invariance,
    reduced_equation,
    restrict_invariants,
    rewrite,
    transform_jet,
    verify_invariant,
    verify_section_solution,
)
from .symmetry import check_mu_symmetry, determining_system, evaluate_family, mu_preservation_residual

OK, FAIL, MALFORMED, OVERFLOW = 0, 1, 2, 3


class UsageError(MujetError):
    pass


class Report:
    """Collects output lines; ``lines`` format drops headers and summaries."""

    def __init__(self, fmt="human"):
        self.fmt = fmt
        self.out = []
        self.failures = 0
        self.checks = 0

    def header(self, text):
        if self.fmt == "human":
            self.out.append(f"# {text}")

    def line(self, text):
        self.out.append(text)

    def verdict(self, label, verdict, note="", expr=None):
        self.checks += 1
        suffix = f"  [{note}]" if note else ""
        self.out.append(f"{label}: {verdict.describe()}{suffix}")
        if not verdict:
            self.failures += 1
            if expr is not None:
                self.out.append(f"  residual: {to_text(expr)}")

    def finish(self):
        if self.fmt == "human" and self.checks:
            if self.failures:
                self.out.append(f"# {self.failures} of {self.checks} checks FAILED")
            else:
                self.out.append(f"# all {self.checks} checks OK")
        return "\n".join(self.out) + "\n"

    @property
    def code(self):
        return FAIL if self.failures else OK


def _need(problem, *attrs):
    for attr in attrs:
        value = getattr(problem, attr)
        if value is None or (hasattr(value, "__len__") and not len(value)):
            raise UsageError(f"problem file has no [{attr}] section")


def _mu_or_none(problem, standard=False):
    if standard or problem.mu is None:
        return None
    return problem.mu


def _prolongation(problem, bundle=None, standard=False):
    _need(problem, "field")
    b = bundle or problem.bundle
    mu = _mu_or_none(problem, standard)
    if mu is None:
        return prolong_standard(problem.field, b), "standard"
    return prolong_mu(problem.field, mu, b), "mu"


def _psi_label(bundle, a, J):
    head = "Psi" if bundle.q == 1 else f"Psi^{bundle.dependent[a]}"
    return f"{head}_{bundle.suffix(J)}"


def _pair_label(bundle, i, j):
    return f"{bundle.independent[i]},{bundle.independent[j]}"


# --- subcommands -------------------------------------------------------------------


def cmd_prolong(problem, args, cfg, report):
    b = problem.bundle
    if args.order is not None:
        if args.order > b.order:
            raise OrderOverflowError(f"requested order {args.order} exceeds the bundle order {b.order}")
        b = b.with_order(args.order)
    if args.mu and problem.mu is None:
        raise UsageError("--mu needs a [mu] section")
    Y, kind = _prolongation(problem, b, standard=args.standard)
    report.header(f"{kind} prolongation of order {b.order}")
    for (a, J), c in Y.entries():
        report.line(f"{_psi_label(b, a, J)} = {to_text(c)}")


def cmd_check(problem, args, cfg, report):
    handlers = {
        "compat": _check_compat,
        "symmetry": _check_symmetry,
        "invariants": _check_invariants,
        "preservation": _check_preservation,
        "solution": _check_solution,
    }
    handlers[args.what](problem, args, cfg, report)


def _check_compat(problem, args, cfg, report):
    _need(problem, "mu")
    b, mu = problem.bundle, problem.mu
    if args.on_solution:
        _need(problem, "solved")
        report.header("compatibility on the solution manifold")
        verdicts = compat_on_solution(mu, problem.system.rules(b), b, cfg)
        for (i, j, r, c), v in verdicts.items():
            label = _pair_label(b, i, j) + (f"[{r + 1},{c + 1}]" if not mu.is_scalar else "")
            report.verdict(label, v)
        return
    report.header("compatibility residual D_i Lambda_j - D_j Lambda_i + [Lambda_i, Lambda_j]")
    k = 0
    for (i, j), M in compat_residual(mu, b).items():
        for r in range(M.rows):
            for c in range(M.cols):
                label = _pair_label(b, i, j) + (f"[{r + 1},{c + 1}]" if not mu.is_scalar else "")
                report.verdict(label, is_zero(M[r, c], cfg, index=k), expr=M[r, c])
                k += 1
    if problem.gauged is not None:
        report.header("gauged coefficient residual")
        for (i, j, g), e in gauged_residual(problem.gauged, b).items():
            report.verdict(f"{_pair_label(b, i, j)}<{g + 1}>", is_zero(e, cfg, index=k), expr=e)
            k += 1


def _check_symmetry(problem, args, cfg, report):
    _need(problem, "field", "equations")
    b = problem.bundle
    system = problem.system
    system.check_solved(b, cfg)
    mu = _mu_or_none(problem, args.standard)
    verdict = check_mu_symmetry(problem.field, mu, system, b, cfg)
    report.header(("standard" if mu is None else "mu") + "-symmetry check")
    for n, (raw, v) in enumerate(zip(verdict.raw, verdict.raw_verdicts), 1):
        text = v.describe() if v else f"nonzero residual={to_text(raw)}"
        report.line(f"raw {n}: {text}")
        if verdict.factors[n - 1] is not None and not v:
            report.line(f"raw {n} factor: {to_text(verdict.factors[n - 1])}")
    for n, v in enumerate(verdict.restricted_verdicts, 1):
        report.verdict(f"restricted {n}", v)
    report.line(f"classification: {verdict.classification.value}")


def _check_invariants(problem, args, cfg, report):
    _need(problem, "field", "invariants")
    Y, kind = _prolongation(problem, standard=args.standard)
    report.header(f"invariants under the {kind} prolongation")
    for k, (name, inv) in enumerate(problem.invariants.items()):
        note = problem.suspected.get(name, "")
        v = verify_invariant(Y, inv, cfg, index=k)
        note = f"suspected typo: {note}" if note and not v else ""
        report.verdict(name, v, note, expr=apply_field(Y, inv))


def _check_preservation(problem, args, cfg, report):
    Y, kind = _prolongation(problem, standard=args.standard)
    mu = _mu_or_none(problem, args.standard)
    b = problem.bundle
    report.header(f"contact-module twist of the {kind} prolongation")
    for k, ((a, J, i), e) in enumerate(mu_preservation_residual(Y, mu).items()):
        report.verdict(f"{b.jet_name(a, J)} d{b.independent[i]}", is_zero(e, cfg, index=k), expr=e)


def _check_solution(problem, args, cfg, report):
    _need(problem, "solutions", "equations")
    report.header("candidate solution")
    verdicts = verify_section_solution(problem.equations, problem.solutions, problem.bundle, cfg)
    for n, v in enumerate(verdicts, 1):
        report.verdict(f"equation {n}", v)


def cmd_determining(problem, args, cfg, report):
    _need(problem, "field", "equations")
    b = problem.bundle
    mu = _mu_or_none(problem, args.standard)
    eqs = determining_system(problem.system, problem.field, mu, b)
    report.header(f"{len(eqs)} determining equations")
    for e in eqs:
        report.line(f"{to_text(e, compact=True)} = 0")
    if problem.family:
        report.header("solution family")
        values = evaluate_family(eqs, problem.family, problem.relations)
        for n, value in enumerate(values, 1):
            report.verdict(f"family on equation {n}", is_zero(value, cfg, index=n), expr=value)


def cmd_reduce(problem, args, cfg, report):
    b = problem.bundle
    if problem.change is None and not problem.leading:
        raise UsageError("reduce needs a [change] or a [leading] section")
    change = problem.change
    if change is not None:
        report.header("adapted coordinates")
        for name, r in change.roundtrip_residuals().items():
            report.verdict(f"round trip {name}", is_zero(r, cfg))
        report.header("transformed jet variables")
        for sym, e in transform_jet(change, min(b.order, 2), cfg).items():
            report.line(f"{sym} = {to_text(e)}")
    restricted = {}
    if problem.leading:
        _need(problem, "field")
        rules = invariant_rules(problem.field, b, problem.leading, cfg)
        report.header("invariant manifold")
        for target, rhs in rules:
            report.line(f"{target} -> {to_text(rhs)}")
        if problem.invariants:
            report.header("restricted invariants")
            supplied = {k: v for k, v in problem.restricted.items() if v[1]}
            for k, item in enumerate(restrict_invariants(problem.invariants, rules, supplied, cfg)):
                restricted[item.name] = item.value
                text = f"{item.name} = {to_text(item.value)}"
                if item.singular:
                    report.line(f"{text}  [supplied: {item.note}]")
                elif item.name in problem.restricted:
                    expected = problem.restricted[item.name][0]
                    diff = item.value - expected
                    v = is_zero(diff, cfg, index=k)
                    report.verdict(text, v, "" if v else f"expected {to_text(expected)}", diff)
                else:
                    report.line(text)
    if problem.reduce:
        report.header("reduced equations")
        symbols = b.independent + b.dependent + problem.parameters
        for n, F in enumerate(problem.reduce, 1):
            H = reduced_equation(F, restricted, symbols)
            report.line(f"H{n}: {to_text(H)} = 0")
            if change is not None:
                report.line(f"H{n} adapted: {to_text(impose_invariance(rewrite(H, change), change))} = 0")
    if change is not None and problem.equations:
        report.header("equations in adapted coordinates")
        for n, eq in enumerate(problem.equations, 1):
            adapted = rewrite(eq, change)
            report.line(f"equation {n}: {to_text(adapted)} = 0")
            report.line(f"equation {n} invariant: {to_text(impose_invariance(adapted, change))} = 0")
    if problem.solutions and problem.equations:
        report.header("invariant solutions")
        verdicts = verify_section_solution(problem.equations, problem.solutions, b, cfg)
        for n, v in enumerate(verdicts, 1):
            report.verdict(f"solution in equation {n}", v)


# --- driver ------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="zero-test seed (default: $MUJET_SEED or 0)")
    common.add_argument("--trials", type=int, default=None, help="numeric zero-test trials")
    common.add_argument("--tolerance", type=float, default=None, help="relative zero-test tolerance")
    common.add_argument("--format", choices=("human", "lines"), default="human")
    common.add_argument("--standard", action="store_true", help="ignore [mu] and use the standard prolongation")
    common.add_argument("--golden", metavar="PATH", help="compare the report with a golden file")
    common.add_argument("--update-golden", action="store_true", help="rewrite the golden file")

    parser = argparse.ArgumentParser(prog="mujet", description="mu-prolongations and mu-symmetries")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("prolong", parents=[common], help="print the prolongation coefficients")
    p.add_argument("file", help="problem file (.mujet)")
    p.add_argument("--mu", action="store_true", help="require the [mu] form")
    p.add_argument("--order", type=int, default=None, help="prolongation order (at most the bundle's)")
    c = sub.add_parser("check", parents=[common], help="run a verification")
    c.add_argument("what", choices=("compat", "symmetry", "invariants", "preservation", "solution"))
    c.add_argument("file", help="problem file (.mujet)")
    c.add_argument("--on-solution", action="store_true", help="compat: restrict to the solution manifold")
    for name, text in (("determining", "generate determining equations"), ("reduce", "symmetry reduction report")):
        sub.add_parser(name, parents=[common], help=text).add_argument("file", help="problem file (.mujet)")
    return parser


COMMANDS = {"prolong": cmd_prolong, "check": cmd_check, "determining": cmd_determining, "reduce": cmd_reduce}


def _seed(args, problem):
    if args.seed is not None:
        return args.seed
    if "seed" in problem.config:
        return None
    env = os.environ.get("MUJET_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"MUJET_SEED must be an integer, got {env!r}") from None


def run(argv):
    """Run the CLI; returns ``(exit code, stdout text, stderr text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (MALFORMED if exc.code else OK), "", ""
    try:
        problem = load(args.file)
        cfg = problem.zero_config(seed=_seed(args, problem), trials=args.trials, tolerance=args.tolerance)
        report = Report(args.format)
        COMMANDS[args.command](problem, args, cfg, report)
    except (OrderOverflowError, SingularJacobianError) as exc:
        return OVERFLOW, "", f"mujet: {exc}\n"
    except EvaluationError as exc:
        return FAIL, "", f"mujet: {exc}\n"
    except (
        OSError,
        ParseError,
        UsageError,
        DimensionError,
        CyclicRulesError,
        SingularRestrictionError,
        ValueError,
        KeyError,
    ) as exc:
        return MALFORMED, "", f"mujet: {exc}\n"
    text = report.finish()
    code = report.code
    if args.golden:
        if args.update_golden:
            with open(args.golden, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            try:
                with open(args.golden, encoding="utf-8") as fh:
                    expected = fh.read()
            except OSError as exc:
                return MALFORMED, text, f"mujet: {exc}\n"
            if expected != text:
                diff = "".join(
                    difflib.unified_diff(
                        expected.splitlines(True), text.splitlines(True), args.golden, "report"
                    )
                )
                return FAIL, text, f"mujet: report differs from golden file\n{diff}"
    return code, text, ""


def main(argv=None):
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
