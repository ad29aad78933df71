"""Reader for ``.mujet`` problem files.

A problem file starts with the header line ``mujet 1`` followed by
``[section]`` blocks.  Lines starting with ``#`` are comments and a line
that begins with whitespace continues the previous one.  Sections are
read in file order, so every name must be declared before it is used::

    mujet 1

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

Recognised sections: bundle, parameters, functions, field, mu, equations,
solved, relations, family, invariants, suspected, leading, restricted,
change, inverse, reduce, solutions, zero_test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from dataclasses import field as dc_field

import sympy as sp

from .errors import ParseError
from .expr import SymbolTable, ZeroTestConfig, parse
from .expr.core import function_atoms
from .jet import JetBundle, SemibasicForm
from .muform import GaugedAlgebraSpec, exact_from_potential
from .prolong import PointVectorField
from .reduction import CoordinateChange
from .symmetry import EquationSystem

HEADER = "mujet 1"

SECTIONS = (
    "bundle",
    "parameters",
    "functions",
    "field",
    "mu",
    "equations",
    "solved",
    "relations",
    "family",
    "invariants",
    "suspected",
    "leading",
    "restricted",
    "change",
    "inverse",
    "reduce",
    "solutions",
    "zero_test",
)

_SECTION = re.compile(r"^\[([a-z_]+)\]\s*$")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
_CALL = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\s*\(([^()]*)\)$")


class ProblemError(ParseError):
    """Malformed or inconsistent problem file."""

    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(where + message)


@dataclass
class Line:
    number: int
    text: str

    def split(self, sep="="):
        if sep not in self.text:
            raise ProblemError(f"expected 'key {sep} value', got {self.text!r}", self.number)
        key, value = self.text.split(sep, 1)
        return key.strip(), value.strip()


@dataclass
class Problem:
    bundle: JetBundle
    context: SymbolTable
    parameters: tuple = ()
    functions: tuple = ()
    field: PointVectorField | None = None
    mu: SemibasicForm | None = None
    mu_kind: str = "none"
    gauged: GaugedAlgebraSpec | None = None
    equations: list = dc_field(default_factory=list)
    solved: list = dc_field(default_factory=list)
    relations: list = dc_field(default_factory=list)
    family: dict = dc_field(default_factory=dict)
    invariants: dict = dc_field(default_factory=dict)
    suspected: dict = dc_field(default_factory=dict)
    leading: dict = dc_field(default_factory=dict)
    restricted: dict = dc_field(default_factory=dict)
    change: CoordinateChange | None = None
    reduce: list = dc_field(default_factory=list)
    solutions: dict = dc_field(default_factory=dict)
    config: dict = dc_field(default_factory=dict)

    @property
    def system(self):
        return EquationSystem(list(self.equations), list(self.solved))

    def zero_config(self, **overrides):
        opts = dict(self.config)
        opts.update({k: v for k, v in overrides.items() if v is not None})
        return ZeroTestConfig(**opts)


def is_function_atom(e):
    return e in function_atoms(e)


def _names(text, line):
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if not _NAME.match(n):
            raise ProblemError(f"invalid name {n!r}", line.number)
    return tuple(names)


def _split_top(text, sep=","):
    """Split on ``sep`` outside brackets and parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _matrix(text, ctx, line):
    text = text.strip()
    if not (text.startswith("[[") and text.endswith("]]")):
        raise ProblemError(f"matrix must be written [[a, b], [c, d]], got {text!r}", line.number)
    rows = []
    for row in _split_top(text[1:-1]):
        if not (row.startswith("[") and row.endswith("]")):
            raise ProblemError(f"bad matrix row {row!r}", line.number)
        rows.append([_expr(c, ctx, line) for c in _split_top(row[1:-1])])
    if len({len(r) for r in rows}) != 1:
        raise ProblemError("matrix rows have different lengths", line.number)
    return sp.Matrix(rows)


def _expr(text, ctx, line):
    try:
        return parse(text, ctx)
    except ParseError as exc:
        raise ProblemError(str(exc), line.number) from exc


def _equation(text, ctx, line):
    parts = _split_top(text, "=")
    if len(parts) == 1:
        return _expr(parts[0], ctx, line)
    if len(parts) == 2:
        return sp.expand(_expr(parts[0], ctx, line) - _expr(parts[1], ctx, line))
    raise ProblemError(f"more than one '=' in {text!r}", line.number)


def _read_sections(text):
    lines = []
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if raw[0] in " \t" and lines and not _SECTION.match(stripped):
            lines[-1].text += " " + stripped
        else:
            lines.append(Line(number, stripped))
    if not lines or lines[0].text != HEADER:
        raise ProblemError(f"first line must be the header {HEADER!r}", lines[0].number if lines else None)
    sections = []
    seen = set()
    for ln in lines[1:]:
        m = _SECTION.match(ln.text)
        if m:
            name = m.group(1)
            if name not in SECTIONS:
                raise ProblemError(f"unknown section [{name}]", ln.number)
            if name in seen:
                raise ProblemError(f"section [{name}] appears twice", ln.number)
            seen.add(name)
            sections.append((name, ln.number, []))
        elif not sections:
            raise ProblemError(f"content before the first section: {ln.text!r}", ln.number)
        else:
            sections[-1][2].append(ln)
    return sections


def _pairs(lines):
    out = {}
    for ln in lines:
        key, value = ln.split()
        if key in out:
            raise ProblemError(f"duplicate key {key!r}", ln.number)
        out[key] = (value, ln)
    return out


class _Reader:
    def __init__(self):
        self.problem = None
        self.parameters = ()
        self.functions = ()
        self.change_spec = None

    @property
    def ctx(self):
        return self.problem.context

    def refresh_context(self):
        self.problem.context = SymbolTable(self.problem.bundle, self.parameters, self.functions)

    def require(self, section, number):
        if self.problem is None:
            raise ProblemError(f"[{section}] before [bundle]", number)

    # --- declarations

    def bundle(self, lines, number):
        kv = _pairs(lines)
        for key in kv:
            if key not in ("independent", "dependent", "order"):
                raise ProblemError(f"unknown bundle key {key!r}", kv[key][1].number)
        if "independent" not in kv or "dependent" not in kv:
            raise ProblemError("[bundle] needs independent and dependent", number)
        order = 2
        if "order" in kv:
            value, ln = kv["order"]
            if not value.isdigit():
                raise ProblemError(f"order must be a non-negative integer, got {value!r}", ln.number)
            order = int(value)
        try:
            b = JetBundle(
                _names(kv["independent"][0], kv["independent"][1]),
                _names(kv["dependent"][0], kv["dependent"][1]),
                order,
            )
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem = Problem(b, SymbolTable(b))

    def parameters_(self, lines, number):
        self.require("parameters", number)
        self.parameters += tuple(n for ln in lines for n in _names(ln.text, ln))
        self.problem.parameters = self.parameters
        self._declare(number)

    def functions_(self, lines, number):
        self.require("functions", number)
        self.functions += tuple(n for ln in lines for n in _names(ln.text, ln))
        self.problem.functions = self.functions
        self._declare(number)

    def _declare(self, number):
        try:
            self.refresh_context()
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc

    # --- field and form

    def field_(self, lines, number):
        self.require("field", number)
        b = self.problem.bundle
        kv = _pairs(lines)
        for key, (_, ln) in kv.items():
            if key not in b.independent + b.dependent:
                raise ProblemError(f"{key!r} is not a base coordinate", ln.number)

        def coeff(name):
            if name not in kv:
                return sp.Integer(0)
            value, ln = kv[name]
            return _expr(value, self.ctx, ln)

        X = PointVectorField(tuple(coeff(n) for n in b.independent), tuple(coeff(n) for n in b.dependent))
        try:
            X.check(b)
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem.field = X

    def mu(self, lines, number):
        self.require("mu", number)
        b = self.problem.bundle
        kv = _pairs(lines)
        kind, _ = kv.pop("kind", ("scalar", None))
        source_order = 1
        if "source_order" in kv:
            value, ln = kv.pop("source_order")
            if not value.isdigit():
                raise ProblemError("source_order must be an integer", ln.number)
            source_order = int(value)
        if kind == "zero":
            mu = SemibasicForm.zero(b)
        elif kind == "scalar":
            self._only_coordinates(kv, b)
            lams = [
                _expr(kv[n][0], self.ctx, kv[n][1]) if n in kv else sp.Integer(0) for n in b.independent
            ]
            if b.q != 1:
                raise ProblemError("a scalar form needs one dependent variable; use kind = matrix", number)
            mu = SemibasicForm.scalar(lams, source_order)
        elif kind == "matrix":
            self._only_coordinates(kv, b)
            mats = [
                _matrix(kv[n][0], self.ctx, kv[n][1]) if n in kv else sp.zeros(b.q, b.q)
                for n in b.independent
            ]
            mu = SemibasicForm(tuple(mats), source_order)
        elif kind == "potential":
            if set(kv) != {"P"}:
                raise ProblemError("a potential form has exactly one key P", number)
            value, ln = kv["P"]
            try:
                mu = exact_from_potential(_expr(value, self.ctx, ln), b)
            except ValueError as exc:
                raise ProblemError(str(exc), ln.number) from exc
        elif kind == "gauged":
            mu = self._gauged(kv, b, number)
        else:
            raise ProblemError(f"unknown form kind {kind!r}", number)
        try:
            mu.check(b)
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem.mu = mu
        self.problem.mu_kind = kind

    def _only_coordinates(self, kv, b):
        for key, (_, ln) in kv.items():
            if key not in b.independent:
                raise ProblemError(f"{key!r} is not an independent variable", ln.number)

    def _gauged(self, kv, b, number):
        # generators = L1, L2 ; L1 = [[..]] ; x = a*L1 + b*L2 (linear in the generator names)
        if "generators" not in kv:
            raise ProblemError("a gauged form lists its generators", number)
        value, ln = kv.pop("generators")
        names = _names(value, ln)
        gens = []
        for n in names:
            if n not in kv:
                raise ProblemError(f"generator {n} has no matrix", ln.number)
            gens.append(_matrix(kv.pop(n)[0], self.ctx, ln))
        self._only_coordinates(kv, b)
        ctx = self.ctx.extended(symbols=names)
        syms = [sp.Symbol(n) for n in names]
        rows = []
        for n in b.independent:
            if n not in kv:
                rows.append([sp.Integer(0)] * len(names))
                continue
            value, cln = kv[n]
            e = _expr(value, ctx, cln)
            row = [sp.expand(sp.diff(e, s)) for s in syms]
            rest = sp.expand(e - sum(c * s for c, s in zip(row, syms)))
            if rest != 0 or any(c.free_symbols & set(syms) for c in row):
                raise ProblemError(f"coefficient of dx^{n} must be linear in the generators", cln.number)
            rows.append(row)
        try:
            spec = GaugedAlgebraSpec.from_generators(gens, rows)
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem.gauged = spec
        return spec.assemble()

    # --- equations

    def equations(self, lines, number):
        self.require("equations", number)
        self.problem.equations = [_equation(ln.text, self.ctx, ln) for ln in lines]

    def solved(self, lines, number):
        self.require("solved", number)
        b = self.problem.bundle
        for ln in lines:
            key, value = ln.split()
            target = _expr(key, self.ctx, ln)
            if not isinstance(target, sp.Symbol) or b.jet_info(target) is None:
                raise ProblemError(f"solved target {key!r} must be a jet variable", ln.number)
            self.problem.solved.append((target, _expr(value, self.ctx, ln)))

    def relations(self, lines, number):
        self.require("relations", number)
        for ln in lines:
            key, value = ln.split()
            target = _expr(key, self.ctx, ln)
            if not (isinstance(target, sp.Derivative) and is_function_atom(target)):
                raise ProblemError(f"relation target {key!r} must be a function derivative", ln.number)
            self.problem.relations.append((target, _expr(value, self.ctx, ln)))

    def family(self, lines, number):
        self.require("family", number)
        for ln in lines:
            key, value = ln.split()
            m = _CALL.match(key)
            if not m or m.group(1) not in self.functions:
                raise ProblemError(f"family key must be a declared function call, got {key!r}", ln.number)
            args = _names(m.group(2), ln)
            self.problem.family[m.group(1)] = sp.Lambda(
                tuple(sp.Symbol(a) for a in args), _expr(value, self.ctx, ln)
            )

    # --- invariants

    def invariants(self, lines, number):
        self.require("invariants", number)
        for ln in lines:
            key, value = ln.split()
            if not _NAME.match(key):
                raise ProblemError(f"invariant names are plain identifiers, got {key!r}", ln.number)
            if key in self.problem.invariants:
                raise ProblemError(f"duplicate invariant {key!r}", ln.number)
            self.problem.invariants[key] = _expr(value, self.ctx, ln)

    def suspected(self, lines, number):
        for ln in lines:
            key, note = ln.split()
            if key not in self.problem.invariants:
                raise ProblemError(f"{key!r} is not a declared invariant", ln.number)
            self.problem.suspected[key] = note

    def leading(self, lines, number):
        self.require("leading", number)
        b = self.problem.bundle
        for ln in lines:
            key, value = ln.split()
            eq = _expr(key, self.ctx, ln)
            lead = _expr(value, self.ctx, ln)
            info = b.jet_info(eq) if isinstance(eq, sp.Symbol) else None
            if info is None or b.jet_info(lead) is None:
                raise ProblemError("leading entries map a jet name (D_J Q^a) to a jet variable", ln.number)
            self.problem.leading[info] = lead

    def restricted(self, lines, number):
        for ln in lines:
            key, value = ln.split()
            if key not in self.problem.invariants:
                raise ProblemError(f"{key!r} is not a declared invariant", ln.number)
            expr, _, note = value.partition("|")
            self.problem.restricted[key] = (_expr(expr.strip(), self.ctx, ln), note.strip())

    # --- reduction

    def change(self, lines, number):
        self.require("change", number)
        kv = _pairs(lines)
        for key in ("independent", "dependent"):
            if key not in kv:
                raise ProblemError(f"[change] needs {key}", number)
        new_ind = _names(*kv.pop("independent"))
        new_dep = _names(*kv.pop("dependent"))
        b = self.problem.bundle
        if len(new_ind) != b.p or len(new_dep) != b.q:
            raise ProblemError("the adapted coordinates must match the bundle dimensions", number)
        forward = {}
        for name in new_ind + new_dep:
            if name not in kv:
                raise ProblemError(f"no forward map for {name}", number)
            value, ln = kv.pop(name)
            forward[name] = _expr(value, self.ctx, ln)
        if kv:
            key = next(iter(kv))
            raise ProblemError(f"unexpected key {key!r} in [change]", kv[key][1].number)
        self.change_spec = (new_ind, new_dep, forward)

    def inverse(self, lines, number):
        if self.change_spec is None:
            raise ProblemError("[inverse] needs a preceding [change]", number)
        new_ind, new_dep, forward = self.change_spec
        b = self.problem.bundle
        try:
            new_bundle = JetBundle(new_ind, new_dep, b.order)
            ctx = SymbolTable(new_bundle, self.parameters, self.functions)
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        kv = _pairs(lines)
        inverse = {}
        for name in b.independent + b.dependent:
            if name not in kv:
                raise ProblemError(f"no inverse map for {name}", number)
            value, ln = kv.pop(name)
            inverse[name] = _expr(value, ctx, ln)
        if kv:
            key = next(iter(kv))
            raise ProblemError(f"unexpected key {key!r} in [inverse]", kv[key][1].number)
        self.problem.change = CoordinateChange(b, new_ind, new_dep, forward, inverse)

    def reduce(self, lines, number):
        self.require("reduce", number)
        try:
            ctx = self.ctx.extended(symbols=tuple(self.problem.invariants))
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem.reduce = [_equation(ln.text, ctx, ln) for ln in lines]

    def solutions(self, lines, number):
        self.require("solutions", number)
        b = self.problem.bundle
        for key, (value, ln) in _pairs(lines).items():
            if key not in b.dependent:
                raise ProblemError(f"{key!r} is not a dependent variable", ln.number)
            e = _expr(value, self.ctx, ln)
            if b.jet_symbols(e):
                raise ProblemError("a section depends on the independent variables only", ln.number)
            self.problem.solutions[key] = e

    def zero_test(self, lines, number):
        self.require("zero_test", number)
        conf = {}
        for key, (value, ln) in _pairs(lines).items():
            try:
                if key in ("trials", "digits", "seed", "resample_limit"):
                    conf[key] = int(value)
                elif key == "tolerance":
                    conf[key] = float(value)
                elif key == "window":
                    lo, hi = (sp.Rational(v.strip()) for v in value.split(","))
                    conf[key] = (lo, hi)
                else:
                    raise ProblemError(f"unknown zero_test key {key!r}", ln.number)
            except (TypeError, ValueError) as exc:
                raise ProblemError(f"bad value for {key}: {value!r}", ln.number) from exc
        try:
            ZeroTestConfig(**conf)
        except ValueError as exc:
            raise ProblemError(str(exc), number) from exc
        self.problem.config = conf


def loads(text):
    """Parse problem-file text into a :class:`Problem`."""
    reader = _Reader()
    sections = _read_sections(text)
    if not sections or sections[0][0] != "bundle":
        raise ProblemError("the first section must be [bundle]")
    for name, number, lines in sections:
        handler = getattr(reader, name, None) or getattr(reader, name + "_")
        handler(lines, number)
    return reader.problem


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


__all__ = ["HEADER", "Problem", "ProblemError", "load", "loads"]
