"""Text output in the parser's grammar."""

from __future__ import annotations

import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.printing.precedence import precedence
from sympy.printing.str import StrPrinter

from .core import derivative_orders


class GrammarPrinter(StrPrinter):
    """``StrPrinter`` emitting ``^`` powers and bracketed function derivatives.

    With ``compact=True`` undefined functions drop their argument lists and
    derivatives are written with subscripts (``P_xu``), as in hand-written
    determining equations.  Compact output is for reading only.
    """

    def __init__(self, compact=False):
        super().__init__({"order": None})
        self.compact = compact

    def _print_Pow(self, expr, rational=False):
        PREC = precedence(expr)
        if expr.exp is sp.S.Half:
            return f"sqrt({self._print(expr.base)})"
        if -expr.exp is sp.S.Half:
            return f"1/sqrt({self._print(expr.base)})"
        if expr.exp is sp.S.NegativeOne:
            return "1/" + self.parenthesize(expr.base, PREC, strict=False)
        base = self.parenthesize(expr.base, PREC, strict=False)
        exp = self._print(expr.exp)
        if not (expr.exp.is_Integer and expr.exp >= 0):
            exp = f"({exp})"
        return f"{base}^{exp}"

    def _print_Exp1(self, expr):
        return "exp(1)"

    def _print_Pi(self, expr):
        return "(4*arctan(1))"

    def _print_ImaginaryUnit(self, expr):
        return "(-1)^(1/2)"

    def _print_atan(self, expr):
        return f"arctan({self._print(expr.args[0])})"

    def _print_Function(self, expr):
        if self.compact and isinstance(expr, AppliedUndef):
            return expr.func.__name__
        return super()._print_Function(expr)

    def _print_Derivative(self, expr):
        app, orders = derivative_orders(expr)
        if not isinstance(app, AppliedUndef):
            raise ValueError(f"cannot print derivative of {app}")
        name = app.func.__name__
        if self.compact:
            suffix = "".join(str(a) * n for a, n in zip(app.args, orders))
            return f"{name}_{suffix}"
        args = ", ".join(self._print(a) for a in app.args)
        return f"{name}[{','.join(map(str, orders))}]({args})"


_PLAIN = GrammarPrinter()
_COMPACT = GrammarPrinter(compact=True)


def to_text(e, compact=False):
    """Render ``e`` so that ``parse(to_text(e))`` gives back ``e``."""
    return (_COMPACT if compact else _PLAIN).doprint(sp.sympify(e))
