"""Two-tier zero test.

The first tier is exact: expansion followed by rational-function
normalization.  Whatever survives is evaluated at seeded random points with
mpmath; every undefined function application and every formal derivative of
one is an independent random value.  The second tier is probabilistic.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy as sp

from ..errors import EvaluationError
from .core import function_atoms


class ZeroKind(enum.Enum):
    EXACT = "ZeroExact"
    NUMERIC = "ZeroNumeric"
    NONZERO = "NonZero"


@dataclass(frozen=True)
class ZeroTestConfig:
    trials: int = 16
    tolerance: float = 1e-9
    digits: int = 30
    seed: int = 0
    window: tuple = (Fraction(1, 2), Fraction(3, 2))
    windows: dict = field(default_factory=dict)
    resample_limit: int = 64

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        # a few guard digits beyond what the tolerance resolves
        if 10.0 ** (5 - self.digits) > self.tolerance:
            raise ValueError(f"{self.digits} digits cannot resolve tolerance {self.tolerance}")
        lo, hi = self.window
        if not lo < hi:
            raise ValueError("empty sampling window")


DEFAULT_CONFIG = ZeroTestConfig()


@dataclass(frozen=True)
class Verdict:
    kind: ZeroKind
    residual: sp.Expr
    trials: int = 0
    witness: dict | None = None
    magnitude: float | None = None

    def __bool__(self):
        return self.kind is not ZeroKind.NONZERO

    @property
    def exact(self):
        return self.kind is ZeroKind.EXACT

    def describe(self):
        if self.kind is ZeroKind.EXACT:
            return "OK(exact)"
        if self.kind is ZeroKind.NUMERIC:
            return f"OK(numeric, trials={self.trials})"
        return f"FAIL residual={self.magnitude:.3e}"


def exact_zero(e):
    """True when expansion or rational normalization gives literal 0."""
    e = sp.sympify(e)
    if e == 0:
        return True
    e = sp.expand(e)
    if e == 0:
        return True
    try:
        return sp.cancel(sp.together(e)) == 0
    except sp.PolynomialError:
        return False


def _sample(rng, window):
    lo, hi = (Fraction(w) for w in window)
    den = 10**6
    a = int(lo * den) + 1
    b = int(hi * den) - 1
    return Fraction(rng.randint(a, b), den)


def is_zero(e, cfg=None, index=0):
    """Decide whether ``e`` vanishes identically.

    ``index`` separates the random streams of independent calls sharing one
    config, so that batches stay reproducible whatever order they run in.
    """
    cfg = cfg or DEFAULT_CONFIG
    e = sp.sympify(e)
    if exact_zero(e):
        return Verdict(ZeroKind.EXACT, sp.Integer(0))
    e = sp.expand(e)

    replacements = {}
    for atom in sorted(function_atoms(e), key=sp.default_sort_key):
        replacements[atom] = sp.Dummy(f"f{len(replacements)}")
    body = e.xreplace(replacements)
    symbols = sorted(body.free_symbols, key=sp.default_sort_key)
    terms = list(sp.Add.make_args(body))
    func = sp.lambdify(symbols, terms, modules="mpmath")
    names = [
        str(s) if not isinstance(s, sp.Dummy) else _atom_name(replacements, s) for s in symbols
    ]

    rng = random.Random(f"{cfg.seed}:{index}")
    failures = 0
    done = 0
    with mpmath.workdps(cfg.digits):
        while done < cfg.trials:
            point = [
                _sample(rng, cfg.windows.get(name, cfg.window)) for name in names
            ]
            args = [mpmath.mpf(p.numerator) / p.denominator for p in point]
            try:
                values = func(*args)
                total = mpmath.fsum(values)
                scale = mpmath.fsum(abs(v) for v in values)
                ok = mpmath.isfinite(total) and mpmath.isfinite(scale)
                if ok and isinstance(total, mpmath.mpc):
                    ok = abs(total.imag) <= cfg.tolerance * max(scale, 1)
                    total = total.real
            except (ZeroDivisionError, ValueError, OverflowError, TypeError):
                ok = False
            if not ok:
                failures += 1
                if failures > cfg.resample_limit:
                    raise EvaluationError(
                        f"evaluation failed at {failures} sample points; last point "
                        + ", ".join(f"{n}={p}" for n, p in zip(names, point))
                    )
                continue
            done += 1
            if scale == 0:
                continue
            rel = abs(total) / scale
            if rel > cfg.tolerance:
                witness = {n: str(p) for n, p in zip(names, point)}
                return Verdict(
                    ZeroKind.NONZERO, e, done, witness=witness, magnitude=float(abs(total))
                )
    return Verdict(ZeroKind.NUMERIC, e, cfg.trials)


def _atom_name(replacements, dummy):
    for atom, d in replacements.items():
        if d == dummy:
            from .printer import to_text

            return to_text(atom)
    return str(dummy)
