from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from tokenize import TokenError

from homcalc.config import DEFAULT_SETTINGS, Settings
from homcalc.errors import ChartMismatch, DivisionByZero, ScenarioError, UnboundVariable
from homcalc.models import Verdict, ZeroVerdict

logger = logging.getLogger(__name__)

Expr = sp.Expr
ZERO = sp.Integer(0)
ONE = sp.Integer(1)

PRIMITIVES = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}
_PRIM_TYPES = (sp.sin, sp.cos, sp.exp)
_BAD = (sp.zoo, sp.nan, sp.oo, -sp.oo)
_PARSER_GLOBALS = {
    "Integer": sp.Integer,
    "Rational": sp.Rational,
    "Float": sp.Float,
    "Symbol": sp.Symbol,
    **PRIMITIVES,
}


@dataclass(frozen=True)
class Chart:
    name: str
    vars: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ChartMismatch(f"Chart {self.name!r} needs at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise ChartMismatch(f"Chart {self.name!r} has repeated variables: {self.vars}")

    @property
    def dim(self) -> int:
        return len(self.vars)

    @property
    def symbols(self) -> tuple[sp.Symbol, ...]:
        return tuple(sp.Symbol(v) for v in self.vars)

    def symbol(self, var: str | int) -> sp.Symbol:
        if isinstance(var, int):
            return sp.Symbol(self.vars[var])
        if var not in self.vars:
            raise ChartMismatch(f"{var!r} is not a variable of chart {self.name!r}")
        return sp.Symbol(var)

    def index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError as exc:
            raise ChartMismatch(f"{var!r} is not a variable of chart {self.name!r}") from exc

    def extend(self, var: str, name: str | None = None) -> Chart:
        if var in self.vars:
            raise ChartMismatch(f"{var!r} is already a variable of chart {self.name!r}")
        return Chart(name or f"{self.name}~", self.vars + (var,))

    def require_same(self, other: Chart) -> None:
        if self.vars != other.vars:
            raise ChartMismatch(f"Chart {self.name}{self.vars} differs from {other.name}{other.vars}")


def as_expr(value) -> Expr:
    if isinstance(value, sp.Basic):
        return value
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    return sp.sympify(value)


def _has_general_denominator(e: Expr) -> bool:
    for p in e.atoms(sp.Pow):
        if p.exp.is_negative and not (p.base.is_Symbol or isinstance(p.base, _PRIM_TYPES)):
            return True
    return False


def _check_finite(e: Expr) -> None:
    if e.has(*_BAD):
        raise DivisionByZero(f"Expression divides by zero: {e}")


def normalize(e) -> Expr:
    """Canonical form: expanded Laurent polynomial, or a reduced fraction when a
    non-monomial denominator occurs. Primitive calls are atoms."""
    e = as_expr(e)
    _check_finite(e)
    out = sp.expand(e)
    _check_finite(out)
    if _has_general_denominator(out):
        out = sp.cancel(sp.together(out))
        _check_finite(out)
    return out


def differentiate(e, v: str | sp.Symbol) -> Expr:
    sym = v if isinstance(v, sp.Symbol) else sp.Symbol(v)
    return normalize(sp.diff(as_expr(e), sym))


def _number(value) -> Expr:
    if isinstance(value, (int, Fraction, sp.Rational)):
        return as_expr(value)
    return sp.Float(float(value), 30)


def evaluate(e, point: Mapping[str, object]) -> float:
    e = as_expr(e)
    bound = {sp.Symbol(str(k)): _number(v) for k, v in point.items()}
    missing = sorted(str(s) for s in e.free_symbols if s not in bound)
    if missing:
        raise UnboundVariable(f"Unbound variables: {', '.join(missing)}")
    value = e.xreplace(bound)
    if value.has(*_BAD):
        raise DivisionByZero(f"Division by zero evaluating {e} at {dict(point)}")
    result = complex(sp.N(value, 20))
    if result.imag:
        raise DivisionByZero(f"Non-real value evaluating {e} at {dict(point)}")
    return result.real


def is_prim_free(e: Expr) -> bool:
    return not e.has(*_PRIM_TYPES)


def is_zero(e, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> ZeroVerdict:
    n = normalize(e)
    if n == 0:
        return ZeroVerdict(Verdict.ZERO, seed)
    residual = str(n)
    syms = sorted(n.free_symbols, key=str)
    names = [str(s) for s in syms]
    fn = sp.lambdify(syms, n, modules="math")
    rng = np.random.default_rng(seed)
    best: tuple[dict[str, float], float] | None = None
    for _ in range(max(settings.samples, 1)):
        mags = rng.uniform(settings.sample_low, settings.sample_high, size=len(syms))
        signs = rng.choice([-1.0, 1.0], size=len(syms))
        point = dict(zip(names, (mags * signs).tolist()))
        try:
            value = float(fn(*point.values()))
        except (ZeroDivisionError, OverflowError, ValueError):
            continue
        if best is None or abs(value) > abs(best[1]):
            best = (point, value)
        if abs(value) > settings.tolerance:
            logger.debug("Nonzero residual %s at %s (seed %s)", residual, point, seed)
            return ZeroVerdict(Verdict.NONZERO, seed, point, value, residual)
    if is_prim_free(n):
        witness, value = best if best is not None else (None, None)
        return ZeroVerdict(Verdict.NONZERO, seed, witness, value, residual)
    logger.debug("Sampled residual %s vanished at every point (seed %s)", residual, seed)
    return ZeroVerdict(Verdict.UNKNOWN, seed, residual=residual)


def all_zero(exprs: Iterable, seed: int = DEFAULT_SETTINGS.seed, settings: Settings = DEFAULT_SETTINGS) -> ZeroVerdict:
    """Combined verdict: the first NonZero residual wins, then Unknown, else Zero."""
    unknown: ZeroVerdict | None = None
    for e in exprs:
        verdict = is_zero(e, seed, settings)
        if verdict.status is Verdict.NONZERO:
            return verdict
        if verdict.status is Verdict.UNKNOWN and unknown is None:
            unknown = verdict
    return unknown or ZeroVerdict(Verdict.ZERO, seed)


def parse_expression(text: str, chart: Chart) -> Expr:
    local = {v: sp.Symbol(v) for v in chart.vars}
    try:
        e = parse_expr(
            str(text),
            local_dict=local,
            global_dict=dict(_PARSER_GLOBALS),
            transformations=standard_transformations + (convert_xor,),
        )
    except (SyntaxError, TokenError) as exc:
        offset = getattr(exc, "offset", None)
        raise ScenarioError(f"Malformed expression {text!r}", column=offset) from exc
    except (TypeError, ValueError, NameError, AttributeError) as exc:
        raise ScenarioError(f"Malformed expression {text!r}: {exc}") from exc
    if not isinstance(e, sp.Expr):
        raise ScenarioError(f"Expression {text!r} is not a scalar")
    unknown = sorted(str(s) for s in e.free_symbols if str(s) not in local)
    if unknown:
        raise ScenarioError(f"Undeclared symbol {unknown[0]!r} in {text!r}", symbol=unknown[0])
    if e.atoms(sp.Float):
        raise ScenarioError(f"Floating-point literal in {text!r}; use p/q")
    for p in e.atoms(sp.Pow):
        if not p.exp.is_Integer:
            raise ScenarioError(f"Non-integer exponent in {text!r}")
    for f in e.atoms(sp.Function):
        if not isinstance(f, _PRIM_TYPES):
            raise ScenarioError(f"Unsupported function {f.func} in {text!r}")
    return normalize(e)


def random_polynomial(
    chart: Chart,
    rng: np.random.Generator,
    degree: int = 2,
    terms: int = 3,
    coeff_range: int = 3,
) -> Expr:
    syms = chart.symbols
    monomials = [ONE]
    for d in range(1, degree + 1):
        monomials.extend(sp.Mul(*combo) for combo in combinations_with_replacement(syms, d))
    total = ZERO
    for _ in range(terms):
        mono = monomials[int(rng.integers(len(monomials)))]
        coeff = int(rng.integers(-coeff_range, coeff_range + 1))
        total += coeff * mono
    return normalize(total)
