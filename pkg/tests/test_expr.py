from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from homcalc.config import Settings
from homcalc.errors import ChartMismatch, DivisionByZero, ScenarioError, UnboundVariable
from homcalc.expr import (
    Chart,
    all_zero,
    differentiate,
    evaluate,
    is_zero,
    normalize,
    parse_expression,
    random_polynomial,
)
from homcalc.models import Verdict


def test_chart_rejects_repeated_variables():
    with pytest.raises(ChartMismatch):
        Chart("bad", ("x", "x"))


def test_chart_extend_appends_variable(r2):
    ext = r2.extend("r")
    assert ext.vars == ("x", "y", "r")
    with pytest.raises(ChartMismatch):
        ext.extend("x")


def test_normalize_expands_laurent_polynomials():
    x, y = sp.symbols("x y")
    assert normalize((x + y) ** 2 - x**2 - 2 * x * y) == y**2
    assert normalize(x / x) == 1


def test_normalize_reduces_general_denominators():
    x = sp.Symbol("x")
    assert normalize((x**2 - 1) / (x - 1)) == x + 1


def test_normalize_division_by_zero():
    with pytest.raises(DivisionByZero):
        normalize(sp.Integer(1) / sp.Integer(0))


def test_differentiate():
    x, y = sp.symbols("x y")
    assert differentiate(x**2 * y, "x") == 2 * x * y


def test_evaluate_and_unbound():
    x = sp.Symbol("x")
    assert evaluate(x**2 + 1, {"x": 2}) == pytest.approx(5.0)
    with pytest.raises(UnboundVariable):
        evaluate(x + sp.Symbol("y"), {"x": 1})


def test_is_zero_exact():
    x = sp.Symbol("x")
    verdict = is_zero((x + 1) ** 2 - x**2 - 2 * x - 1)
    assert verdict.status is Verdict.ZERO


def test_is_zero_polynomial_nonzero_has_witness():
    x = sp.Symbol("x")
    verdict = is_zero(x - 1, seed=7)
    assert verdict.status is Verdict.NONZERO
    assert verdict.seed == 7
    assert verdict.witness is not None
    assert verdict.residual == "x - 1"


def test_is_zero_trig_identity_is_zero_after_sampling():
    x = sp.Symbol("x")
    verdict = is_zero(sp.sin(x) ** 2 + sp.cos(x) ** 2 - 1)
    assert verdict.status in (Verdict.ZERO, Verdict.UNKNOWN)


def test_is_zero_is_deterministic_per_seed():
    x, y = sp.symbols("x y")
    e = sp.exp(x) - 1 - y
    assert is_zero(e, seed=3) == is_zero(e, seed=3)


def test_all_zero_reports_first_nonzero():
    x = sp.Symbol("x")
    verdict = all_zero([sp.Integer(0), x, 2 * x])
    assert verdict.status is Verdict.NONZERO
    assert verdict.residual == "x"
    assert all_zero([]).status is Verdict.ZERO


def test_parse_expression_rationals_and_powers(r2):
    x, y = r2.symbols
    assert parse_expression("1/4*x^2 - y", r2) == sp.Rational(1, 4) * x**2 - y
    assert parse_expression("sin(x)*cos(y)", r2) == sp.sin(x) * sp.cos(y)


@pytest.mark.parametrize(
    "text",
    ["x +", "z", "0.5*x", "x^(1/2)", "log(x)"],
)
def test_parse_expression_rejects(r2, text):
    with pytest.raises(ScenarioError):
        parse_expression(text, r2)


def test_parse_expression_reports_unknown_symbol(r2):
    with pytest.raises(ScenarioError) as info:
        parse_expression("x + w", r2)
    assert info.value.symbol == "w"


def test_random_polynomial_is_seeded(r2):
    first = random_polynomial(r2, np.random.default_rng(5))
    second = random_polynomial(r2, np.random.default_rng(5))
    assert first == second
    assert first.free_symbols <= set(r2.symbols)


def test_sampling_settings_are_respected():
    x = sp.Symbol("x")
    settings = Settings(samples=1, sample_low=1.0, sample_high=1.0)
    verdict = is_zero(sp.exp(x) - sp.E, seed=0, settings=settings)
    # x = +-1 only: exp(1) - e vanishes there, exp(-1) - e does not
    assert verdict.status in (Verdict.NONZERO, Verdict.UNKNOWN)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_evaluate_is_a_ring_homomorphism(r2, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_polynomial(r2, rng) for _ in range(3))
    x, y = rng.uniform(-2.0, 2.0, size=2)
    point = {"x": float(x), "y": float(y)}
    expected = evaluate(a, point) * evaluate(b, point) + evaluate(c, point)
    assert evaluate(normalize(a * b + c), point) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_partial_derivatives_commute(r3, seed):
    x, y, z = r3.symbols
    e = random_polynomial(r3, np.random.default_rng(seed), degree=3, terms=5) + x**2 * sp.sin(x * y) + z * sp.exp(y)
    for v, w in [("x", "y"), ("y", "z"), ("x", "z")]:
        assert differentiate(differentiate(e, v), w) == differentiate(differentiate(e, w), v)
