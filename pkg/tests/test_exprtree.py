"""Expression parsing, exact substitution, differentiation, and rendering."""

import math
import random
from fractions import Fraction

import pytest

from liebialg.closedfun import cf_cos, cf_exp
from liebialg.errors import CorpusSyntaxError, EvalError, InputError
from liebialg.exprtree import parse_expr, to_text
from liebialg.render import render_closed_function


def test_parse_rational_arithmetic():
    e = parse_expr("3/4 - 2*(1/2 - 1/3)")
    assert e.eval_exact() == Fraction(3, 4) - 2 * Fraction(1, 6)


def test_parse_exp_to_closed():
    cf = parse_expr("1 - exp(-2*x4)").to_closed()
    assert cf == parse_expr("1").to_closed() - cf_exp({4: -2})


def test_parse_trig_to_closed():
    assert parse_expr("cos(x3)").to_closed() == cf_cos({3: 1})


def test_parse_power_and_division():
    cf = parse_expr("x4^2/2").to_closed()
    assert cf.eval([0, 0, 0, 2.0]) == pytest.approx(2.0)


def test_parse_parameters_and_substitution():
    e = parse_expr("(1+b)^2")
    assert e.params_used() == {"b"}
    assert e.subs_params({"b": Fraction(1, 2)}).eval_exact() == Fraction(9, 4)


def test_parse_error_reports_location():
    with pytest.raises(CorpusSyntaxError) as exc:
        parse_expr("1 + $", line=12)
    assert exc.value.line == 12
    assert exc.value.col is not None


def test_parse_error_unbalanced():
    with pytest.raises(CorpusSyntaxError):
        parse_expr("(1 + 2")


def test_division_by_zero_constant():
    with pytest.raises(EvalError):
        parse_expr("1/0")


def test_nonconstant_quotient_stays_out_of_closed_class():
    with pytest.raises(InputError):
        parse_expr("x1/x2").to_closed()


def test_exp_argument_must_be_linear():
    with pytest.raises(InputError):
        parse_expr("exp(x1*x2)").to_closed()


def test_diff_quotient_rule():
    e = parse_expr("x1/x2")
    d = e.diff(2)
    rng = random.Random(0)
    for _ in range(10):
        p = [rng.uniform(0.5, 2.0) for _ in range(4)]
        assert d.evalf(p) == pytest.approx(-p[0] / p[1] ** 2)


def test_diff_chain_rule_through_exp():
    e = parse_expr("exp(-x4/2)*x1")
    d = e.diff(4)
    p = (1.3, 0, 0, 0.7)
    assert d.evalf(p) == pytest.approx(-0.5 * math.exp(-0.35) * 1.3)


def test_expr_text_roundtrip():
    src = "1 - exp(-2*x4)*(1 + 3*x4) + x1^2/4 - sin(2*x3)"
    e = parse_expr(src)
    again = parse_expr(to_text(e))
    assert again.to_closed() == e.to_closed()


def test_render_roundtrip_bit_exact():
    rng = random.Random(4)
    cases = [
        "1 - exp(-2*x4)",
        "cos(x4) + sin(x4)",
        "x4^2/2 - x2*x3",
        "exp(-x4)*(cos(2*x3) - 3*sin(2*x3))",
        "cosh(x2) - sinh(x2)",
        "exp(x1/2)*x1^3/6",
        "2 - 2*cos(x1) + x2^2*exp(3*x1)",
    ]
    for src in cases:
        cf = parse_expr(src).to_closed()
        text = render_closed_function(cf)
        assert parse_expr(text).to_closed() == cf


def test_render_zero():
    cf = parse_expr("x1 - x1").to_closed()
    assert render_closed_function(cf) == "0"
