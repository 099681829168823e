"""Parser, evaluator and symbolic derivative checks."""

import cmath

import numpy as np
import pytest

from slray.errors import DivisionByZero, DomainError, ParseError
from slray import expr
from slray.expr import (
    Const, Func, Mul, Neg, Pow, Var,
    compile_fn, differentiate, evaluate, format_expr, parse,
)
from slray.numerics import principal_root

RNG = np.random.default_rng(20240811)

CORPUS = [
    "x^2",
    "-(i*x)^3",
    "x^2 + i",
    "(x^4+1)^(1/2)",
    "-x^4 + i*x",
    "exp(-x)*x^2",
    "-(2 + sin(x)) + i",
    "1/(x+3) + cos(2*x)",
    "sqrt(x^2+1)*exp(i*x/10)",
    "log(x+2)/x",
    "x^2.5 - pi*x + e",
]


def test_parse_pow():
    node = parse("x^2")
    assert isinstance(node, Pow)
    assert isinstance(node.base, Var)
    assert node.exponent == 2


def test_parse_pt_potential_shape():
    # matches -(i*x)^3 as Neg(Pow(Mul(Const(i), Var), 3))
    node = parse("-(i*x)^3")
    assert isinstance(node, Neg)
    assert isinstance(node.child, Pow)
    assert node.child.exponent == 3
    inner = node.child.base
    assert isinstance(inner, Mul)
    assert isinstance(inner.left, Const) and inner.left.value == 1j
    assert isinstance(inner.right, Var)


def test_parse_error_offset():
    with pytest.raises(ParseError) as err:
        parse("x^^2")
    assert err.value.offset == 2


@pytest.mark.parametrize("bad, offset", [
    ("x +", 3),
    ("(x", 2),
    ("x^x", 2),
    ("foo(x)", 0),
    ("2 ** 3", 3),
])
def test_parse_errors_carry_positions(bad, offset):
    with pytest.raises(ParseError) as err:
        parse(bad)
    assert err.value.offset == offset


def test_evaluate_pt_potential():
    node = parse("-(i*x)^3")
    assert evaluate(node, 2) == pytest.approx(8j)


def test_evaluate_simple_sum():
    assert evaluate(parse("x^2 + i"), 1) == pytest.approx(1 + 1j)


def test_evaluate_half_power_polar_oracle():
    # brute-force oracle: principal square root via polar form
    node = parse("(x^4+1)^(1/2)")
    x = 1.3
    z = x ** 4 + 1
    want = abs(z) ** 0.5 * cmath.exp(1j * cmath.phase(complex(z)) / 2)
    assert abs(evaluate(node, x) - want) < 1e-12 * abs(want)


def test_evaluate_division_by_zero():
    with pytest.raises(DivisionByZero):
        evaluate(parse("1/(x-2)"), 2)


def test_evaluate_log_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), 0)


def test_unary_minus_binds_below_power():
    assert evaluate(parse("-x^2"), 3) == pytest.approx(-9)


def test_power_right_associative():
    assert evaluate(parse("x^2^3"), 2) == pytest.approx(2 ** 8)


def test_principal_branch_of_negative_base():
    # arg(-1) = pi, so (-1)^(1/2) must be +i, not -i
    assert evaluate(parse("(-1)^(1/2)"), 0) == pytest.approx(1j)
    assert evaluate(parse("(x - 2)^(1/2)"), 1.0) == pytest.approx(1j)


def test_pow_matches_principal_root():
    for _ in range(100):
        z = complex(RNG.normal(), RNG.normal())
        via_pow = complex(expr._pow(z, 0.5 + 0j))
        assert via_pow == principal_root(z, 2)


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip_print_parse(text):
    node = parse(text)
    reparsed = parse(format_expr(node))
    for _ in range(20):
        x = RNG.uniform(0.5, 10.0)
        a = evaluate(node, x)
        b = evaluate(reparsed, x)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@pytest.mark.parametrize("text", CORPUS)
def test_compiled_matches_treewalk(text):
    node = parse(text)
    fn = compile_fn(node)
    xs = RNG.uniform(0.5, 10.0, size=50)
    vec = fn(xs)
    for x, v in zip(xs, vec):
        assert abs(v - evaluate(node, x)) <= 1e-12 * max(1.0, abs(v))
    assert fn(xs[0]) == pytest.approx(evaluate(node, xs[0]))


def test_compiled_constant_broadcasts():
    fn = compile_fn(parse("2 + 3*i"))
    out = fn(np.linspace(1, 2, 7))
    assert out.shape == (7,)
    assert np.all(out == 2 + 3j)


def test_derivative_power_rule():
    d = differentiate(parse("x^2"))
    for x in [0.3, 1.7, 4.0]:
        assert evaluate(d, x) == pytest.approx(2 * x)


def test_derivative_pt_potential():
    # d/dx of -(i*x)^3 is -3i*(i*x)^2; at x = 2 both give 12i
    d = differentiate(parse("-(i*x)^3"))
    assert evaluate(d, 2) == pytest.approx(12j)
    ref = parse("-3*i*(i*x)^2")
    for x in [0.5, 2.0, 7.1]:
        assert evaluate(d, x) == pytest.approx(evaluate(ref, x))


def _central_diff(node, x, h):
    return (evaluate(node, x + h) - evaluate(node, x - h)) / (2 * h)


@pytest.mark.parametrize("text", CORPUS)
def test_derivative_against_finite_differences(text):
    node = parse(text)
    d = differentiate(node)
    for x in RNG.uniform(1.0, 10.0, size=100):
        h = 1e-6 * max(1.0, abs(x))
        fd = _central_diff(node, x, h)
        sym = evaluate(d, x)
        assert abs(sym - fd) <= 1e-6 * max(1.0, abs(fd))


def test_second_derivative_evaluates():
    node = parse("-x^4 + i*x")
    d2 = differentiate(differentiate(node))
    for x in [1.0, 2.5]:
        assert evaluate(d2, x) == pytest.approx(-12 * x ** 2)


def test_derivative_linearity():
    f = parse("exp(-x)*x^2")
    g = parse("sqrt(x^2+1)")
    both = parse("exp(-x)*x^2 + sqrt(x^2+1)")
    df, dg, dboth = differentiate(f), differentiate(g), differentiate(both)
    for x in RNG.uniform(0.5, 10.0, size=20):
        lhs = evaluate(dboth, x)
        rhs = evaluate(df, x) + evaluate(dg, x)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
