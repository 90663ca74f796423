from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from clusterleaf.algebra import (
    DiscriminantMismatch,
    DivisionByZero,
    NonSquareSubstitution,
    ParseError,
    QuadElem,
    RationalFn,
    arith,
    euler_derive,
    parse,
    quad_mul,
    substitute,
    var,
)

x1, x2, x3 = var("x1"), var("x2"), var("x3")
NAMES = ["x1", "x2", "x3"]

half_exps = st.integers(min_value=-4, max_value=4).map(lambda k: Fraction(k, 2))
monomials = st.builds(
    lambda e, c: RationalFn.monomial(dict(zip(NAMES, e)), c),
    st.tuples(half_exps, half_exps, half_exps),
    st.integers(min_value=-6, max_value=6).filter(bool),
)
laurent = st.lists(monomials, min_size=1, max_size=4).map(lambda ms: sum(ms[1:], ms[0]))


def test_binomial():
    assert (x1 + x2) * (x1 - x2) == x1 ** 2 - x2 ** 2


def test_cancellation_normalizes():
    f = (x1 ** 2 - 1) / (x1 - 1)
    assert f == x1 + 1
    assert f.is_laurent()


def test_half_exponent_law():
    h = RationalFn.monomial({"x1": Fraction(1, 2)})
    assert h * h == x1


def test_arith_ops():
    assert arith(x1, x2, "add") == x1 + x2
    assert arith(x1, x2, "div") * x2 == x1
    with pytest.raises(DivisionByZero):
        arith(x1, RationalFn.const(0), "div")


def test_euler_derive_examples():
    m = RationalFn.monomial({"x1": Fraction(3, 2), "x2": -1})
    assert euler_derive(m, "x1") == m * Fraction(3, 2)
    assert euler_derive(x2, "x1") == 0
    assert euler_derive(x1 + x2, "x1") == x1


def test_substitute_casimir():
    a1, a2, a5 = var("a1"), var("a2"), var("a5")
    assert substitute(a1 * a2 * a5, {"a5": -1 / (a1 * a2)}) == -1


def test_substitute_symmetry_and_pole():
    x = var("x")
    assert substitute(x + 1 / x, {"x": 1 / x}) == x + 1 / x
    with pytest.raises(DivisionByZero):
        substitute(1 / (1 + x), {"x": -1})


def test_half_power_needs_square():
    h = RationalFn.monomial({"x1": Fraction(1, 2)})
    assert h.substitute({"x1": x2 ** 2}) == x2
    with pytest.raises(NonSquareSubstitution):
        h.substitute({"x1": 1 + x2})


def test_evaluate_exact():
    f = RationalFn.monomial({"x1": Fraction(1, 2)}) + x2
    assert f.evaluate({"x1": Fraction(9, 4), "x2": 1}) == Fraction(5, 2)


@pytest.mark.parametrize("text", ["x1^(1/2)*x2 - 3/2*x3^(-1)", "(x1 + 1)/(x2 - x3)", "-x1^2"])
def test_parse_round_trip(text):
    f = parse(text)
    assert parse(f.to_str()) == f


def test_parse_error():
    with pytest.raises(ParseError):
        parse("x1 + * x2")


def test_quad_relation_and_norm():
    D = x1 + 2
    rho = QuadElem.radical("r", D)
    assert quad_mul(rho, rho) == QuadElem.lift(D)
    p, q = x2, x3
    assert (p + q * rho) * (p - q * rho) == QuadElem.lift(p ** 2 - q ** 2 * D)


def test_quad_mismatch():
    with pytest.raises(DiscriminantMismatch):
        QuadElem.radical("r", x1) * QuadElem.radical("r", x2)


@settings(max_examples=60, deadline=None)
@given(laurent, laurent, laurent)
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f - f == 0


@settings(max_examples=60, deadline=None)
@given(laurent, laurent)
def test_euler_leibniz(f, g):
    for v in NAMES:
        assert euler_derive(f * g, v) == euler_derive(f, v) * g + f * euler_derive(g, v)


@settings(max_examples=40, deadline=None)
@given(laurent, laurent)
def test_division_inverts_multiplication(f, g):
    if g.is_zero():
        return
    assert (f * g) / g == f


@settings(max_examples=40, deadline=None)
@given(laurent)
def test_to_str_round_trip(f):
    assert parse(f.to_str()) == f
