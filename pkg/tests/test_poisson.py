from fractions import Fraction

from hypothesis import given, settings, strategies as st

from clusterleaf.algebra import RationalFn, var
from clusterleaf.groupoid import FIXTURES
from clusterleaf.poisson import bracket, half_bracket, log_canonical_matrix, verify_log_canonical
from clusterleaf.quiver import Quiver, load_quiver

Q = Quiver.from_matrix([[0, 1, -2], [-1, 0, 1], [2, -1, 0]], ["x1", "x2", "x3"])
x1, x2, x3 = var("x1"), var("x2"), var("x3")

exps = st.integers(min_value=-2, max_value=2)
laurent = st.lists(
    st.builds(lambda a, b, c, k: RationalFn.monomial({"x1": a, "x2": b, "x3": c}, k),
              exps, exps, exps, st.integers(min_value=1, max_value=4)),
    min_size=1, max_size=3,
).map(lambda ms: sum(ms[1:], ms[0]))


def test_generators():
    assert bracket(x1, x2, Q) == x1 * x2
    assert bracket(x1, x3, Q) == -2 * x1 * x3
    assert bracket(x2, x1, Q) == -x1 * x2


def test_constants_are_central():
    assert bracket(RationalFn.const(5), x1 + x2, Q).is_zero()


def test_half_exponents():
    h = RationalFn.monomial({"x1": Fraction(1, 2)})
    assert bracket(h, x2, Q) == h * x2 * Fraction(1, 2)


@settings(max_examples=40, deadline=None)
@given(laurent)
def test_self_bracket_vanishes(f):
    assert bracket(f, f, Q).is_zero()
    assert half_bracket(f, f, Q) == f * f * Fraction(1, 2)


def test_quiver_variables_are_log_canonical():
    for name in ("markov", "quiverTgs", "clusterA6"):
        q = load_quiver(FIXTURES / f"{name}.quiver")
        assert verify_log_canonical({l: var(l) for l in q.labels}, q).passed


def test_wrong_quiver_is_detected():
    q = load_quiver(FIXTURES / "markov.quiver")
    rev = Quiver.from_matrix([[-w for w in row] for row in q.int_matrix()], list(q.labels))
    rep = verify_log_canonical({l: var(l) for l in q.labels}, rev, ambient=q)
    assert not rep.passed


def test_log_canonical_matrix_monomials():
    m = log_canonical_matrix([x1 * x2, x3], Q)
    assert m[0][1] == -1 and m[1][0] == 1
