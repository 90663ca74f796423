import random
from fractions import Fraction

import pytest

from clusterleaf.algebra import var
from clusterleaf.groupoid import (
    AsymmetricTable,
    NotSkew,
    OddDimension,
    UnknownCase,
    UTMatrix,
    assemble_A,
    chi_coefficients,
    determinant,
    generic_A,
    n6_case_predicate,
    pfaffian,
    rank_at,
    rank_condition,
    symmetric_rank,
)
from clusterleaf.reduction import CASE1_WITNESS, case1_point

a, b, c = var("a"), var("b"), var("c")


def test_assemble_small():
    A = assemble_A([[2, a, b], [a, 2, c], [b, c, 2]])
    assert A[0, 1] == a and A[1, 2] == c and A[1, 0] == 0 and A[2, 2] == 1
    with pytest.raises(AsymmetricTable):
        assemble_A([[2, a], [b, 2]])
    with pytest.raises(AsymmetricTable):
        assemble_A([[1, a], [a, 2]])


def test_utmatrix_rejects_lower_entries():
    with pytest.raises(ValueError):
        UTMatrix([[1, 0], [a, 1]])


def test_symmetric_rank():
    identity = [[1 if i == j else 0 for j in range(6)] for i in range(6)]
    assert symmetric_rank(identity) == 6
    assert symmetric_rank([[0] * 4 for _ in range(4)]) == 0
    assert symmetric_rank([[a, b], [a * a, a * b]]) == 1


def test_rank_at_exact():
    M = [[a, 1], [1, b]]
    assert rank_at(M, {"a": 2, "b": Fraction(1, 2)}) == 1
    assert rank_at(M, {"a": 2, "b": 3}) == 2


def test_determinant_and_pfaffian():
    assert determinant([[a, b], [c, a]]) == a * a - b * c
    assert pfaffian([[0, a], [-a, 0]]) == a
    with pytest.raises(OddDimension):
        pfaffian([[0]])
    with pytest.raises(NotSkew):
        pfaffian([[0, a], [a, 0]])


def test_pfaffian_squares_to_determinant():
    names = [f"m{i}{j}" for i in range(4) for j in range(i + 1, 4)]
    M = [[var(f"m{min(i, j)}{max(i, j)}") * (1 if i < j else -1) if i != j else 0 for j in range(4)]
         for i in range(4)]
    assert len(names) == 6
    assert pfaffian(M) ** 2 == determinant(M)


def test_rank_condition_small_and_generic():
    assert rank_condition(generic_A(4))[0]
    assert not rank_condition(generic_A(5))[0]


def test_chi_generic_palindromic():
    co = chi_coefficients(generic_A(4))
    assert co[0] == 1 and co[4] == 1 and co[1] == co[3]


def test_case_predicates():
    point = {v: 1 for v in [f"a{i}" for i in range(1, 7)] + [f"b{i}" for i in range(1, 7)]}
    assert n6_case_predicate(1, {**point, **CASE1_WITNESS})
    assert not n6_case_predicate(1, {**point, "c1": 1, "c2": 1, "c3": 1})
    assert n6_case_predicate(1, case1_point(random.Random(3)))
    with pytest.raises(UnknownCase):
        n6_case_predicate(4, point)
