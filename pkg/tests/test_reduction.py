from fractions import Fraction

import pytest

from clusterleaf import reduction
from clusterleaf.algebra import var


def test_n5_reduction():
    assert reduction.reduce_n5().passed


def test_n5_needs_the_constraint():
    rep = reduction.reduce_n5(with_constraint=False)
    assert not rep.passed
    assert "log-canonical against quiverTgs" in [c.name for c in rep.failures()]


def test_n6_case1_reduction():
    assert reduction.reduce_n6_case1().passed


@pytest.mark.parametrize("which,length", [(1, 38), (2, 40)])
def test_sequences_hit_every_checkpoint(which, length):
    seq, rep = reduction._sequence(which)
    assert rep.passed
    assert len(seq.mutations()) == length


@pytest.mark.parametrize("which", [1, 2])
def test_case_permutation(which):
    rep = reduction.casimir_permutation(which)
    assert rep.passed
    seq, _ = reduction._sequence(which)
    got = reduction.case_permutation(reduction.sequence_map(seq))
    assert got == reduction.EXPECTED_PERMUTATIONS[which]


def test_permutations_generate_s3():
    group = reduction.generated_group(list(reduction.EXPECTED_PERMUTATIONS.values()))
    assert len(group) == 6


def test_cluster_variables_are_laurent():
    seq, _ = reduction._sequence(1)
    assert all(f.is_laurent() for f in reduction.cluster_variables(seq).values())


def test_weyl_relations():
    rep = reduction.weyl_relations()
    failed = [c.name for c in rep.failures()]
    # s_b s_c has order 3 under the stated action, so the order-4 relation fails
    assert failed == ["(s_b s_c)^4 = 1"]
    t = (var("A"), var("B"), var("C"))
    assert reduction.apply_word(["s_b", "s_c"] * 3, t) == t


def test_weyl_generators_are_involutions():
    t = (Fraction(2), Fraction(3), Fraction(5))
    for g in ("s_a", "s_b", "s_c"):
        assert reduction.weyl_action(g, reduction.weyl_action(g, t)) == t
