import pytest
from hypothesis import given, settings, strategies as st

from clusterleaf.algebra import DivisionByZero, var
from clusterleaf.groupoid import FIXTURES
from clusterleaf.quiver import (
    FrozenVertex,
    NonIntegralRow,
    OverlappingPairs,
    Quiver,
    QuiverParseError,
    Seed,
    amalgamate,
    casimir_basis,
    in_kernel,
    lattice_contains,
    load_quiver,
    mutate_casimir_vector,
    mutate_matrix,
    mutate_quiver,
    parse_quiver,
    quivers_isomorphic,
    specialize,
)


def fixture(name):
    return load_quiver(FIXTURES / f"{name}.quiver")


@st.composite
def skew_matrices(draw, max_n=7):
    n = draw(st.integers(min_value=2, max_value=max_n))
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            B[i][j] = draw(st.integers(min_value=-3, max_value=3))
            B[j][i] = -B[i][j]
    return B


def test_markov_mutation():
    B = [[0, 2, -2], [-2, 0, 2], [2, -2, 0]]
    assert mutate_matrix(B, 0) == [[0, -2, 2], [2, 0, -2], [-2, 2, 0]]


def test_a2_sign_flip():
    assert mutate_matrix([[0, 1], [-1, 0]], 0) == [[0, -1], [1, 0]]


@settings(max_examples=100, deadline=None)
@given(skew_matrices(), st.data())
def test_mutation_involution(B, data):
    k = data.draw(st.integers(min_value=0, max_value=len(B) - 1))
    assert mutate_matrix(mutate_matrix(B, k), k) == B


@settings(max_examples=50, deadline=None)
@given(skew_matrices())
def test_mutation_keeps_skew(B):
    M = mutate_matrix(B, 0)
    n = len(M)
    assert all(M[i][j] == -M[j][i] for i in range(n) for j in range(n))


def test_frozen_and_half_rows_refused():
    q = Quiver.from_arrows(["a", "b"], [("a", "b", 1)], frozen=["a"])
    with pytest.raises(FrozenVertex):
        mutate_quiver(q, "a")
    h = parse_quiver("quiver 2\na\nb\na b 1/2\n")
    with pytest.raises(NonIntegralRow):
        mutate_quiver(h, "a")


def test_seed_mutation_a2():
    x, y = var("x"), var("y")
    s = Seed.initial(fixture("a2")).mutate("x")
    assert s["x"] == 1 / x and s["y"] == y * (1 + x)
    assert s.mutate("x").same_as(Seed.initial(fixture("a2")))


def test_casimir_examples():
    q = fixture("quiverA5modified")
    vec = [1 if l in ("a1", "a2", "a5") else 0 for l in q.labels]
    assert lattice_contains(casimir_basis(q), vec)

    A6 = fixture("clusterA6")
    basis = casimir_basis(A6)
    assert len(basis) == 3
    for group in (("c",), ("b", "c"), ("a", "b", "c")):
        v = [1 if l[0] in group else 0 for l in A6.labels]
        assert lattice_contains(basis, v)

    assert casimir_basis(Quiver.from_matrix([[0, 1], [-1, 0]])) == []


@pytest.mark.parametrize("name", ["quiverA5", "clusterA6", "reducedquiver", "centre_3"])
def test_casimirs_survive_mutation(name):
    q = fixture(name)
    for v in casimir_basis(q):
        for k in q.mutable():
            assert in_kernel(mutate_quiver(q, k), mutate_casimir_vector(q, v, k))


FG_PAIRS = [(f"Z_{k}0{6 - k}", f"Z_{6 - k}{k}0") for k in range(1, 6)]


def test_amalg_figure_is_unfrozen_fg6():
    fg = fixture("fg6")
    d = fg.drop([l for l, f in zip(fg.labels, fg.frozen) if f])
    assert d.same_arrows(fixture("amalg").reorder(d.labels))


def test_amalgamated_fg6_is_cluster_a6():
    fg = fixture("fg6")
    q = amalgamate(fg, FG_PAIRS).drop([l for l, f in zip(fg.labels, fg.frozen) if f])
    iso = quivers_isomorphic(q, fixture("clusterA6"))
    assert iso is not None
    assert {iso[z] for z in ("Z_303", "Z_312", "Z_321")} == {"c1", "c2", "c3"}


def test_amalgamate_edge_cases():
    q = fixture("markov")
    assert amalgamate(q, []) == q
    with pytest.raises(OverlappingPairs):
        amalgamate(q, [("x1", "x2"), ("x2", "x3")])
    c = Quiver.from_arrows(["a", "b", "t"], [("a", "t", 1), ("t", "b", 1)])
    assert amalgamate(c, [("a", "b")]).arrows() == []


def test_isomorphism_trivial_cases():
    q = fixture("clusterA6")
    iso = quivers_isomorphic(q, q)
    assert iso is not None and sorted(iso.values()) == sorted(q.labels)
    assert quivers_isomorphic(q, fixture("markov")) is None


def test_specialize():
    x, y = var("x"), var("y")
    s = Seed(Quiver.from_arrows(["x", "y"], [("x", "y", 1)]), {"x": 1 / (1 + y), "y": y})
    t = specialize(s, "z", 2)
    assert t["x"] == 1 / (1 + y)
    u = specialize(s, "y", 3)
    assert list(u.quiver.labels) == ["x"] and u["x"] == var("x") ** 0 / 4
    with pytest.raises(DivisionByZero):
        specialize(s, "y", -1)


def test_parse_errors():
    with pytest.raises(QuiverParseError):
        parse_quiver("nonsense")
    with pytest.raises(QuiverParseError):
        parse_quiver("quiver 2\na\nb\na b -1\n")


def test_text_round_trip():
    for name in ("markov", "clusterA6", "fg6"):
        q = fixture(name)
        assert parse_quiver(q.to_text()) == q
