import pytest

from clusterleaf.algebra import var
from clusterleaf.groupoid import FIXTURES
from clusterleaf.quiver import load_quiver, quivers_isomorphic
from clusterleaf.ribbon import (
    EvenN,
    InvalidN,
    LoopWord,
    RibbonError,
    angle_bracket,
    gamma_n,
    geodesic,
    geodesic_table,
    gij,
    goldman_quiver,
    holonomy,
    load_ribbon,
    maximal_loop,
    parse_ribbon,
)


@pytest.mark.parametrize("n,edges,genus,holes", [(3, 3, 1, 1), (4, 6, 1, 2), (5, 9, 2, 1), (6, 12, 2, 2)])
def test_gamma_topology(n, edges, genus, holes):
    G = gamma_n(n)
    assert len(G.edges) == edges == 3 * n - 6
    assert G.is_trivalent()
    assert (G.genus(), G.boundary_components()) == (genus, holes)


@pytest.mark.parametrize("n", [2, 0, "5"])
def test_invalid_n(n):
    with pytest.raises(InvalidN):
        gamma_n(n)


def test_maximal_loop_needs_odd_n():
    with pytest.raises(EvenN):
        maximal_loop(4)


def test_goldman_quiver_of_gamma5():
    q = goldman_quiver(gamma_n(5))
    assert quivers_isomorphic(q, load_quiver(FIXTURES / "quiverTgs.quiver")) is not None


def test_fat_graph_quiver():
    G = load_ribbon(FIXTURES / "fat_graph.ribbon")
    assert quivers_isomorphic(goldman_quiver(G), load_quiver(FIXTURES / "reducedquiver.quiver")) is not None


def test_holonomy_is_unimodular():
    G = gamma_n(5)
    H = holonomy(G, LoopWord.hat_word([1, 3, 5, 4, 3, 2]))
    assert H.det() == 1


def test_geodesic_table_diagonal_and_symmetry():
    T = geodesic_table(gamma_n(5))
    for i in range(5):
        assert T[i][i] == 2
        for j in range(5):
            assert T[i][j] == T[j][i]


def test_adjacent_geodesics_are_angle_brackets():
    G = gamma_n(5)
    assert gij(G, 1, 2) == angle_bracket([var("x1"), var("x2")])
    assert gij(G, 4, 5) == angle_bracket([var("x4"), var("x5")])


def test_angle_bracket_single():
    z = var("z")
    root = angle_bracket([z]) / (1 + 1 / z)
    assert root * root == z


def test_hat_word_round_trip():
    w = LoopWord.hat_word([1, 2, 3, 2])
    assert LoopWord.parse(w.to_text()).to_text() == w.to_text()


def test_parse_ribbon():
    G = parse_ribbon("ribbon theta\nvertex u a b c\nvertex v c b a\nedge a s\n")
    assert G.labels["a"] == "s" and len(G.edges) == 3
    assert parse_ribbon(G.to_text()).order == G.order
    with pytest.raises(RibbonError):
        parse_ribbon("vertex u a b\n")
    with pytest.raises(RibbonError):
        parse_ribbon("garbage line\n")
