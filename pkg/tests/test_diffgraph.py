import pytest

from epdecomp.diffgraph import (
    DifferenceGraph,
    apply_difference,
    build_difference,
    check_balance,
    degree_split,
    unbalanced_vertices,
)
from epdecomp.errors import InvalidMapError, UnknownVertexError
from epdecomp.multigraph import AtomAtomMap, LabeledMultigraph


def test_identity_gives_empty_delta(diels_alder):
    g = diels_alder[0]
    d = build_difference(g, g, AtomAtomMap.identity(g))
    assert d.is_empty()
    assert d.vertices == g.vertices


def test_diels_alder_delta(diels_alder):
    d = build_difference(*diels_alder)
    assert dict(d.delta) == {
        ("C1", "C2"): -1,
        ("C2", "C3"): 1,
        ("C3", "C4"): -1,
        ("C4", "C5"): 1,
        ("C5", "C6"): -1,
        ("C1", "C6"): 1,
    }


def test_trisulfur_delta(trisulfur):
    d = build_difference(*trisulfur)
    assert dict(d.delta) == {("b", "c"): 2, ("b", "b"): -1, ("c", "c"): -1}
    assert d.edge_count() == 4
    assert d.sign("c", "b") == 1 and d.mult("b", "c") == 2
    assert d.degree("b") == 4


def test_delta_uses_map():
    g = LabeledMultigraph({"x": "C", "y": "C"}, {("x", "y"): 1})
    h = LabeledMultigraph({"p": "C", "q": "C"}, {("p", "q"): 1})
    assert build_difference(g, h, AtomAtomMap({"x": "q", "y": "p"})).is_empty()


def test_invalid_map_rejected():
    g = LabeledMultigraph({"x": "C", "y": "C"}, {("x", "y"): 1})
    h = LabeledMultigraph({"x": "C", "y": "C"}, {("x", "x"): 1})
    with pytest.raises(InvalidMapError) as info:
        build_difference(g, h, AtomAtomMap.identity(g))
    assert not info.value.report.ok


def test_degree_split_empty():
    s = degree_split(DifferenceGraph(["a", "b"], {}))
    assert dict(s.d_plus) == dict(s.d_minus) == {"a": 0, "b": 0}


def test_degree_split_trisulfur(trisulfur):
    s = degree_split(build_difference(*trisulfur))
    assert (s.d_plus_prime["b"], s.d_minus_prime["b"]) == (2, 0)
    assert (s.d_plus["b"], s.d_minus["b"]) == (2, 2)


def test_degree_split_diels_alder(diels_alder):
    s = degree_split(build_difference(*diels_alder))
    assert (s.d_plus["C1"], s.d_minus["C1"]) == (1, 1)


def test_balance():
    assert not check_balance(DifferenceGraph(["x", "y"], {("x", "y"): 1}))
    assert unbalanced_vertices(DifferenceGraph(["x", "y"], {("x", "y"): 1})) == [("x", 1, 0), ("y", 1, 0)]
    # a negative loop is offset by two positive edge ends
    d = DifferenceGraph(["x", "y", "z"], {("x", "x"): -1, ("x", "y"): 1, ("x", "z"): 1, ("y", "z"): -1})
    assert check_balance(d)


def test_balance_on_fixtures(diels_alder, claisen, trisulfur):
    for inst in (diels_alder, claisen, trisulfur):
        assert check_balance(build_difference(*inst))


def test_apply_difference_reproduces_product(claisen):
    g, h, a = claisen
    back = a.inverse()
    expected = {tuple(sorted((back(x), back(y)))): m for (x, y), m in h.pairs.items()}
    assert apply_difference(g, build_difference(g, h, a)) == expected


def test_constructor_checks_vertices():
    with pytest.raises(UnknownVertexError):
        DifferenceGraph(["a"], {("a", "b"): 1})
    d = DifferenceGraph(["b", "a"], {("b", "a"): 1, ("a", "a"): 0})
    assert dict(d.delta) == {("a", "b"): 1}
    assert d.vertices == ("a", "b")


def test_components():
    d = DifferenceGraph(["a", "b", "c", "d"], {("a", "b"): 1, ("c", "c"): -1})
    assert d.components() == [("a", "b"), ("c",)]
