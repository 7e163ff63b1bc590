import random

import pytest

import oracles
from corpus import random_instance
from epdecomp.diffgraph import build_difference
from epdecomp.epd import (
    EPD,
    QuadType,
    apply_epd,
    apply_steps,
    classify_quad,
    is_homovalent,
    quad_schedule,
    rewrite_type_iii,
    split_epd,
    split_to_quads,
)
from epdecomp.errors import InapplicableEPDError, MalformedWalkError, RewriteError, UnknownVertexError
from epdecomp.multigraph import LabeledMultigraph
from epdecomp.walks import AlternatingWalk, partition_walks


def carbons(n, bonds):
    return LabeledMultigraph({f"c{i}": "C" for i in range(1, n + 1)}, bonds)


def _target(h, a):
    return h.relabeled({y: x for x, y in a.pairs.items()})


def test_apply_diels_alder(diels_alder):
    g, h, a = diels_alder
    (w,) = partition_walks(build_difference(g, h, a))
    assert apply_epd(g, EPD.from_walk(w)) == _target(h, a)


def test_apply_trisulfur(trisulfur):
    g, h, a = trisulfur
    assert apply_epd(g, EPD(("b", "b", "c", "c"))) == _target(h, a)


def test_inapplicable_names_pair():
    g = carbons(4, {("c1", "c2"): 1})
    with pytest.raises(InapplicableEPDError) as info:
        apply_epd(g, EPD(("c1", "c2", "c3", "c4")))
    assert info.value.pair == ("c3", "c4")
    assert "c3-c4" in str(info.value)


def test_apply_is_atomic():
    mult = {("c1", "c2"): 1}
    with pytest.raises(InapplicableEPDError):
        apply_steps(mult, EPD(("c1", "c2", "c3", "c4")))
    assert mult == {("c1", "c2"): 1}


def test_apply_unknown_vertex():
    with pytest.raises(UnknownVertexError):
        apply_epd(carbons(2, {("c1", "c2"): 2}), EPD(("c1", "c2", "c1", "zz")))


def test_epd_equality_ignores_bookkeeping():
    assert EPD(("a", "b", "c", "d"), 3, 1) == AlternatingWalk(("a", "b", "c", "d"))
    assert EPD.from_walk(AlternatingWalk(("a", "b", "c", "d"))).walk.vertices == ("a", "b", "c", "d")


def test_split_claisen(claisen):
    g, h, a = claisen
    (w,) = partition_walks(build_difference(g, h, a))
    s = split_epd(EPD.from_walk(w), 2, g)
    assert [len(e) for e in s.order] == [4, 4]
    first, second = s.order
    mid = apply_epd(g, first)
    assert apply_epd(mid, second) == _target(h, a)
    assert s.head.fictitious[0][2] == 1 and s.tail.fictitious[0][2] == -1


def test_split_when_chord_is_a_walk_bond():
    # the chord a00-a05 doubles as the first (negative) step; taking the tail
    # first would use up the only a00-a05 bond the head still has to remove
    g, h, a = random_instance(random.Random(207), max_vertices=12)
    w = partition_walks(build_difference(g, h, a))[0]
    assert (w.vertices[0], w.vertices[9], w.vertices[1]) == ("a00", "a05", "a05")
    s = split_epd(EPD.from_walk(w), 5, g)
    assert s.head_first
    assert apply_epd(apply_epd(g, s.order[0]), s.order[1]) == apply_epd(g, EPD.from_walk(w))


def test_split_index_range(claisen):
    g, h, a = claisen
    (w,) = partition_walks(build_difference(g, h, a))
    for i in (1, 3):
        with pytest.raises(ValueError):
            split_epd(EPD.from_walk(w), i, g)


def test_split_eight_walk_twice():
    # alternating 8-cycle on a ring of single bonds
    g = carbons(8, {("c1", "c2"): 1, ("c3", "c4"): 1, ("c5", "c6"): 1, ("c7", "c8"): 1})
    e = EPD(tuple(f"c{i}" for i in range(1, 9)))
    expected = apply_epd(g, e)
    s = split_epd(e, 2, g)
    assert sorted(len(x) for x in s.order) == [4, 6]
    mids = []
    cur = g
    for part in s.order:
        if len(part) == 6:
            inner = split_epd(part, 2, cur)
            for q in inner.order:
                cur = apply_epd(cur, q)
                mids.append(q)
        else:
            cur = apply_epd(cur, part)
            mids.append(part)
    assert len(mids) == 3
    assert cur == expected


def test_split_to_quads_identity_on_quad(trisulfur):
    g = trisulfur[0]
    e = EPD(("b", "b", "c", "c"))
    ((q, after),) = split_to_quads(e, g)
    assert q == e
    assert after == apply_epd(g, e)


def test_split_to_quads_diels_alder(diels_alder):
    g, h, a = diels_alder
    (w,) = partition_walks(build_difference(g, h, a))
    seq = split_to_quads(EPD.from_walk(w), g)
    assert len(seq) == 2
    assert seq[-1][1] == _target(h, a)


def test_ten_walk_gives_four_quads():
    g = carbons(10, {(f"c{i}", f"c{i + 1}"): 1 for i in range(1, 10, 2)})
    e = EPD(tuple(f"c{i}" for i in range(1, 11)))
    seq = split_to_quads(e, g)
    assert len(seq) == 4
    assert all(len(q) == 4 for q, _ in seq)
    assert seq[-1][1] == apply_epd(g, e)
    # brute-force replay of the quads
    mult = dict(g.pairs)
    for q, _ in seq:
        mult = oracles.apply_walk(mult, q.vertices)
    assert mult == dict(apply_epd(g, e).pairs)


def test_quad_schedule_updates_mult(claisen):
    g, h, a = claisen
    (w,) = partition_walks(build_difference(g, h, a))
    mult = dict(g.pairs)
    quads = quad_schedule(w, mult)
    assert len(quads) == 2
    assert mult == dict(_target(h, a).pairs)


def test_quad_schedule_random_walks():
    rng = random.Random(17)
    for _ in range(300):
        g, h, a = random_instance(rng, max_vertices=12)
        mult = dict(g.pairs)
        for w in partition_walks(build_difference(g, h, a)):
            before = dict(mult)
            quads = quad_schedule(w, mult)
            assert all(len(q) == 4 and q.is_sign_consistent() for q in quads)
            replay = before
            for q in quads:
                replay = oracles.apply_walk(replay, q.vertices)
            assert replay == mult
        assert mult == dict(_target(h, a).pairs)


def test_classify_fixtures(diels_alder, trisulfur):
    g, h, a = diels_alder
    (w,) = partition_walks(build_difference(g, h, a))
    assert {classify_quad(q) for q, _ in split_to_quads(EPD.from_walk(w), g)} == {QuadType.SIMPLE_4_CYCLE}
    assert classify_quad(AlternatingWalk(("b", "b", "c", "c"))) is QuadType.TWO_VERTEX_DOUBLE


def test_classify_triangle_with_loop():
    # lone pair at o moves into a bond, a bond elsewhere is broken
    assert classify_quad(AlternatingWalk(("o", "o", "c", "h"))) is QuadType.TRIANGLE_WITH_LOOP
    assert str(QuadType.TRIANGLE_WITH_LOOP) == "triangle-with-loop"


def test_classify_rejects_malformed():
    with pytest.raises(MalformedWalkError):
        classify_quad(AlternatingWalk(("a", "b", "a", "b")))
    with pytest.raises(MalformedWalkError):
        classify_quad(AlternatingWalk(("a", "b", "c", "d", "e", "f")))


def test_homovalent(diels_alder, trisulfur):
    assert is_homovalent(build_difference(*diels_alder))
    assert not is_homovalent(build_difference(*trisulfur))
    g = diels_alder[0]
    assert is_homovalent(build_difference(g, g, diels_alder[2]))


def test_rewrite_trisulfur(trisulfur):
    g, h, a = trisulfur
    first, second = rewrite_type_iii(EPD(("b", "b", "c", "c")), g)
    assert classify_quad(first) is classify_quad(second) is QuadType.TRIANGLE_WITH_LOOP
    mid = apply_epd(g, first)
    assert len(mid.components()) == 1
    assert (mid.mult("a", "b"), mid.mult("b", "c"), mid.mult("a", "c")) == (1, 1, 1)
    assert apply_epd(mid, second) == _target(h, a)


def test_rewrite_needs_third_atom():
    g = LabeledMultigraph({"b": "S", "c": "S"}, {("b", "b"): 1, ("c", "c"): 1})
    with pytest.raises(RewriteError, match="third atom"):
        rewrite_type_iii(EPD(("b", "b", "c", "c")), g)
    with pytest.raises(RewriteError):
        rewrite_type_iii(EPD(("a", "b", "c", "d")), g)


def test_rewrite_picks_lowest_third_atom():
    g = LabeledMultigraph(
        {"b": "S", "c": "S", "p": "S", "q": "S"},
        {("b", "b"): 1, ("c", "c"): 1, ("b", "q"): 1, ("b", "p"): 1},
    )
    first, second = rewrite_type_iii(EPD(("b", "b", "c", "c")), g)
    assert "p" in first.vertices and "q" not in first.vertices
    mult = oracles.apply_walk(oracles.apply_walk(dict(g.pairs), first.vertices), second.vertices)
    assert mult == oracles.apply_walk(dict(g.pairs), ("b", "b", "c", "c"))
