import random

from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus import random_instance
from epdecomp.diffgraph import build_difference, check_balance, degree_split
from epdecomp.epd import EPD, apply_epd, split_epd
from epdecomp.formats import format_reaction, parse_reaction
from epdecomp.mechanism import FormalReaction, decompose, decompose_formal, full_mechanism, net_change
from epdecomp.multigraph import AtomAtomMap, LabeledMultigraph, degrees, validate_aam
from epdecomp.walks import partition_walks

ids = st.sampled_from(list("abcdef"))


@st.composite
def graphs(draw):
    vs = draw(st.lists(ids, min_size=1, max_size=6, unique=True))
    labels = {v: draw(st.sampled_from("CNOS")) for v in vs}
    mult = {}
    for x, y, m in draw(st.lists(st.tuples(st.sampled_from(vs), st.sampled_from(vs), st.integers(1, 3)), max_size=10)):
        k = oracles.key(x, y)
        mult[k] = mult.get(k, 0) + m
    return LabeledMultigraph(labels, mult)


seeds = st.integers(0, 2**32 - 1)


@given(graphs())
def test_handshake(g):
    assert sum(degrees(g).values()) == 2 * g.edge_count()


@given(graphs())
def test_identity_map(g):
    a = AtomAtomMap.identity(g)
    assert validate_aam(g, g, a).ok
    assert build_difference(g, g, a).is_empty()
    assert full_mechanism(g, g, a).final == g


@given(graphs(), st.randoms(use_true_random=False))
def test_map_composition(g, rnd):
    names = list(g.vertices)
    shuffled = names[:]
    rnd.shuffle(shuffled)
    a = AtomAtomMap(dict(zip(names, shuffled)))
    h = g.relabeled(a.pairs)
    assert validate_aam(g, h, a).ok
    assert validate_aam(h, g, a.inverse()).ok
    assert a.compose(a.inverse()) == AtomAtomMap.identity(g)


@given(seeds)
def test_balance_and_even_degrees(seed):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    d = build_difference(g, h, a)
    s = degree_split(d)
    assert check_balance(d)
    assert all(s.d_plus[x] == s.d_minus[x] for x in d.vertices)
    assert all(d.degree(x) % 2 == 0 for x in d.vertices)


@given(seeds)
def test_round_trip(seed):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    back = h.relabeled(a.inverse().pairs)
    assert full_mechanism(g, h, a).final == back
    assert full_mechanism(g, h, a, split=False).final == back


@given(seeds)
def test_partition_valid(seed):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    d = build_difference(g, h, a)
    assert oracles.partition_is_valid(dict(d.delta), partition_walks(d))


@given(seeds)
def test_reaction_text_round_trip(seed):
    inst = random_instance(random.Random(seed), max_vertices=8)
    assert parse_reaction(format_reaction(*inst)) == inst


@given(seeds)
def test_decompose_is_deterministic(seed):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    d = build_difference(g, h, a)
    assert decompose(g, d) == decompose(g, d)


@settings(max_examples=60)
@given(seeds, st.data())
def test_split_soundness(seed, data):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    mult = dict(g.pairs)
    for w in partition_walks(build_difference(g, h, a)):
        cur = g.with_mult(mult)
        whole = apply_epd(cur, EPD.from_walk(w))
        if len(w) >= 6:
            i = data.draw(st.integers(2, len(w) // 2 - 1))
            s = split_epd(EPD.from_walk(w), i, cur)
            assert sorted(map(len, s.order)) == sorted([2 * i, len(w) - 2 * i + 2])
            assert apply_epd(apply_epd(cur, s.order[0]), s.order[1]) == whole
        mult = dict(whole.pairs)


species = st.sampled_from(list("ABCDE"))
sides = st.dictionaries(species, st.integers(1, 4), min_size=1, max_size=4)


@given(sides, sides)
def test_formal_bound_and_telescoping(educts, products):
    r = FormalReaction(educts, products)
    dec = decompose_formal(r)
    assert len(dec.intermediates) <= max(r.a - 2, 0) + max(r.b - 2, 0)
    assert all(1 <= len(s.educts) <= 2 and 1 <= len(s.products) <= 2 for s in dec.steps)
    net = {sp: -n for sp, n in educts.items()}
    for sp, n in products.items():
        net[sp] = net.get(sp, 0) + n
    assert net_change(dec.steps) == {k: v for k, v in net.items() if v}


@given(seeds)
def test_steps_preserve_degrees(seed):
    g, h, a = random_instance(random.Random(seed), max_vertices=12)
    deg = degrees(g)
    for step in full_mechanism(g, h, a, rewrite_type_iii=True).steps:
        assert degrees(step.after) == deg
        assert step.is_elementary
