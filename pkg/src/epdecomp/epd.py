"""Electron pushing diagrams: application, splitting into quads, classification."""

from __future__ import annotations

import enum
from array import array
from dataclasses import dataclass, field
from typing import Mapping

from .diffgraph import DifferenceGraph
from .errors import InapplicableEPDError, InternalConsistencyError, MalformedWalkError, RewriteError
from .multigraph import LabeledMultigraph, Pair, pair_key
from .walks import AlternatingWalk

Step = tuple[str, str, int]


@dataclass(frozen=True, eq=False, slots=True)
class EPD(AlternatingWalk):
    """An alternating closed walk read as an electron pushing diagram.

    ``origin`` is the index of the partition walk it came from and ``part``
    its position among the pieces of that walk. ``fictitious`` lists steps
    that add or remove a bond not present in the original walk.
    """

    origin: int = 0
    part: int = 0
    fictitious: tuple[Step, ...] = field(default=())

    @classmethod
    def from_walk(cls, w: AlternatingWalk, origin: int = 0, part: int = 0, fictitious=()) -> "EPD":
        return cls(w.vertices, origin, part, tuple(fictitious))

    @property
    def walk(self) -> AlternatingWalk:
        return AlternatingWalk(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, AlternatingWalk):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)


class QuadType(str, enum.Enum):
    SIMPLE_4_CYCLE = "simple-4-cycle"
    TRIANGLE_WITH_LOOP = "triangle-with-loop"
    TWO_VERTEX_DOUBLE = "two-vertex-double"

    def __str__(self) -> str:
        return self.value


def _negative_counts(w: AlternatingWalk) -> dict[Pair, int]:
    out: dict[Pair, int] = {}
    for x, y, s in w.steps:
        if s < 0:
            key = pair_key(x, y)
            out[key] = out.get(key, 0) + 1
    return out


def check_applicable(mult: Mapping[Pair, int], e) -> None:
    for key, k in sorted(_negative_counts(e).items()):
        have = mult.get(key, 0)
        if have < k:
            raise InapplicableEPDError(key, have, k)


def apply_steps(mult: dict[Pair, int], e) -> None:
    """Apply ``e`` in place to a multiplicity dict, atomically."""
    check_applicable(mult, e)
    for key, v in e.signed_pairs().items():
        m = mult.get(key, 0) + v
        if m:
            mult[key] = m
        else:
            mult.pop(key, None)


def apply_epd(g: LabeledMultigraph, e) -> LabeledMultigraph:
    """Remove one bond per negative step and add one per positive step."""
    for x in set(e.vertices):
        g.label(x)
    mult = dict(g.pairs)
    apply_steps(mult, e)
    return g.with_mult(mult)


# --- splitting --------------------------------------------------------------


@dataclass(frozen=True)
class Split:
    """Result of cutting a walk with a fictitious chord ``x0 - x_{2i-1}``.

    ``head`` adds the chord, ``tail`` removes it; ``order`` is the pair in
    the sequence in which they must be applied to the graph.
    """

    head: EPD
    tail: EPD
    order: tuple[EPD, EPD]

    @property
    def head_first(self) -> bool:
        return self.order[0] is self.head


def _applicable_in_turn(mult, first, second) -> bool:
    m = dict(mult)
    try:
        apply_steps(m, first)
        check_applicable(m, second)
    except InapplicableEPDError:
        return False
    return True


def split_epd(e, i: int, g: LabeledMultigraph) -> Split:
    """Cut a ``2k``-walk into walks of length ``2i`` and ``2(k - i + 1)``.

    The head runs ``x0 .. x_{2i-1}`` and closes with a positive fictitious
    step back to ``x0``; the tail opens with the matching negative step.
    The head goes first when the chord is absent from ``g``; otherwise the
    tail goes first, unless the pair can then not be completed (the tail
    may use up a bond the head still has to remove), in which case the head
    goes first anyway. Head first is always valid.
    """
    k = len(e) // 2
    if not 2 <= i < k:
        raise ValueError(f"split index {i} outside 2..{k - 1} for a walk of length {2 * k}")
    check_applicable(g.pairs, e)
    origin = e.origin if isinstance(e, EPD) else 0
    vs = e.vertices
    x0, xc = vs[0], vs[2 * i - 1]
    head = EPD(vs[: 2 * i], origin, 0, ((xc, x0, 1),))
    tail = EPD((x0,) + vs[2 * i - 1 :], origin, 1, ((x0, xc, -1),))
    if g.mult(x0, xc) == 0:
        order = (head, tail)
    elif _applicable_in_turn(g.pairs, tail, head):
        order = (tail, head)
    else:
        order = (head, tail)
    return Split(head, tail, order)


class Counts(dict):
    """Multiplicities keyed by ``x * n + y`` (``x <= y``) over vertex indices.

    Absent keys read as 0, or from ``base`` when the counts shadow a graph
    keyed by vertex names. Keys that drop to zero are kept so that a
    shadowed value is never read twice.
    """

    __slots__ = ("n", "names", "base")

    def __init__(self, n: int, names=None, base: Mapping[Pair, int] | None = None):
        super().__init__()
        self.n = n
        self.names = names
        self.base = base

    def __missing__(self, k: int) -> int:
        if self.base is None:
            return 0
        x, y = divmod(k, self.n)
        return self.base.get((self.names[x], self.names[y]), 0)

    def pair(self, k: int) -> Pair:
        x, y = divmod(k, self.n)
        return self.names[x], self.names[y]


class _Remainder:
    """Walk still to be split, over vertex indices.

    Step ``j`` of the remaining ring sits at position ``head + j`` of three
    parallel arrays: the vertex it leaves, its pair key, and whether it is
    fictitious. ``neg``/``pos`` count the steps per pair key and sign.
    """

    __slots__ = ("verts", "keys", "fict", "head", "lead", "neg", "pos", "n")

    def __init__(self, vs: list[int], n: int, fictitious=()):
        fict_keys = {(x * n + y if x <= y else y * n + x, s) for x, y, s in fictitious}
        neg: dict[int, int] = {}
        pos: dict[int, int] = {}
        size = len(vs)
        keys = array("q", bytes(8 * size))
        flags = bytearray(size)
        for j in range(size):
            x, y = vs[j], vs[(j + 1) % size]
            key = x * n + y if x <= y else y * n + x
            keys[j] = key
            if j % 2 == 0:
                neg[key] = neg.get(key, 0) + 1
            else:
                pos[key] = pos.get(key, 0) + 1
            if fict_keys and (key, -1 if j % 2 == 0 else 1) in fict_keys:
                flags[j] = 1
        self.verts = list(vs)
        self.keys = keys
        self.fict = flags
        self.head = 0
        self.lead = -1
        self.neg = neg
        self.pos = pos
        self.n = n

    def __len__(self):
        return len(self.verts) - self.head

    def _step(self, j: int) -> tuple[int, int, int]:
        p = self.head + j
        return self.verts[p], self.keys[p], self.fict[p]

    def candidate(self, s: int):
        """Quad peeled at offset ``s``, or ``None`` if it would leave a pair with both signs."""
        size = len(self)
        a, b, c = self._step(s % size), self._step((s + 1) % size), self._step((s + 2) % size)
        r3 = self.verts[self.head + (s + 3) % size]
        lead = self.lead if s % 2 == 0 else -self.lead
        x0 = a[0]
        n = self.n
        chord = r3 * n + x0 if r3 <= x0 else x0 * n + r3
        if chord == a[1] or chord == c[1]:
            return None
        against = self.pos if lead < 0 else self.neg
        if against.get(chord, 0) != (1 if chord == b[1] else 0):
            return None
        return (a, b, c, r3), lead, chord

    def _rotate(self, s: int) -> None:
        h = self.head
        cut = h + s
        self.verts = self.verts[cut:] + self.verts[h:cut]
        self.keys = self.keys[cut:] + self.keys[h:cut]
        self.fict = self.fict[cut:] + self.fict[h:cut]
        self.head = 0

    def peel(self, s: int, parts, lead: int, chord: int) -> tuple[Step, ...]:
        """Replace the three steps at offset ``s`` by the chord; return their fictitious ones."""
        if s:
            self._rotate(s)
        self.lead = lead
        a, b, c, r3 = parts
        neg, pos = self.neg, self.pos
        first, middle = (neg, pos) if lead < 0 else (pos, neg)
        first[a[1]] -= 1
        middle[b[1]] -= 1
        first[c[1]] -= 1
        first[chord] = first.get(chord, 0) + 1
        p = self.head + 2
        self.verts[p] = a[0]
        self.keys[p] = chord
        self.fict[p] = 1
        self.head = p
        if a[2] or b[2] or c[2]:
            steps = ((a[0], b[0], lead), (b[0], c[0], -lead), (c[0], r3, lead))
            return tuple(st for st, part in zip(steps, (a, b, c)) if part[2])
        return ()

    def vertices(self) -> list[int]:
        return self.verts[self.head :]

    def final_fictitious(self) -> tuple[Step, ...]:
        vs = self.vertices()
        flags = self.fict[self.head :]
        size = len(vs)
        out = []
        for j in range(size):
            if flags[j]:
                sg = self.lead if j % 2 == 0 else -self.lead
                out.append((vs[j], vs[(j + 1) % size], sg))
        return tuple(out)


def _apply_quad(mult: Counts, keys: tuple[int, int, int, int]) -> None:
    """Apply a quad given by its four step keys; steps 0 and 2 are negative."""
    k0, k1, k2, k3 = keys
    need = 2 if k0 == k2 else 1
    if mult[k0] < need or mult[k2] < need:
        raise InternalConsistencyError("scheduled quad is not applicable")
    mult[k0] = mult[k0] - 1
    mult[k1] = mult[k1] + 1
    mult[k2] = mult[k2] - 1
    mult[k3] = mult[k3] + 1


def _quad_keys(vs, n: int) -> tuple[int, ...]:
    out = []
    for j in range(4):
        x, y = vs[j], vs[(j + 1) % 4]
        out.append(x * n + y if x <= y else y * n + x)
    return tuple(out)


RawQuad = tuple[tuple[int, int, int, int], tuple[Step, ...]]


def _schedule(vs: list[int], mult: Counts, fictitious=()) -> list[RawQuad]:
    """Quads of the index walk ``vs`` in application order, applied to ``mult``."""
    n = mult.n
    rem = _Remainder(vs, n, fictitious)
    for key in rem.neg.keys() & rem.pos.keys():
        if rem.neg[key] and rem.pos[key]:
            x, y = divmod(key, n)
            raise MalformedWalkError(f"walk traverses pair {x}-{y} with both signs")
    short = [key for key, k in rem.neg.items() if mult[key] < k]
    if short:
        key = min(short)
        raise InapplicableEPDError(divmod(key, n), mult[key], rem.neg[key])
    out: list[RawQuad] = []
    deferred: list[tuple] = []

    while len(rem) > 4:
        cand = rem.candidate(0)
        s = 0
        if cand is None:
            for s in range(1, len(rem)):
                cand = rem.candidate(s)
                if cand is not None:
                    break
            else:
                raise InternalConsistencyError("no sign-consistent split of the walk")
        parts, lead, chord = cand
        # the piece removing the chord may go first only if enough copies exist
        minus_first = mult[chord] >= 1 + rem.neg.get(chord, 0)
        fict = rem.peel(s, parts, lead, chord)
        a, b, c, r3 = parts
        fict += ((r3, a[0], -lead),)
        if lead < 0:
            item = ((a[0], b[0], c[0], r3), (a[1], b[1], c[1], chord), fict)
        else:
            item = ((b[0], c[0], r3, a[0]), (b[1], c[1], chord, a[1]), fict)
        if (lead > 0) == minus_first:
            _apply_quad(mult, item[1])
            out.append((item[0], item[2]))
        else:
            deferred.append(item)
    last = rem.vertices()
    if rem.lead > 0:
        last = last[1:] + last[:1]
    _apply_quad(mult, _quad_keys(last, n))
    out.append((tuple(last), rem.final_fictitious()))
    while deferred:
        quad, keys, fict = deferred.pop()
        _apply_quad(mult, keys)
        out.append((quad, fict))
    return out


def _named(raw: list[RawQuad], names, origin: int) -> list[EPD]:
    out = []
    for part, (quad, fict) in enumerate(raw):
        a, b, c, d = quad
        if len(fict) == 1:
            (x, y, s), = fict
            named_fict = ((names[x], names[y], s),)
        else:
            named_fict = tuple([(names[x], names[y], s) for x, y, s in fict])
        out.append(EPD((names[a], names[b], names[c], names[d]), origin, part, named_fict))
    return out


def quad_schedule(e: AlternatingWalk, mult: dict[Pair, int]) -> list[EPD]:
    """Break ``e`` into length-4 EPDs and apply them to ``mult`` in order.

    Quads are peeled off the front of the walk (``i = 2``); if that would
    produce a quad or a remainder that uses some pair with both signs, the
    next offset around the walk is tried instead. Each peel is ordered
    against the multiplicities in force at that moment: pieces that must
    wait are applied after the rest of the walk, innermost first.
    """
    origin = e.origin if isinstance(e, EPD) else 0
    inherited = e.fictitious if isinstance(e, EPD) else ()
    names = sorted(set(e.vertices))
    idx = {v: i for i, v in enumerate(names)}
    counts = Counts(len(names), names, mult)
    vs = [idx[v] for v in e.vertices]
    fict = tuple((idx[x], idx[y], s) for x, y, s in inherited)
    try:
        raw = _schedule(vs, counts, fict)
    except InapplicableEPDError as exc:
        x, y = exc.pair
        raise InapplicableEPDError((names[x], names[y]), exc.available, exc.required) from None
    except MalformedWalkError:
        if not e.is_sign_consistent():
            bad = min(k for k, (neg, pos) in e.pair_counts().items() if neg and pos)
            raise MalformedWalkError(f"walk traverses {bad[0]}-{bad[1]} with both signs") from None
        raise
    for k, m in counts.items():
        key = counts.pair(k)
        if m:
            mult[key] = m
        else:
            mult.pop(key, None)
    return _named(raw, names, origin)


def split_to_quads(e, g: LabeledMultigraph) -> list[tuple[EPD, LabeledMultigraph]]:
    """Length-4 EPDs in application order, each with the graph it produces."""
    mult = dict(g.pairs)
    quads = quad_schedule(e, mult)
    out = []
    cur = dict(g.pairs)
    for q in quads:
        apply_steps(cur, q)
        out.append((q, g.with_mult(cur)))
    return out


# --- classification ---------------------------------------------------------


def classify_quad(w) -> QuadType:
    if len(w) != 4:
        raise MalformedWalkError(f"quad must have length 4, got {len(w)}")
    if not w.is_sign_consistent():
        raise MalformedWalkError(f"walk {w} traverses a pair with both signs")
    steps = w.steps
    distinct = set(w.vertices)
    loops = [(x, s) for x, y, s in steps if x == y]
    if len(distinct) == 4:
        return QuadType.SIMPLE_4_CYCLE
    if len(distinct) == 3 and len(loops) == 1:
        apex, sign = loops[0]
        opposite = [s for x, y, s in steps if x != y and apex not in (x, y)]
        if opposite == [sign]:
            return QuadType.TRIANGLE_WITH_LOOP
    if len(distinct) == 2 and len(loops) == 2:
        (a, sa), (b, sb) = loops
        links = [s for x, y, s in steps if x != y]
        if a != b and sa == sb and links == [-sa, -sa]:
            return QuadType.TWO_VERTEX_DOUBLE
    raise MalformedWalkError(f"walk {w} matches no quad type")


def is_homovalent(d: DifferenceGraph) -> bool:
    """No atom changes its number of lone pairs, i.e. Δ has no loops."""
    return all(x != y for x, y in d.delta)


def rewrite_type_iii(e, g: LabeledMultigraph) -> tuple[EPD, EPD]:
    """Replace a two-atom quad by two triangle-with-loop quads through a third atom.

    Picks the lowest focal atom ``x`` that is bonded to some atom ``z``
    outside the pair, and the lowest such ``z``. The first quad lowers the
    ``x-z`` bond order, the second restores it.
    """
    if classify_quad(e) is not QuadType.TWO_VERTEX_DOUBLE:
        raise RewriteError(f"walk {e} is not a two-vertex-double quad")
    focal = sorted(set(e.vertices))
    choice = None
    for x in focal:
        zs = [z for z in g.neighbors(x) if z not in focal]
        if zs:
            choice = (x, zs[0])
            break
    if choice is None:
        raise RewriteError(
            f"neither {focal[0]} nor {focal[1]} is bonded to a third atom; "
            "the two-atom quad cannot be rewritten"
        )
    x, z = choice
    y = focal[1] if x == focal[0] else focal[0]
    link = [s for a, b, s in e.steps if a != b][0]
    if link > 0:
        first, second = (x, z, y, y), (x, x, z, y)
    else:
        first, second = (x, z, y, x), (z, y, y, x)
    origin = e.origin if isinstance(e, EPD) else 0
    part = e.part if isinstance(e, EPD) else 0
    a = EPD(first, origin, part)
    b = EPD(second, origin, part)
    mult = dict(g.pairs)
    try:
        apply_steps(mult, a)
        apply_steps(mult, b)
    except InapplicableEPDError as exc:
        raise RewriteError(f"rewrite through {z} is not applicable: {exc}") from exc
    return a, b
