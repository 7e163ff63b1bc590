"""End-to-end factorization of an atom-atom map into elementary steps."""

from __future__ import annotations

import gc
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .diffgraph import DifferenceGraph, build_difference
from .epd import (
    EPD,
    Counts,
    QuadType,
    _named,
    _schedule,
    apply_steps,
    classify_quad,
    quad_schedule,
)
from .epd import rewrite_type_iii as _rewrite
from .errors import InternalConsistencyError, ParseError, RewriteError
from .multigraph import AtomAtomMap, LabeledMultigraph, Pair, pair_key
from .walks import AlternatingWalk, partition_indices, partition_walks

Components = tuple[tuple[str, ...], ...]


def _touched_components(g: LabeledMultigraph, vertices) -> Components:
    seen: set[str] = set()
    out = []
    for x in sorted(set(vertices)):
        if x in seen:
            continue
        comp = g.component_of(x)
        seen.update(comp)
        out.append(comp)
    return tuple(sorted(out))


def active_parts(g: LabeledMultigraph, h: LabeledMultigraph, e) -> tuple[Components, Components]:
    """Components of ``g`` and of ``h`` that contain an atom moved by ``e``."""
    return _touched_components(g, e.vertices), _touched_components(h, e.vertices)


@dataclass(frozen=True)
class TraceStep:
    epd: EPD
    before: LabeledMultigraph
    after: LabeledMultigraph
    before_components: Components
    after_components: Components
    quad_type: QuadType | None

    @property
    def is_elementary(self) -> bool:
        return 1 <= len(self.before_components) <= 2 and 1 <= len(self.after_components) <= 2


@dataclass(frozen=True)
class MechanismTrace:
    educt: LabeledMultigraph
    product: LabeledMultigraph
    aam: AtomAtomMap
    delta: DifferenceGraph
    walks: tuple[AlternatingWalk, ...]
    steps: tuple[TraceStep, ...]
    # two-atom quads that could not be rewritten when the rewrite was requested
    kept: tuple[EPD, ...] = ()

    @property
    def final(self) -> LabeledMultigraph:
        return self.steps[-1].after if self.steps else self.educt

    def __len__(self):
        return len(self.steps)


def pulled_back(h: LabeledMultigraph, a: AtomAtomMap) -> dict[Pair, int]:
    """Multiplicities of ``h`` expressed on the educt vertex ids."""
    back = a.inverse()
    return {pair_key(back(x), back(y)): m for (x, y), m in h.pairs.items()}


@contextmanager
def _collector_paused():
    # Only acyclic tuples and ints are allocated below; full collections over a
    # growing heap would make the bulk allocation superlinear.
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def decompose(g: LabeledMultigraph, d: DifferenceGraph) -> tuple[list[EPD], dict[Pair, int]]:
    """Length-4 EPDs realising ``d`` on ``g``, and the multiplicities they lead to.

    No intermediate graphs are built, so the cost is linear in the size of
    ``g`` plus the number of Δ-edges.
    """
    with _collector_paused():
        names, walks = partition_indices(d)
        n = len(names)
        idx = {v: i for i, v in enumerate(names)}
        counts = Counts(n)
        for (x, y), m in g.pairs.items():
            counts[idx[x] * n + idx[y]] = m
        out: list[EPD] = []
        for wi, w in enumerate(walks):
            out.extend(_named(_schedule(w, counts), names, wi))
    mult = {}
    for k, m in counts.items():
        if m:
            x, y = divmod(k, n)
            mult[names[x], names[y]] = m
    return out, mult


def explain(g: LabeledMultigraph, h: LabeledMultigraph, a: AtomAtomMap) -> list[EPD]:
    """Length-4 EPDs that turn ``g`` into ``h``, in application order."""
    quads, mult = decompose(g, build_difference(g, h, a))
    if mult != pulled_back(h, a):
        raise InternalConsistencyError("decomposition does not reproduce the product graph")
    return quads


def full_mechanism(
    g: LabeledMultigraph,
    h: LabeledMultigraph,
    a: AtomAtomMap,
    split: bool = True,
    rewrite_type_iii: bool = False,
) -> MechanismTrace:
    """Trace of every EPD with the graphs before and after it.

    With ``split=False`` each partition walk is applied as one EPD.
    ``rewrite_type_iii`` replaces two-atom quads by two triangle-with-loop
    quads where a third bonded atom exists; the others are kept as they are
    and listed in ``MechanismTrace.kept``.
    """
    d = build_difference(g, h, a)
    walks = tuple(partition_walks(d))
    mult = dict(g.pairs)
    epds: list[EPD] = []
    for wi, w in enumerate(walks):
        e = EPD.from_walk(w, wi)
        if split:
            epds.extend(quad_schedule(e, mult))
        else:
            apply_steps(mult, e)
            epds.append(e)

    steps: list[TraceStep] = []
    kept: list[EPD] = []
    cur = g
    for e in epds:
        seq = [e]
        if rewrite_type_iii and len(e) == 4 and classify_quad(e) is QuadType.TWO_VERTEX_DOUBLE:
            try:
                seq = list(_rewrite(e, cur))
            except RewriteError:
                kept.append(e)
        for q in seq:
            m = dict(cur.pairs)
            apply_steps(m, q)
            nxt = cur.with_mult(m)
            before, after = active_parts(cur, nxt, q)
            kind = classify_quad(q) if len(q) == 4 else None
            steps.append(TraceStep(q, cur, nxt, before, after, kind))
            cur = nxt

    if dict(cur.pairs) != pulled_back(h, a):
        raise InternalConsistencyError("trace does not end in the product graph")
    return MechanismTrace(g, h, a, d, walks, tuple(steps), tuple(kept))


# --- formal reactions -------------------------------------------------------


@dataclass(frozen=True)
class FormalReaction:
    """Stoichiometric reaction ``sum a_i X_i -> sum b_i X_i``."""

    educts: Mapping[str, int]
    products: Mapping[str, int]

    def __post_init__(self):
        for side, name in ((self.educts, "educt"), (self.products, "product")):
            if not side:
                raise ValueError(f"{name} side is empty")
            for sp, n in side.items():
                if n < 1:
                    raise ValueError(f"count of {sp} must be >= 1, got {n}")
        object.__setattr__(self, "educts", dict(sorted(self.educts.items())))
        object.__setattr__(self, "products", dict(sorted(self.products.items())))

    @property
    def a(self) -> int:
        return sum(self.educts.values())

    @property
    def b(self) -> int:
        return sum(self.products.values())

    def __str__(self):
        return f"{_side(self.educts)} -> {_side(self.products)}"


def _side(counts: Mapping[str, int]) -> str:
    return " + ".join(sp if n == 1 else f"{n} {sp}" for sp, n in counts.items())


@dataclass(frozen=True)
class ElementaryStep:
    educts: tuple[str, ...]
    products: tuple[str, ...]

    def __str__(self):
        return f"{' + '.join(self.educts)} -> {' + '.join(self.products)}"


def _count(side) -> int:
    if isinstance(side, Mapping):
        return sum(side.values())
    return len(side)


def is_elementary(step) -> bool:
    """One or two molecules on each side, counted with multiplicity."""
    return 1 <= _count(step.educts) <= 2 and 1 <= _count(step.products) <= 2


@dataclass(frozen=True)
class Decomposition:
    reaction: FormalReaction
    steps: tuple[ElementaryStep, ...]
    intermediates: tuple[str, ...] = field(default=())


def _leaves(counts: Mapping[str, int]) -> list[str]:
    return [sp for sp, n in sorted(counts.items()) for _ in range(n)]


def _prefix(species) -> str:
    prefix = "X"
    while any(re.fullmatch(re.escape(prefix) + r"\d+", sp) for sp in species):
        prefix += "_"
    return prefix


def decompose_formal(r: FormalReaction) -> Decomposition:
    """Split ``r`` into steps with at most two molecules per side.

    Educts are joined pairwise along a left-deep chain, products are split
    off along a right-deep chain, and the two chain tops are linked by one
    step so that neither root is ever formed.
    """
    left, right = _leaves(r.educts), _leaves(r.products)
    if len(left) <= 2 and len(right) <= 2:
        return Decomposition(r, (ElementaryStep(tuple(left), tuple(right)),))
    prefix = _prefix(list(r.educts) + list(r.products))
    names: list[str] = []

    def fresh() -> str:
        names.append(f"{prefix}{len(names) + 1}")
        return names[-1]

    steps: list[ElementaryStep] = []
    top = tuple(left)
    if len(left) > 2:
        acc = left[0]
        for sp in left[1:-1]:
            nxt = fresh()
            steps.append(ElementaryStep((acc, sp), (nxt,)))
            acc = nxt
        top = (acc, left[-1])

    if len(right) <= 2:
        steps.append(ElementaryStep(top, tuple(right)))
    else:
        rest = fresh()
        steps.append(ElementaryStep(top, (right[0], rest)))
        for sp in right[1:-2]:
            nxt = fresh()
            steps.append(ElementaryStep((rest,), (sp, nxt)))
            rest = nxt
        steps.append(ElementaryStep((rest,), (right[-2], right[-1])))
    return Decomposition(r, tuple(steps), tuple(names))


_TERM = re.compile(r"\s*(?:(\d+)\s*)?([A-Za-z_][\w'()\[\]]*)\s*")


def _parse_side(text: str, offset: int) -> dict[str, int]:
    counts: dict[str, int] = {}
    pos = 0
    for chunk in text.split("+"):
        m = _TERM.fullmatch(chunk)
        if not m:
            col = offset + pos + len(chunk) - len(chunk.lstrip()) + 1
            raise ParseError(1, col, f"expected '[count] species', got {chunk.strip()!r}")
        n = int(m.group(1)) if m.group(1) else 1
        if n < 1:
            raise ParseError(1, offset + pos + m.start(1) + 1, "stoichiometric count must be >= 1")
        counts[m.group(2)] = counts.get(m.group(2), 0) + n
        pos += len(chunk) + 1
    return counts


def parse_formal(text: str) -> FormalReaction:
    """Read ``"2 A + B -> C + 2 D"``; ``→`` is accepted for the arrow."""
    arrow = "->" if "->" in text else "→"
    parts = text.split(arrow)
    if len(parts) != 2:
        col = text.find(arrow, text.find(arrow) + 1) + 1 if len(parts) > 2 else len(text) + 1
        raise ParseError(1, col, "expected exactly one '->'")
    lhs, rhs = parts
    educts = _parse_side(lhs, 0)
    products = _parse_side(rhs, len(lhs) + len(arrow))
    return FormalReaction(educts, products)


def net_change(steps: Sequence[ElementaryStep]) -> dict[str, int]:
    """Signed stoichiometric sum of the steps (products positive)."""
    out: dict[str, int] = {}
    for st in steps:
        for sp in st.educts:
            out[sp] = out.get(sp, 0) - 1
        for sp in st.products:
            out[sp] = out.get(sp, 0) + 1
    return {sp: n for sp, n in out.items() if n}
