"""Signed difference multigraph of an atom-atom map."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import InvalidMapError, UnknownVertexError
from .multigraph import AtomAtomMap, LabeledMultigraph, Pair, pair_key, validate_aam


class DifferenceGraph:
    """Per-pair signed change of multiplicity, ``delta = m_H(a(x), a(y)) - m_G(x, y)``.

    One signed integer is stored per unordered pair; ``|delta|`` parallel
    edges of sign ``sign(delta)`` are implied. Vertices without incident
    edges are kept.
    """

    __slots__ = ("_vertices", "_labels", "_delta")

    def __init__(self, vertices, delta: Mapping[Pair, int], labels: Mapping[str, str] | None = None):
        self._vertices = tuple(sorted(vertices))
        known = set(self._vertices)
        self._labels = dict(labels) if labels else {}
        clean: dict[Pair, int] = {}
        for (x, y), d in delta.items():
            for v in (x, y):
                if v not in known:
                    raise UnknownVertexError(v)
            if d:
                key = pair_key(x, y)
                clean[key] = clean.get(key, 0) + d
        self._delta = {k: d for k, d in clean.items() if d}

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def labels(self) -> Mapping[str, str]:
        return MappingProxyType(self._labels)

    @property
    def delta(self) -> Mapping[Pair, int]:
        return MappingProxyType(self._delta)

    def value(self, x: str, y: str) -> int:
        return self._delta.get(pair_key(x, y), 0)

    def mult(self, x: str, y: str) -> int:
        return abs(self.value(x, y))

    def sign(self, x: str, y: str) -> int:
        d = self.value(x, y)
        return (d > 0) - (d < 0)

    def edges(self) -> Iterator[tuple[str, str, int, int]]:
        """``(x, y, multiplicity, sign)`` for every stored pair, sorted."""
        for key in sorted(self._delta):
            d = self._delta[key]
            yield key[0], key[1], abs(d), 1 if d > 0 else -1

    def edge_count(self) -> int:
        return sum(abs(d) for d in self._delta.values())

    def is_empty(self) -> bool:
        return not self._delta

    def degree(self, x: str) -> int:
        if x not in self._vertex_set():
            raise UnknownVertexError(x)
        total = 0
        for (u, v), d in self._delta.items():
            if u == v == x:
                total += 2 * abs(d)
            elif x in (u, v):
                total += abs(d)
        return total

    def _vertex_set(self):
        return set(self._vertices)

    def components(self) -> list[tuple[str, ...]]:
        """Connected components of the edge-carrying part (isolated vertices omitted)."""
        parent: dict[str, str] = {}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for x, y in self._delta:
            parent.setdefault(x, x)
            parent.setdefault(y, y)
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
        groups: dict[str, list[str]] = {}
        for v in parent:
            groups.setdefault(find(v), []).append(v)
        return sorted(tuple(sorted(g)) for g in groups.values())

    @classmethod
    def _trusted(cls, vertices: tuple[str, ...], delta: dict[Pair, int], labels) -> "DifferenceGraph":
        # canonical keys and non-zero values are the caller's responsibility
        d = cls.__new__(cls)
        d._vertices = vertices
        d._labels = dict(labels)
        d._delta = delta
        return d

    def __eq__(self, other):
        if not isinstance(other, DifferenceGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._delta == other._delta

    def __repr__(self):
        return f"DifferenceGraph({len(self._vertices)} vertices, {self.edge_count()} edges)"


@dataclass(frozen=True)
class DegreeSplit:
    """Positive/negative Δ-degrees with (``d_plus``) and without (``*_prime``) loops."""

    d_plus: Mapping[str, int]
    d_minus: Mapping[str, int]
    d_plus_prime: Mapping[str, int]
    d_minus_prime: Mapping[str, int]


def build_difference(g: LabeledMultigraph, h: LabeledMultigraph, a: AtomAtomMap) -> DifferenceGraph:
    report = validate_aam(g, h, a)
    if not report.ok:
        raise InvalidMapError(report)
    back = {y: x for x, y in a.pairs.items()}
    delta: dict[Pair, int] = {key: -m for key, m in g.pairs.items()}
    get = delta.get
    for (u, v), m in h.pairs.items():
        x, y = back[u], back[v]
        key = (x, y) if x <= y else (y, x)
        delta[key] = get(key, 0) + m
    return DifferenceGraph._trusted(g.vertices, {k: v for k, v in delta.items() if v}, g.labels)


def degree_split(d: DifferenceGraph) -> DegreeSplit:
    plus_p = dict.fromkeys(d.vertices, 0)
    minus_p = dict.fromkeys(d.vertices, 0)
    loop_plus = dict.fromkeys(d.vertices, 0)
    loop_minus = dict.fromkeys(d.vertices, 0)
    for (x, y), v in d.delta.items():
        if x == y:
            if v > 0:
                loop_plus[x] += 2 * v
            else:
                loop_minus[x] -= 2 * v
            continue
        side = plus_p if v > 0 else minus_p
        side[x] += abs(v)
        side[y] += abs(v)
    plus = {x: plus_p[x] + loop_plus[x] for x in d.vertices}
    minus = {x: minus_p[x] + loop_minus[x] for x in d.vertices}
    return DegreeSplit(
        MappingProxyType(plus),
        MappingProxyType(minus),
        MappingProxyType(plus_p),
        MappingProxyType(minus_p),
    )


def unbalanced_vertices(d: DifferenceGraph) -> list[tuple[str, int, int]]:
    # d+ - d- at x is the signed sum of incident deltas, loops counted twice
    net: dict[str, int] = {}
    get = net.get
    for (x, y), v in d.delta.items():
        net[x] = get(x, 0) + v
        net[y] = get(y, 0) + v
    if not any(net.values()):
        return []
    split = degree_split(d)
    return [
        (x, split.d_plus[x], split.d_minus[x])
        for x in d.vertices
        if split.d_plus[x] != split.d_minus[x]
    ]


def check_balance(d: DifferenceGraph) -> bool:
    """True iff every vertex gains exactly as many edge ends as it loses."""
    return not unbalanced_vertices(d)


def apply_difference(g: LabeledMultigraph, d: DifferenceGraph) -> dict[Pair, int]:
    """``m_G + delta`` pairwise, on G's vertex ids."""
    out = dict(g.pairs)
    for key, v in d.delta.items():
        out[key] = out.get(key, 0) + v
    return {k: m for k, m in out.items() if m}
