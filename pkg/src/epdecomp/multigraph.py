"""Labeled multigraphs with loops, and atom-atom maps between them.

A molecule (or a complex of several molecules) is a multigraph whose vertices
carry an atom-type label. ``mult(x, y)`` is the bond order between two atoms
and ``mult(x, x)`` is the number of non-bonding electron pairs at ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import UnknownVertexError

Pair = tuple[str, str]


def pair_key(x: str, y: str) -> Pair:
    """Canonical key of the unordered pair {x, y}."""
    return (x, y) if x <= y else (y, x)


class LabeledMultigraph:
    """Immutable vertex-labeled multigraph.

    ``labels`` maps vertex id to atom type. ``mult`` maps unordered pairs to
    positive multiplicities; a pair ``(x, x)`` counts loops. Zero entries are
    dropped, so absent pairs have multiplicity 0.
    """

    __slots__ = ("_labels", "_mult", "_vertices", "_adj")

    def __init__(self, labels: Mapping[str, str], mult: Mapping[Pair, int] | None = None):
        self._labels = dict(labels)
        self._vertices = tuple(sorted(self._labels))
        clean: dict[Pair, int] = {}
        for (x, y), m in (mult or {}).items():
            if x not in self._labels:
                raise UnknownVertexError(x)
            if y not in self._labels:
                raise UnknownVertexError(y)
            if m < 0:
                raise ValueError(f"negative multiplicity {m} for pair {x}-{y}")
            if m:
                key = pair_key(x, y)
                clean[key] = clean.get(key, 0) + m
        self._mult = clean
        self._adj = None

    @classmethod
    def from_edges(cls, labels: Mapping[str, str], edges: Iterable[tuple[str, str, int]]):
        mult: dict[Pair, int] = {}
        for x, y, m in edges:
            key = pair_key(x, y)
            mult[key] = mult.get(key, 0) + m
        return cls(labels, mult)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def labels(self) -> Mapping[str, str]:
        return MappingProxyType(self._labels)

    @property
    def pairs(self) -> Mapping[Pair, int]:
        """Read-only view of the non-zero multiplicities."""
        return MappingProxyType(self._mult)

    def label(self, x: str) -> str:
        try:
            return self._labels[x]
        except KeyError:
            raise UnknownVertexError(x) from None

    def mult(self, x: str, y: str) -> int:
        return self._mult.get(pair_key(x, y), 0)

    def __contains__(self, x) -> bool:
        return x in self._labels

    def __len__(self) -> int:
        return len(self._vertices)

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """Non-zero pairs as ``(x, y, m)`` with ``x <= y``, sorted."""
        for key in sorted(self._mult):
            yield key[0], key[1], self._mult[key]

    def edge_count(self) -> int:
        """Number of edge instances, loops included."""
        return sum(self._mult.values())

    def neighbors(self, x: str) -> list[str]:
        """Sorted distinct neighbours of ``x`` excluding ``x`` itself."""
        if x not in self._labels:
            raise UnknownVertexError(x)
        return sorted(self._adjacency()[x])

    def _adjacency(self) -> dict[str, set[str]]:
        if self._adj is None:
            adj: dict[str, set[str]] = {v: set() for v in self._vertices}
            for x, y in self._mult:
                if x != y:
                    adj[x].add(y)
                    adj[y].add(x)
            self._adj = adj
        return self._adj

    def components(self) -> list[tuple[str, ...]]:
        """Connected components, each sorted, ordered by smallest member."""
        adj = self._adjacency()
        seen: set[str] = set()
        comps = []
        for v in self._vertices:
            if v in seen:
                continue
            seen.add(v)
            stack = [v]
            comp = []
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(tuple(sorted(comp)))
        return comps

    def component_of(self, x: str) -> tuple[str, ...]:
        adj = self._adjacency()
        if x not in adj:
            raise UnknownVertexError(x)
        seen = {x}
        stack = [x]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return tuple(sorted(seen))

    def with_mult(self, mult: Mapping[Pair, int]) -> "LabeledMultigraph":
        """Same vertices and labels, new multiplicities."""
        return LabeledMultigraph(self._labels, mult)

    def relabeled(self, mapping: Mapping[str, str]) -> "LabeledMultigraph":
        """Rename vertices through ``mapping`` (must be a bijection on V)."""
        labels = {mapping[v]: lab for v, lab in self._labels.items()}
        mult = {pair_key(mapping[x], mapping[y]): m for (x, y), m in self._mult.items()}
        return LabeledMultigraph(labels, mult)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledMultigraph):
            return NotImplemented
        return self._labels == other._labels and self._mult == other._mult

    def __hash__(self):
        return hash((tuple(sorted(self._labels.items())), tuple(sorted(self._mult.items()))))

    def __repr__(self) -> str:
        return f"LabeledMultigraph({len(self._vertices)} vertices, {self.edge_count()} edges)"


def degree(g: LabeledMultigraph, x: str) -> int:
    """Sum of bond orders at ``x`` plus twice its loop count."""
    if x not in g:
        raise UnknownVertexError(x)
    total = 0
    for (u, v), m in g.pairs.items():
        if u == v == x:
            total += 2 * m
        elif u == x or v == x:
            total += m
    return total


def degrees(g: LabeledMultigraph) -> dict[str, int]:
    """All vertex degrees in one pass over the edges."""
    deg = dict.fromkeys(g.vertices, 0)
    for (u, v), m in g.pairs.items():
        if u == v:
            deg[u] += 2 * m
        else:
            deg[u] += m
            deg[v] += m
    return deg


@dataclass(frozen=True)
class AtomAtomMap:
    """Vertex correspondence from an educt graph to a product graph."""

    pairs: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "pairs", MappingProxyType(dict(self.pairs)))

    @classmethod
    def identity(cls, g: LabeledMultigraph) -> "AtomAtomMap":
        return cls({v: v for v in g.vertices})

    def __call__(self, x: str) -> str:
        try:
            return self.pairs[x]
        except KeyError:
            raise UnknownVertexError(x) from None

    def __len__(self):
        return len(self.pairs)

    def items(self):
        return sorted(self.pairs.items())

    def inverse(self) -> "AtomAtomMap":
        return AtomAtomMap({v: k for k, v in self.pairs.items()})

    def compose(self, then: "AtomAtomMap") -> "AtomAtomMap":
        """The map ``x -> then(self(x))``."""
        return AtomAtomMap({x: then(y) for x, y in self.pairs.items()})


@dataclass(frozen=True)
class Violation:
    kind: str  # "non-bijective" | "label-mismatch" | "degree-mismatch"
    vertex: str | None
    detail: str

    def __str__(self):
        where = f" at {self.vertex}" if self.vertex is not None else ""
        return f"{self.kind}{where}: {self.detail}"


@dataclass(frozen=True)
class MapReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate_aam(g: LabeledMultigraph, h: LabeledMultigraph, a: AtomAtomMap) -> MapReport:
    """Collect every way in which ``a`` fails to be a label- and degree-preserving bijection."""
    out: list[Violation] = []
    for x in sorted(set(a.pairs) - set(g.vertices)):
        out.append(Violation("non-bijective", x, "source is not an educt vertex"))
    for x in g.vertices:
        if x not in a.pairs:
            out.append(Violation("non-bijective", x, "educt vertex is not mapped"))
    images: dict[str, list[str]] = {}
    for x, y in a.items():
        images.setdefault(y, []).append(x)
    for y, xs in sorted(images.items()):
        if len(xs) > 1:
            out.append(Violation("non-bijective", y, f"product vertex is the image of {', '.join(xs)}"))
        if y not in h:
            out.append(Violation("non-bijective", xs[0], f"image {y} is not a product vertex"))
    for y in h.vertices:
        if y not in images:
            out.append(Violation("non-bijective", None, f"product vertex {y} is not hit"))

    deg_g = degrees(g)
    deg_h = degrees(h)
    for x in g.vertices:
        y = a.pairs.get(x)
        if y is None or y not in h:
            continue
        if g.label(x) != h.label(y):
            out.append(Violation("label-mismatch", x, f"{g.label(x)} -> {h.label(y)} (image {y})"))
        if deg_g[x] != deg_h[y]:
            out.append(Violation("degree-mismatch", x, f"degree {deg_g[x]} -> {deg_h[y]} (image {y})"))
    return MapReport(tuple(out))
