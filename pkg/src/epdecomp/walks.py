"""Alternating closed walks on a difference multigraph.

Every Δ-edge is subdivided twice, giving the simple signed auxiliary graph
in which walks are actually traced. Because subdivision vertices have one
positive and one negative edge, a walk that enters a subdivided path must
run through all of it, so aux walks contract back to walks on Δ.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Sequence

from .diffgraph import DifferenceGraph, unbalanced_vertices
from .errors import InternalConsistencyError, MalformedWalkError, UnbalancedError
from .multigraph import pair_key


@dataclass(frozen=True, slots=True)
class AlternatingWalk:
    """Closed walk given by its vertex cycle ``(x0, x1, ..., x_{2k-1})``.

    Step ``j`` runs from ``x_j`` to ``x_{j+1}`` (indices mod ``2k``); even
    steps are negative, odd steps positive. A step with equal endpoints is a
    loop.
    """

    vertices: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        n = len(self.vertices)
        if n < 4 or n % 2:
            raise MalformedWalkError(f"alternating closed walk needs even length >= 4, got {n}")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def steps(self) -> list[tuple[str, str, int]]:
        vs = self.vertices
        n = len(vs)
        return [(vs[j], vs[(j + 1) % n], -1 if j % 2 == 0 else 1) for j in range(n)]

    def signed_pairs(self) -> dict[tuple[str, str], int]:
        """Net multiplicity change per pair if the walk is applied."""
        out: dict[tuple[str, str], int] = {}
        for x, y, s in self.steps:
            key = pair_key(x, y)
            out[key] = out.get(key, 0) + s
        return {k: v for k, v in out.items() if v}

    def pair_counts(self) -> dict[tuple[str, str], tuple[int, int]]:
        """``pair -> (negative steps, positive steps)``."""
        out: dict[tuple[str, str], list[int]] = {}
        for x, y, s in self.steps:
            c = out.setdefault(pair_key(x, y), [0, 0])
            c[0 if s < 0 else 1] += 1
        return {k: (v[0], v[1]) for k, v in out.items()}

    def is_sign_consistent(self) -> bool:
        """No pair is traversed with both signs."""
        return all(neg == 0 or pos == 0 for neg, pos in self.pair_counts().values())

    def __str__(self):
        parts = []
        for x, y, s in self.steps:
            parts.append(f"{x}{'-' if s < 0 else '+'}{y}")
        return " ".join(parts)


# --- auxiliary graph --------------------------------------------------------


class AuxGraph:
    """Subdivision graph A(Δ).

    Δ-vertices get indices ``0..n-1`` in sorted order. Edge instance ``i``
    (the ``k``-th parallel copy of pair ``(x, y)``, ``x <= y``) owns the
    subdivision vertices ``n + 2i`` (next to ``x``) and ``n + 2i + 1`` (next
    to ``y``) and the aux edges ``3i``, ``3i + 1``, ``3i + 2`` running
    ``x -> s1 -> s2 -> y``. Terminal edges carry the Δ sign, the middle edge
    the opposite one.
    """

    def __init__(self, d: DifferenceGraph):
        self.delta_vertices: tuple[str, ...] = d.vertices
        index = {v: i for i, v in enumerate(self.delta_vertices)}
        n = len(self.delta_vertices)
        self.n = n
        ix: list[int] = []
        iy: list[int] = []
        ik: list[int] = []
        isg: list[int] = []
        # instances are numbered in sorted pair order; bucketing by the
        # smaller endpoint avoids a global sort
        buckets: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (x, y), v in d.delta.items():
            buckets[index[x]].append((index[y], v))
        for xi, bucket in enumerate(buckets):
            bucket.sort()
            for yi, v in bucket:
                if v == 1 or v == -1:
                    ix.append(xi)
                    iy.append(yi)
                    ik.append(0)
                    isg.append(v)
                    continue
                m, s = (v, 1) if v > 0 else (-v, -1)
                ix += [xi] * m
                iy += [yi] * m
                ik += range(m)
                isg += [s] * m
        # CSR adjacency of the Δ-vertices: slot 2v holds the negative aux
        # edges at v, slot 2v+1 the positive ones, each by instance order,
        # i.e. by (neighbour, copy)
        sizes = [0] * (2 * n)
        for xi, yi, sg in zip(ix, iy, isg):
            side = 1 if sg > 0 else 0
            sizes[2 * xi + side] += 1
            sizes[2 * yi + side] += 1
        offsets = array("q", accumulate(sizes, initial=0))
        fill = offsets[:-1]
        ends = array("q", bytes(16 * len(ix)))
        for i, (xi, yi, sg) in enumerate(zip(ix, iy, isg)):
            side = 1 if sg > 0 else 0
            k = 2 * xi + side
            ends[fill[k]] = 3 * i
            fill[k] += 1
            k = 2 * yi + side
            ends[fill[k]] = 3 * i + 2
            fill[k] += 1
        self.offsets = offsets
        self.ends = ends
        self.inst_x = array("q", ix)
        self.inst_y = array("q", iy)
        self.inst_copy = ik
        self.inst_sign = array("b", isg)
        self._edge_arrays = None

    def _arrays(self):
        if self._edge_arrays is None:
            n, count, isg = self.n, len(self.inst_x), self.inst_sign
            eu = [0] * (3 * count)
            ev = [0] * (3 * count)
            es = [0] * (3 * count)
            eu[0::3] = self.inst_x
            eu[1::3] = range(n, n + 2 * count, 2)
            eu[2::3] = range(n + 1, n + 2 * count, 2)
            ev[0::3] = range(n, n + 2 * count, 2)
            ev[1::3] = range(n + 1, n + 2 * count, 2)
            ev[2::3] = self.inst_y
            es[0::3] = isg
            es[1::3] = [-s for s in isg]
            es[2::3] = isg
            self._edge_arrays = (eu, ev, es)
        return self._edge_arrays

    @property
    def edge_u(self) -> list[int]:
        return self._arrays()[0]

    @property
    def edge_v(self) -> list[int]:
        return self._arrays()[1]

    @property
    def edge_sign(self) -> list[int]:
        """Sign of every aux edge; terminal edges of a path carry the Δ sign."""
        return self._arrays()[2]

    @property
    def instances(self) -> list[tuple[int, int, int, int]]:
        """``(x index, y index, parallel copy, sign)`` per Δ-edge instance."""
        return list(zip(self.inst_x, self.inst_y, self.inst_copy, self.inst_sign))

    @property
    def vertex_count(self) -> int:
        return self.n + 2 * len(self.inst_x)

    @property
    def edge_count(self) -> int:
        return 3 * len(self.inst_x)

    def vertex_name(self, v: int):
        """Δ-vertex id, or ``(x, y, k, position)`` for a subdivision vertex."""
        if v < self.n:
            return self.delta_vertices[v]
        i, pos = divmod(v - self.n, 2)
        names = self.delta_vertices
        return (names[self.inst_x[i]], names[self.inst_y[i]], self.inst_copy[i], pos + 1)

    def edges(self) -> list[tuple[object, object, int]]:
        """All aux edges as ``(u, v, sign)`` with readable vertex names."""
        return [
            (self.vertex_name(u), self.vertex_name(v), s)
            for u, v, s in zip(self.edge_u, self.edge_v, self.edge_sign)
        ]

    def adjacent(self, v: int, sign: int) -> list[int]:
        """Aux edges of the given sign at Δ-vertex ``v``, lowest (neighbour, copy) first."""
        k = 2 * v + (1 if sign > 0 else 0)
        return list(self.ends[self.offsets[k] : self.offsets[k + 1]])

    def incident(self, v: int) -> list[int]:
        if v < self.n:
            return sorted(self.adjacent(v, -1) + self.adjacent(v, 1))
        i, pos = divmod(v - self.n, 2)
        return [3 * i, 3 * i + 1] if pos == 0 else [3 * i + 1, 3 * i + 2]

    def other_end(self, e: int, v: int) -> int:
        u, w = self.edge_u[e], self.edge_v[e]
        return w if u == v else u


def build_aux(d: DifferenceGraph) -> AuxGraph:
    return AuxGraph(d)


class EdgeUsage:
    """Residual state while peeling walks off an aux graph."""

    def __init__(self, aux: AuxGraph):
        self.used = bytearray(aux.edge_count)
        # next candidate position in aux.ends for every CSR slot
        self.cursor = aux.offsets[:-1]
        self.start = 0
        self.remaining = aux.edge_count

    def next_free(self, aux: AuxGraph, v: int, side: int) -> int | None:
        """Lowest unused aux edge of the given sign side at Δ-vertex ``v``."""
        k = 2 * v + side
        i, hi = self.cursor[k], aux.offsets[k + 1]
        ends, used = aux.ends, self.used
        while i < hi and used[ends[i]]:
            i += 1
        self.cursor[k] = i
        return ends[i] if i < hi else None


@dataclass(frozen=True)
class AuxWalk:
    """Closed walk in the aux graph: start vertex and aux edge ids in order."""

    start: int
    edges: Sequence[int]


def find_alternating_closed_walk(aux: AuxGraph, used: EdgeUsage) -> AuxWalk | None:
    """Trace one alternating closed walk through unused aux edges.

    Starts at the lowest Δ-vertex that still has an unused negative edge and
    leaves every vertex on the sign opposite to the one it entered with. The
    walk closes once it re-enters the start on a positive edge; re-entering
    on a negative edge just continues through a remaining positive one.
    Returns ``None`` when every edge is used.
    """
    if used.remaining == 0:
        return None
    n = aux.n
    while used.start < n and used.next_free(aux, used.start, 0) is None:
        used.start += 1
    if used.start >= n:
        raise InternalConsistencyError("unused aux edges left but no free negative edge at a Δ-vertex")
    x0 = used.start
    flags = used.used
    ix, iy, isg = aux.inst_x, aux.inst_y, aux.inst_sign
    ends, offsets, cursor = aux.ends, aux.offsets, used.cursor
    walk = array("q")
    cur = x0
    side = 0
    while True:
        # lowest unused edge of the required sign at the Δ-vertex
        k = 2 * cur + side
        j, hi = cursor[k], offsets[k + 1]
        while j < hi and flags[ends[j]]:
            j += 1
        cursor[k] = j
        if j == hi:
            raise MalformedWalkError(
                f"walk stuck at {aux.delta_vertices[cur]!r}: residual graph is unbalanced"
            )
        e = ends[j]
        # subdivision vertices have degree 2, so the rest of the path is forced
        if e % 3 == 0:
            i = e // 3
            mid, far, cur = e + 1, e + 2, iy[i]
        else:
            i = e // 3
            mid, far, cur = e - 1, e - 2, ix[i]
        if flags[mid] or flags[far]:
            raise InternalConsistencyError(f"subdivided path of aux edge {e} is broken")
        flags[e] = flags[mid] = flags[far] = 1
        walk.append(e)
        walk.append(mid)
        walk.append(far)
        # the far terminal edge has the Δ sign of the instance
        if isg[i] > 0:
            if cur == x0:
                break
            side = 0
        else:
            side = 1
    used.remaining -= len(walk)
    return AuxWalk(x0, walk)


def _contract_indices(aux: AuxGraph, w: AuxWalk) -> list[int]:
    if len(w.edges) % 3:
        raise InternalConsistencyError("aux walk length is not a multiple of 3")
    ix, iy, isg = aux.inst_x, aux.inst_y, aux.inst_sign
    edges = w.edges
    seq: list[int] = []
    cur = w.start
    expected = -1
    for j in range(0, len(edges), 3):
        a = edges[j]
        i = a // 3
        if a == 3 * i and edges[j + 1] == a + 1 and edges[j + 2] == a + 2:
            src, dst = ix[i], iy[i]
        elif a == 3 * i + 2 and edges[j + 1] == a - 1 and edges[j + 2] == a - 2:
            src, dst = iy[i], ix[i]
        else:
            raise InternalConsistencyError(f"aux walk covers a partial subdivided path at step {j}")
        if src != cur:
            raise InternalConsistencyError("aux walk is not contiguous")
        if isg[i] != expected:
            raise InternalConsistencyError("contracted walk does not alternate")
        seq.append(src)
        cur = dst
        expected = -expected
    if cur != w.start:
        raise InternalConsistencyError("aux walk is not closed")
    return seq


def contract_walk(aux: AuxGraph, w: AuxWalk) -> AlternatingWalk:
    """Collapse every traversed subdivided path back to its Δ-edge."""
    names = aux.delta_vertices
    return AlternatingWalk(tuple([names[v] for v in _contract_indices(aux, w)]))


def partition_indices(d: DifferenceGraph) -> tuple[tuple[str, ...], list[list[int]]]:
    """Like :func:`partition_walks`, with walks given as indices into ``d.vertices``."""
    bad = unbalanced_vertices(d)
    if bad:
        x, dp, dm = bad[0]
        raise UnbalancedError(x, dp, dm)
    aux = AuxGraph(d)
    used = EdgeUsage(aux)
    out = []
    while True:
        w = find_alternating_closed_walk(aux, used)
        if w is None:
            return aux.delta_vertices, out
        out.append(_contract_indices(aux, w))


def partition_walks(d: DifferenceGraph) -> list[AlternatingWalk]:
    """Split E(Δ) into edge-disjoint alternating closed walks."""
    names, walks = partition_indices(d)
    return [AlternatingWalk(tuple([names[v] for v in w])) for w in walks]


# --- Euler tours ------------------------------------------------------------


def _rotated(vs: Sequence[str], q: int, reverse: bool) -> list[str]:
    """Vertex cycle starting at position ``q``, optionally traversed backwards."""
    n = len(vs)
    if not reverse:
        return [vs[(q + t) % n] for t in range(n)]
    return [vs[(q - t) % n] for t in range(n)]


def _splice(tour: list[str], walk: Sequence[str], v: str) -> list[str]:
    p = tour.index(v)
    n = len(tour)
    # sign of the step that enters tour[p]
    enter = 1 if (p - 1) % n % 2 else -1
    q = list(walk).index(v)
    first = -1 if q % 2 == 0 else 1
    inner = _rotated(walk, q, reverse=(first == enter))
    return tour[: p + 1] + inner[1:] + [v] + tour[p + 1 :]


def merge_euler_tour(walks: Iterable[AlternatingWalk], component: Iterable[str] | None = None) -> AlternatingWalk:
    """Splice walks that share vertices into a single alternating closed walk.

    At a shared vertex the incoming walk is inserted in whichever direction
    keeps the signs alternating. Raises ``MalformedWalkError`` when the walks
    do not form one connected piece or stray outside ``component``.
    """
    pending = list(walks)
    if not pending:
        raise MalformedWalkError("no walks to merge")
    if component is not None:
        allowed = set(component)
        for w in pending:
            stray = set(w.vertices) - allowed
            if stray:
                raise MalformedWalkError(f"walk leaves the component at {sorted(stray)[0]}")
    tour = list(pending.pop(0).vertices)
    on_tour = set(tour)
    while pending:
        for idx, w in enumerate(pending):
            shared = sorted(on_tour.intersection(w.vertices))
            if shared:
                break
        else:
            raise MalformedWalkError("walks span more than one connected component")
        pending.pop(idx)
        tour = _splice(tour, w.vertices, shared[0])
        on_tour.update(w.vertices)
    return AlternatingWalk(tuple(tour))
