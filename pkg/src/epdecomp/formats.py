"""Reaction files, DOT rendering and the JSON trace."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .diffgraph import DifferenceGraph
from .errors import ParseError
from .mechanism import MechanismTrace, TraceStep
from .multigraph import AtomAtomMap, LabeledMultigraph, Pair, pair_key

SECTIONS = ("educt", "product", "map")


@dataclass
class _GraphSection:
    labels: dict[str, str] = field(default_factory=dict)
    mult: dict[Pair, int] = field(default_factory=dict)
    line: int = 0


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based columns."""
    out = []
    col = 0
    n = len(line)
    while col < n:
        while col < n and line[col].isspace():
            col += 1
        start = col
        while col < n and not line[col].isspace():
            col += 1
        if start < col:
            out.append((line[start:col], start + 1))
    return out


def parse_reaction(text: str) -> tuple[LabeledMultigraph, LabeledMultigraph, AtomAtomMap]:
    """Read the line-oriented reaction format.

    Sections ``educt``, ``product`` and ``map`` each appear once. Graph
    sections hold ``v <id> <label>`` and ``e <id> <id> <mult>`` lines, the
    map holds ``<educt-id> <product-id>`` lines. ``#`` starts a comment line.
    """
    graphs: dict[str, _GraphSection] = {}
    pairs: list[tuple[str, int, str, int, int]] = []
    map_line = 0
    section = None
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        last = lineno
        toks = _tokens(raw)
        if not toks or toks[0][0].startswith("#"):
            continue
        word, col = toks[0]
        if word in SECTIONS:
            if len(toks) > 1:
                raise ParseError(lineno, toks[1][1], f"unexpected text after section header {word!r}")
            if word in graphs or (word == "map" and map_line):
                raise ParseError(lineno, col, f"section {word!r} appears twice")
            section = word
            if word == "map":
                map_line = lineno
            else:
                graphs[word] = _GraphSection(line=lineno)
            continue
        if section is None:
            raise ParseError(lineno, col, "expected a section header (educt, product or map)")
        if section == "map":
            if len(toks) != 2:
                raise ParseError(lineno, col, "map line needs exactly '<educt-id> <product-id>'")
            (x, cx), (y, cy) = toks
            pairs.append((x, cx, y, cy, lineno))
            continue
        _graph_line(graphs[section], toks, lineno)

    for name in SECTIONS:
        if name == "map" and not map_line or name != "map" and name not in graphs:
            raise ParseError(last + 1, 1, f"missing section {name!r}")
    ed, pr = graphs["educt"], graphs["product"]
    forward: dict[str, str] = {}
    hit: dict[str, str] = {}
    for x, cx, y, cy, lineno in pairs:
        if x not in ed.labels:
            raise ParseError(lineno, cx, f"unknown educt vertex {x!r}")
        if y not in pr.labels:
            raise ParseError(lineno, cy, f"unknown product vertex {y!r}")
        if x in forward:
            raise ParseError(lineno, cx, f"educt vertex {x!r} is mapped twice")
        if y in hit:
            raise ParseError(lineno, cy, f"product vertex {y!r} is already the image of {hit[y]!r}")
        forward[x] = y
        hit[y] = x
    for x in sorted(ed.labels):
        if x not in forward:
            raise ParseError(map_line, 1, f"map is not bijective: educt vertex {x!r} is not mapped")
    for y in sorted(pr.labels):
        if y not in hit:
            raise ParseError(map_line, 1, f"map is not bijective: product vertex {y!r} is not hit")
    g = LabeledMultigraph(ed.labels, ed.mult)
    h = LabeledMultigraph(pr.labels, pr.mult)
    return g, h, AtomAtomMap(forward)


def _graph_line(sec: _GraphSection, toks, lineno: int) -> None:
    kind, col = toks[0]
    if kind == "v":
        if len(toks) != 3:
            raise ParseError(lineno, col, "vertex line needs exactly 'v <id> <label>'")
        (vid, cv), (label, _) = toks[1], toks[2]
        if vid in sec.labels:
            raise ParseError(lineno, cv, f"duplicate vertex {vid!r}")
        sec.labels[vid] = label
    elif kind == "e":
        if len(toks) != 4:
            raise ParseError(lineno, col, "edge line needs exactly 'e <id> <id> <mult>'")
        (x, cx), (y, cy), (m, cm) = toks[1], toks[2], toks[3]
        for v, cv in ((x, cx), (y, cy)):
            if v not in sec.labels:
                raise ParseError(lineno, cv, f"unknown vertex {v!r}")
        try:
            k = int(m)
        except ValueError:
            raise ParseError(lineno, cm, f"multiplicity {m!r} is not an integer") from None
        if k < 0:
            raise ParseError(lineno, cm, f"negative multiplicity {k}")
        key = pair_key(x, y)
        if key in sec.mult:
            raise ParseError(lineno, col, f"duplicate edge line for pair {key[0]}-{key[1]}")
        sec.mult[key] = k
    else:
        raise ParseError(lineno, col, f"unknown line type {kind!r} (expected 'v' or 'e')")


def example_names() -> list[str]:
    """Reaction files shipped with the package."""
    data = resources.files("epdecomp") / "data"
    return sorted(p.name[: -len(".rxn")] for p in data.iterdir() if p.name.endswith(".rxn"))


def example_text(name: str) -> str:
    return (resources.files("epdecomp") / "data" / f"{name}.rxn").read_text(encoding="utf-8")


def load_example(name: str) -> tuple[LabeledMultigraph, LabeledMultigraph, AtomAtomMap]:
    """Parse a shipped reaction, e.g. ``load_example("diels_alder")``."""
    return parse_reaction(example_text(name))


def format_reaction(g: LabeledMultigraph, h: LabeledMultigraph, a: AtomAtomMap) -> str:
    out = []
    for name, graph in (("educt", g), ("product", h)):
        out.append(name)
        for v in graph.vertices:
            out.append(f"v {v} {graph.label(v)}")
        for x, y, m in graph.edges():
            out.append(f"e {x} {y} {m}")
    out.append("map")
    for x, y in a.items():
        out.append(f"{x} {y}")
    return "\n".join(out) + "\n"


# --- DOT --------------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(name: str, vertices, labels, edges) -> str:
    """``edges`` holds ``(x, y, count, colour)`` in output order."""
    lines = [f"graph {_q(name)} {{", "  node [shape=circle];"]
    for v in vertices:
        lab = labels.get(v)
        text = f"{v}:{lab}" if lab is not None else v
        lines.append(f"  {_q(v)} [label={_q(text)}];")
    for x, y, count, colour in edges:
        for _ in range(count):
            lines.append(f"  {_q(x)} -- {_q(y)} [color={colour}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, name: str | None = None) -> str:
    """DOT text for a difference graph or a single trace step.

    Added bonds are blue and removed bonds red, one line per unit of
    multiplicity. A step is drawn on its active parts, with the bonds it
    leaves alone in black.
    """
    if isinstance(obj, DifferenceGraph):
        edges = [(x, y, m, "blue" if s > 0 else "red") for x, y, m, s in obj.edges()]
        return _dot(name or "delta", obj.vertices, obj.labels, edges)
    if isinstance(obj, TraceStep):
        keep = sorted({v for comp in obj.before_components for v in comp})
        inside = set(keep)
        before, after = obj.before.pairs, obj.after.pairs
        keys = sorted(k for k in set(before) | set(after) if k[0] in inside)
        edges = []
        for key in keys:
            m0, m1 = before.get(key, 0), after.get(key, 0)
            edges.append((key[0], key[1], min(m0, m1), "black"))
            if m0 > m1:
                edges.append((key[0], key[1], m0 - m1, "red"))
            elif m1 > m0:
                edges.append((key[0], key[1], m1 - m0, "blue"))
        return _dot(name or "step", keep, obj.before.labels, edges)
    raise TypeError(f"cannot render {type(obj).__name__} as DOT")


# --- JSON -------------------------------------------------------------------


def _graph_json(g: LabeledMultigraph) -> dict:
    return {
        "vertices": [[v, g.label(v)] for v in g.vertices],
        "edges": [[x, y, m] for x, y, m in g.edges()],
    }


def trace_to_dict(t: MechanismTrace) -> dict:
    return {
        "educt": _graph_json(t.educt),
        "product": _graph_json(t.product),
        "map": [[x, y] for x, y in t.aam.items()],
        "delta": [[x, y, s * m] for x, y, m, s in t.delta.edges()],
        "walks": [list(w.vertices) for w in t.walks],
        "steps": [
            {
                "epd": list(st.epd.vertices),
                "walk": st.epd.origin,
                "quad_type": st.quad_type.value if st.quad_type else None,
                "before_components": [list(c) for c in st.before_components],
                "after_components": [list(c) for c in st.after_components],
            }
            for st in t.steps
        ],
    }


def trace_to_json(t: MechanismTrace) -> str:
    return json.dumps(trace_to_dict(t), indent=2) + "\n"


def graph_from_json(obj: dict) -> LabeledMultigraph:
    labels = {v: lab for v, lab in obj["vertices"]}
    return LabeledMultigraph.from_edges(labels, [(x, y, m) for x, y, m in obj["edges"]])
