"""Command-line interface: ``epdecomp <command> ...``."""

from __future__ import annotations

import argparse
import os
import sys

from .diffgraph import build_difference, unbalanced_vertices
from .epd import is_homovalent
from .errors import EPDError, InvalidMapError, ParseError, UnbalancedError
from .formats import export_dot, parse_reaction, trace_to_json
from .mechanism import decompose_formal, full_mechanism, parse_formal
from .multigraph import validate_aam
from .walks import partition_walks

OK, INVALID, PARSE = 0, 1, 2


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(0, 0, f"cannot read {path}: {exc.strerror}") from None
    return parse_reaction(text)


def _loops(d) -> list[str]:
    return [x for x, y in sorted(d.delta) if x == y]


def cmd_check(args, out) -> int:
    g, h, a = _load(args.file)
    report = validate_aam(g, h, a)
    if not report.ok:
        print(report.describe(), file=sys.stderr)
        return INVALID
    d = build_difference(g, h, a)
    bad = unbalanced_vertices(d)
    if bad:
        for x, dp, dm in bad:
            print(f"unbalanced at {x}: d+={dp} d-={dm}", file=sys.stderr)
        return INVALID
    if is_homovalent(d):
        out.write("balanced; homovalent\n")
    else:
        out.write(f"balanced; not homovalent (lone pairs change at {', '.join(_loops(d))})\n")
    return OK


def cmd_diff(args, out) -> int:
    g, h, a = _load(args.file)
    d = build_difference(g, h, a)
    for x, y, m, s in d.edges():
        out.write(f"{x} {y} {'+' if s > 0 else '-'}{m}\n")
    return OK


def cmd_walks(args, out) -> int:
    g, h, a = _load(args.file)
    for i, w in enumerate(partition_walks(build_difference(g, h, a))):
        out.write(f"walk {i}: {w}\n")
    return OK


def cmd_quads(args, out) -> int:
    g, h, a = _load(args.file)
    trace = full_mechanism(g, h, a)
    for i, st in enumerate(trace.steps, 1):
        out.write(f"{i}. walk {st.epd.origin}: {st.epd}  [{st.quad_type}]\n")
    return OK


def _components(cs) -> str:
    return " | ".join(" ".join(c) for c in cs)


def cmd_mechanism(args, out) -> int:
    g, h, a = _load(args.file)
    trace = full_mechanism(g, h, a, split=not args.no_split, rewrite_type_iii=args.rewrite_type_iii)
    if args.dot_dir:
        os.makedirs(args.dot_dir, exist_ok=True)
        width = max(3, len(str(len(trace.steps))))
        with open(os.path.join(args.dot_dir, "delta.dot"), "w", encoding="utf-8") as fh:
            fh.write(export_dot(trace.delta))
        for i, st in enumerate(trace.steps, 1):
            name = f"step_{i:0{width}d}"
            with open(os.path.join(args.dot_dir, name + ".dot"), "w", encoding="utf-8") as fh:
                fh.write(export_dot(st, name))
    for e in trace.kept:
        print(f"note: two-atom quad {e} has no third bonded atom and was kept", file=sys.stderr)
    if args.json:
        out.write(trace_to_json(trace))
        return OK
    out.write(f"{len(trace.walks)} walk(s), {len(trace.steps)} step(s)\n")
    for i, st in enumerate(trace.steps, 1):
        kind = st.quad_type or f"{len(st.epd)}-walk"
        out.write(f"step {i} [{kind}] {st.epd}\n")
        out.write(f"  educt side:   {_components(st.before_components)}\n")
        out.write(f"  product side: {_components(st.after_components)}\n")
    return OK


def cmd_elementary(args, out) -> int:
    dec = decompose_formal(parse_formal(args.reaction))
    for st in dec.steps:
        out.write(f"{st}\n")
    names = ", ".join(dec.intermediates) if dec.intermediates else "none"
    out.write(f"{len(dec.steps)} step(s), {len(dec.intermediates)} intermediate(s): {names}\n")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="epdecomp", description="Explain atom-atom maps by electron pushing diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, text in (
        ("check", cmd_check, "validate the map and the balance of the difference graph"),
        ("diff", cmd_diff, "print the signed difference graph"),
        ("walks", cmd_walks, "print the alternating closed walks"),
        ("quads", cmd_quads, "print the length-4 EPDs in application order"),
    ):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("file")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("mechanism", help="full trace with intermediate graphs")
    sp.add_argument("file")
    sp.add_argument("--json", action="store_true", help="machine-readable trace on stdout")
    sp.add_argument("--dot-dir", metavar="PATH", help="write one DOT file per step")
    sp.add_argument("--rewrite-type-iii", action="store_true", help="rewrite two-atom quads through a third atom")
    sp.add_argument("--no-split", action="store_true", help="apply each walk as a single EPD")
    sp.set_defaults(func=cmd_mechanism)

    sp = sub.add_parser("elementary", help="decompose a formal reaction such as '2 A + B -> C + 2 D'")
    sp.add_argument("reaction")
    sp.set_defaults(func=cmd_elementary)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    except InvalidMapError as exc:
        print(exc.report.describe(), file=sys.stderr)
        return INVALID
    except (UnbalancedError, EPDError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
