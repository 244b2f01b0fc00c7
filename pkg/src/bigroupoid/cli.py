"""JSON documents and the `bigroupoid` command line.

A document is ``{"format_version": 1, "kind": ..., "payload": ...}``.  Cell
ids are JSON strings, integers, or arrays (read back as tuples).  Every map is
written as a sorted list of entries so that printing is deterministic.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import model
from .core import (
    ClassError,
    ConeError,
    ConstructionError,
    FiniteBigroupoid,
    FiniteGroupoid,
    GroupoidFunctor,
    Icon,
    PreconditionError,
    ProductGroupoid,
    Pseudofunctor,
    StructuralError,
    icon_from_cells,
    ordered,
    validate_bigroupoid,
    validate_icon,
    validate_pseudofunctor,
)
from .terms import (
    Evaluator,
    Graph,
    OneCell,
    canonical_2cell,
    infer_graph,
    normalize,
    parse_term,
    rewrite_R,
    strictify,
    to_string,
)

FORMAT_VERSION = 1
KINDS = ("graph", "bigroupoid", "pseudofunctor", "icon", "square", "term")


class DocumentError(ValueError):
    """A document that cannot be read; `where` names the offending location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------- ids


def encode_id(x):
    if isinstance(x, tuple):
        return [encode_id(v) for v in x]
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise TypeError(f"cell id {x!r} cannot be serialized")


def decode_id(x, where: str):
    if isinstance(x, list):
        return tuple(decode_id(v, f"{where}[{i}]") for i, v in enumerate(x))
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise DocumentError(where, f"not a cell id: {x!r}")


def _entries(table: dict, width: int = 2):
    """Sorted entries of a table; tuple keys of the given width are spread out."""
    out = []
    for k in ordered(table):
        key = list(k) if width > 2 else [k]
        out.append([encode_id(v) for v in key] + [encode_id(table[k])])
    return out


# ---------------------------------------------------------------- encoding


def _groupoid_payload(G: FiniteGroupoid) -> dict:
    return {
        "objects": [encode_id(x) for x in ordered(G.objects)],
        "arrows": [[encode_id(a), encode_id(s), encode_id(t)] for a, (s, t) in
                   ((a, G.arrows[a]) for a in ordered(G.arrows))],
        "identity": _entries(G.identity),
        "compose": [[encode_id(g), encode_id(f), encode_id(h)] for (g, f), h in
                    ((k, G.compose_table[k]) for k in ordered(G.compose_table))],
        "inverse": _entries(G.inverse_table),
    }


def _functor_payload(F: GroupoidFunctor) -> dict:
    return {"objects": _entries(F.object_map), "arrows": _entries(F.arrow_map)}


def bigroupoid_payload(B: FiniteBigroupoid) -> dict:
    return {
        "zero_cells": [encode_id(A) for A in ordered(B.zero_cells)],
        "homs": [dict(cells=encode_id(k), **_groupoid_payload(B.hom[k])) for k in ordered(B.hom)],
        "comp": [dict(cells=encode_id(k), **_functor_payload(B.comp[k])) for k in ordered(B.comp)],
        "unit": _entries(B.unit),
        "inv": [dict(cells=encode_id(k), **_functor_payload(B.inv[k])) for k in ordered(B.inv)],
        "assoc": _entries(B.assoc, 4),
        "lunit": _entries(B.lunit),
        "runit": _entries(B.runit),
        "counit": _entries(B.counit),
        "unit2": _entries(B.unit2),
    }


def pseudofunctor_payload(F: Pseudofunctor) -> dict:
    return {
        "source": bigroupoid_payload(F.source),
        "target": bigroupoid_payload(F.target),
        "zero_map": _entries(F.zero_map),
        "local": [dict(cells=encode_id(k), **_functor_payload(F.local[k])) for k in ordered(F.local)],
        "phi_comp": _entries(F.phi_comp, 3),
        "phi_unit": _entries(F.phi_unit),
        "phi_inv": _entries(F.phi_inv),
    }


def graph_payload(g: Graph) -> dict:
    return {
        "nodes": [encode_id(n) for n in ordered(g.nodes)],
        "edges": [[encode_id(e), encode_id(s), encode_id(t)] for e, (s, t) in
                  ((e, g.edges[e]) for e in ordered(g.edges))],
    }


def to_document(obj) -> dict:
    if isinstance(obj, FiniteBigroupoid):
        kind, payload = "bigroupoid", bigroupoid_payload(obj)
    elif isinstance(obj, Pseudofunctor):
        kind, payload = "pseudofunctor", pseudofunctor_payload(obj)
    elif isinstance(obj, Icon):
        kind = "icon"
        payload = {
            "source": pseudofunctor_payload(obj.source),
            "target": pseudofunctor_payload(obj.target),
            "components": _entries(obj._c),
        }
    elif isinstance(obj, model.LiftingSquare):
        kind = "square"
        payload = {k: pseudofunctor_payload(getattr(obj, k)) for k in ("top", "left", "right", "bottom")}
    elif isinstance(obj, Graph):
        kind, payload = "graph", graph_payload(obj)
    elif isinstance(obj, OneCell):
        kind, payload = "term", {"term": to_string(obj)}
    else:
        raise TypeError(f"no document kind for {type(obj).__name__}")
    return {"format_version": FORMAT_VERSION, "kind": kind, "payload": payload}


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------- decoding


def _field(node, key, where):
    if not isinstance(node, dict):
        raise DocumentError(where, "expected an object")
    if key not in node:
        raise DocumentError(where, f"missing field {key!r}")
    return node[key]


def _list(node, where):
    if not isinstance(node, list):
        raise DocumentError(where, "expected an array")
    return node


def _ids(node, where):
    return [decode_id(v, f"{where}[{i}]") for i, v in enumerate(_list(node, where))]


def _rows(node, where, width):
    rows = []
    for i, row in enumerate(_list(node, where)):
        at = f"{where}[{i}]"
        if not isinstance(row, list) or len(row) != width:
            raise DocumentError(at, f"expected an entry of {width} values")
        rows.append(tuple(decode_id(v, f"{at}[{j}]") for j, v in enumerate(row)))
    return rows


def _table(node, where, width=2):
    out = {}
    for i, row in enumerate(_rows(node, where, width)):
        key = row[0] if width == 2 else row[:-1]
        if key in out:
            raise DocumentError(f"{where}[{i}]", f"duplicate key {key!r}")
        out[key] = row[-1]
    return out


def _build(where, make):
    try:
        return make()
    except StructuralError as exc:
        raise DocumentError(where, str(exc)) from None
    except KeyError as exc:
        raise DocumentError(where, f"unresolved id {exc.args[0]!r}") from None


def _groupoid(node, where):
    objects = _ids(_field(node, "objects", where), f"{where}.objects")
    arrows = {a: (s, t) for a, s, t in _rows(_field(node, "arrows", where), f"{where}.arrows", 3)}
    identity = _table(_field(node, "identity", where), f"{where}.identity")
    compose = {(g, f): h for g, f, h in _rows(_field(node, "compose", where), f"{where}.compose", 3)}
    inverse = _table(_field(node, "inverse", where), f"{where}.inverse")
    return _build(where, lambda: FiniteGroupoid(objects, arrows, identity, compose, inverse))


def _functor(node, where, source, target):
    om = _table(_field(node, "objects", where), f"{where}.objects")
    am = _table(_field(node, "arrows", where), f"{where}.arrows")
    return _build(where, lambda: GroupoidFunctor(source, target, om, am))


def _keyed(node, where, width):
    """[{cells: key, ...}] -> [(key, entry, location)]"""
    out = []
    for i, entry in enumerate(_list(node, where)):
        at = f"{where}[{i}]"
        key = decode_id(_field(entry, "cells", at), f"{at}.cells")
        if not isinstance(key, tuple) or len(key) != width:
            raise DocumentError(f"{at}.cells", f"expected {width} 0-cells")
        out.append((key, entry, at))
    return out


def parse_bigroupoid(node, where="payload") -> FiniteBigroupoid:
    zero = _ids(_field(node, "zero_cells", where), f"{where}.zero_cells")
    hom = {}
    for key, entry, at in _keyed(_field(node, "homs", where), f"{where}.homs", 2):
        hom[key] = _groupoid(entry, at)
    comp = {}
    for key, entry, at in _keyed(_field(node, "comp", where), f"{where}.comp", 3):
        A, B, C = key
        if (B, C) not in hom or (A, B) not in hom or (A, C) not in hom:
            raise DocumentError(f"{at}.cells", "composition between undeclared hom-groupoids")
        comp[key] = _functor(entry, at, ProductGroupoid(hom[(B, C)], hom[(A, B)]), hom[(A, C)])
    inv = {}
    for key, entry, at in _keyed(_field(node, "inv", where), f"{where}.inv", 2):
        A, B = key
        if (A, B) not in hom or (B, A) not in hom:
            raise DocumentError(f"{at}.cells", "inverse between undeclared hom-groupoids")
        inv[key] = _functor(entry, at, hom[(A, B)], hom[(B, A)])
    tables = {"unit": _table(_field(node, "unit", where), f"{where}.unit"),
              "assoc": _table(_field(node, "assoc", where), f"{where}.assoc", 4)}
    for name in ("lunit", "runit", "counit", "unit2"):
        tables[name] = _table(_field(node, name, where), f"{where}.{name}")
    return _build(where, lambda: FiniteBigroupoid(
        zero, hom, comp, tables["unit"], inv, tables["assoc"], tables["lunit"], tables["runit"],
        tables["counit"], tables["unit2"],
    ))


def parse_pseudofunctor(node, where="payload") -> Pseudofunctor:
    S = parse_bigroupoid(_field(node, "source", where), f"{where}.source")
    T = parse_bigroupoid(_field(node, "target", where), f"{where}.target")
    if S == T:
        T = S
    zero = _table(_field(node, "zero_map", where), f"{where}.zero_map")
    local = {}
    for key, entry, at in _keyed(_field(node, "local", where), f"{where}.local", 2):
        A, B = key
        if key not in S.hom:
            raise DocumentError(f"{at}.cells", "no such hom-groupoid in the source")
        tk = (zero.get(A), zero.get(B))
        if tk not in T.hom:
            raise DocumentError(f"{at}.cells", "image hom-groupoid missing from the target")
        local[key] = _functor(entry, at, S.hom[key], T.hom[tk])
    phi_comp = _table(_field(node, "phi_comp", where), f"{where}.phi_comp", 3)
    phi_unit = _table(_field(node, "phi_unit", where), f"{where}.phi_unit")
    phi_inv = _table(_field(node, "phi_inv", where), f"{where}.phi_inv")
    return _build(where, lambda: Pseudofunctor(S, T, zero, local, phi_comp, phi_unit, phi_inv))


def parse_graph(node, where="payload") -> Graph:
    nodes = _ids(_field(node, "nodes", where), f"{where}.nodes")
    edges = {e: (s, t) for e, s, t in _rows(_field(node, "edges", where), f"{where}.edges", 3)}
    return _build(where, lambda: Graph(nodes, edges))


def parse_term_payload(node, where="payload") -> OneCell:
    text = _field(node, "term", where)
    if not isinstance(text, str):
        raise DocumentError(f"{where}.term", "expected a string")
    return _build(f"{where}.term", lambda: parse_term(text))


def from_document(doc):
    if not isinstance(doc, dict):
        raise DocumentError("document", "expected an object")
    version = _field(doc, "format_version", "document")
    if version != FORMAT_VERSION:
        raise DocumentError("format_version", f"unsupported version {version!r}")
    kind = _field(doc, "kind", "document")
    if kind not in KINDS:
        raise DocumentError("kind", f"unknown kind {kind!r}")
    node = _field(doc, "payload", "document")
    if kind == "bigroupoid":
        return parse_bigroupoid(node)
    if kind == "pseudofunctor":
        return parse_pseudofunctor(node)
    if kind == "graph":
        return parse_graph(node)
    if kind == "term":
        return parse_term_payload(node)
    if kind == "icon":
        F = parse_pseudofunctor(_field(node, "source", "payload"), "payload.source")
        G = parse_pseudofunctor(_field(node, "target", "payload"), "payload.target")
        cells = _table(_field(node, "components", "payload"), "payload.components")
        return _build("payload.components", lambda: icon_from_cells(F, G, cells))
    legs = {k: parse_pseudofunctor(_field(node, k, "payload"), f"payload.{k}")
            for k in ("top", "left", "right", "bottom")}
    return _build("payload", lambda: model.LiftingSquare(**legs))


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return from_document(doc)


def read_document(path: str, kind: str | None = None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(path, f"cannot read file ({exc.strerror})") from None
    obj = loads(text)
    if kind is not None:
        got = to_document_kind(obj)
        if got != kind:
            raise DocumentError(f"{path}: kind", f"expected a {kind} document, found {got}")
    return obj


def to_document_kind(obj) -> str:
    for kind, cls in (("bigroupoid", FiniteBigroupoid), ("pseudofunctor", Pseudofunctor), ("icon", Icon),
                      ("square", model.LiftingSquare), ("graph", Graph), ("term", OneCell)):
        if isinstance(obj, cls):
            return kind
    raise TypeError(type(obj).__name__)


# ---------------------------------------------------------------- reports


class _Report:
    def __init__(self, out):
        self.out = out

    def __call__(self, key, value):
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.out.write(f"{key}: {value}\n")


def _violations(report, say, verbose):
    say("VIOLATIONS", len(report.violations))
    shown = report.violations if verbose else report.violations[:20]
    for tag, where in shown:
        say("VIOLATION", f"{tag} {json.dumps(encode_id(tuple(where)))}")


def _classification(say, prefix, c: model.Classification):
    for name in ("fibration", "cofibration", "weak_equivalence", "trivial_fibration", "trivial_cofibration"):
        say(f"{prefix}{name.upper()}", getattr(c, f"is_{name}"))


def cmd_validate(args, say):
    obj = read_document(args.file)
    kind = to_document_kind(obj)
    say("KIND", kind)
    if kind == "bigroupoid":
        report = validate_bigroupoid(obj)
    elif kind == "pseudofunctor":
        report = validate_pseudofunctor(obj)
    elif kind == "icon":
        report = validate_icon(obj)
    elif kind == "square":
        bad = []
        for name in ("top", "left", "right", "bottom"):
            bad.extend((tag, (name,) + tuple(w)) for tag, w in validate_pseudofunctor(getattr(obj, name)).violations)
        report = type(validate_bigroupoid(obj.top.source)).of(bad)
    else:
        say("STATUS", "ok")
        return 0
    say("STATUS", "ok" if report.ok else "invalid")
    _violations(report, say, args.verbose)
    return 0 if report.ok else 1


def cmd_classify(args, say):
    F = read_document(args.file, "pseudofunctor")
    _classification(say, "", model.classify(F))
    return 0


def _emit(obj):
    sys.stdout.write(dumps(obj))


def cmd_factor(args, say):
    F = read_document(args.file, "pseudofunctor")
    if args.wfs == "cof-trivfib":
        fac = model.factor_cof_trivfib(F)
    else:
        fac = model.factor_trivcof_fib(F)
    if args.emit:
        _emit(getattr(fac, args.emit))
        return 0
    say("WFS", args.wfs)
    say("MIDDLE_SIZES", " ".join(map(str, fac.middle.sizes())))
    say("RECOMPOSES", model._compose(fac.second, fac.first).same_maps(F))
    _classification(say, "FIRST_", fac.first_class)
    _classification(say, "SECOND_", fac.second_class)
    if fac.retraction is not None:
        say("RETRACTION_SPLITS", model._compose(fac.retraction, fac.first).same_maps(
            model.identity_pseudofunctor(F.source)))
    return 0


def cmd_lift(args, say):
    sq = read_document(args.file, "square")
    solver = model.lift_cof_trivfib if args.wfs == "cof-trivfib" else model.lift_trivcof_fib
    try:
        L = solver(sq)
    except ClassError as exc:
        say("LIFT", "none")
        say("REASON", str(exc))
        return 1
    if args.emit:
        _emit(L)
        return 0
    say("LIFT", "found")
    say("UPPER_TRIANGLE", model._compose(L, sq.left).same_maps(sq.top))
    say("LOWER_TRIANGLE", model._compose(sq.right, L).same_maps(sq.bottom))
    return 0


def cmd_path_object(args, say):
    B = read_document(args.file, "bigroupoid")
    po = model.path_object(B)
    if args.emit:
        _emit(getattr(po, args.emit))
        return 0
    say("PATH_SIZES", " ".join(map(str, po.PB.sizes())))
    say("VALID", validate_bigroupoid(po.PB).ok)
    say("FACTORS_DIAGONAL", model._compose(po.ST, po.R).same_maps(po.diagonal))
    say("R_WEAK_EQUIVALENCE", model.is_weak_equivalence(po.R))
    say("ST_FIBRATION", model.is_fibration(po.ST))
    return 0


def cmd_pullback(args, say):
    F = read_document(args.fibration, "pseudofunctor")
    G = read_document(args.other, "pseudofunctor")
    try:
        pb = model.pullback_fibration(F, G)
    except ClassError as exc:
        say("PULLBACK", "none")
        say("REASON", str(exc))
        return 1
    if args.emit:
        _emit(pb.A if args.emit == "object" else getattr(pb, args.emit))
        return 0
    say("PULLBACK_SIZES", " ".join(map(str, pb.A.sizes())))
    say("COMMUTES", model._compose(F, pb.R).same_maps(model._compose(G, pb.P)))
    say("P_STRICT", pb.P.is_strict())
    say("P_FIBRATION", model.is_fibration(pb.P))
    return 0


def _parse(text, what):
    try:
        return parse_term(text)
    except StructuralError as exc:
        raise DocumentError(what, str(exc)) from None


def cmd_reduce(args, say):
    u = _parse(args.term, "term")
    g = _build("term", lambda: infer_graph(u))
    ru, _ = rewrite_R(u, g)
    m, _, trace = normalize(ru, g)
    say("TERM", to_string(u))
    say("STRICT", " ".join(f"{e}{'' if s > 0 else '*'}" for e, s in strictify(u)) or "1")
    say("R_FORM", to_string(ru))
    say("MINIMAL", to_string(m))
    say("LENGTH", len(trace) and trace[-1])
    say("STEPS", len(trace) - 1)
    return 0


def cmd_coherence(args, say):
    u = _parse(args.u, "first term")
    v = _parse(args.v, "second term")
    try:
        g = infer_graph(u, v, parallel=True)
    except StructuralError as exc:
        say("WITNESS", "NONE")
        say("REASON", str(exc))
        return 1
    w = canonical_2cell(u, v, g)
    if w is None:
        say("WITNESS", "NONE")
        return 1
    say("SOURCE", to_string(w.src))
    say("TARGET", to_string(w.tgt))
    say("WITNESS", to_string(w.term))
    return 0


def _read_assignment(path):
    try:
        with open(path, encoding="utf-8") as fh:
            node = json.load(fh)
    except OSError as exc:
        raise DocumentError(path, f"cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno} column {exc.colno}", exc.msg) from None
    out = []
    for part in ("nodes", "edges"):
        table = _field(node, part, path)
        if not isinstance(table, dict):
            raise DocumentError(f"{path}.{part}", "expected an object mapping names to cells")
        out.append({k: decode_id(v, f"{path}.{part}.{k}") for k, v in table.items()})
    return out


def cmd_eval(args, say):
    B = read_document(args.file, "bigroupoid")
    nodes, edges = _read_assignment(args.assign)
    u = _parse(args.term, "term")
    ev = Evaluator(B, nodes, edges)
    value = _build("term", lambda: ev.one(u))
    say("TERM", to_string(u))
    say("VALUE", json.dumps(encode_id(value)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigroupoid", description="Finite bigroupoids and their model structure.")
    p.add_argument("--verbose", action="store_true", help="list every violation")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", dest="verbose_here", help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    sub_add = sub.add_parser
    sub.add_parser = lambda *a, **k: sub_add(*a, parents=[common], **k)
    s = sub.add_parser("validate", help="validate any document")
    s.add_argument("file")
    s.set_defaults(run=cmd_validate)
    s = sub.add_parser("classify", help="classify a morphism")
    s.add_argument("file")
    s.set_defaults(run=cmd_classify)
    wfs = ("cof-trivfib", "trivcof-fib")
    s = sub.add_parser("factor", help="factor a morphism")
    s.add_argument("--wfs", choices=wfs, required=True)
    s.add_argument("--emit", choices=("middle", "first", "second"))
    s.add_argument("file")
    s.set_defaults(run=cmd_factor)
    s = sub.add_parser("lift", help="solve a lifting square")
    s.add_argument("--wfs", choices=wfs, required=True)
    s.add_argument("--emit", action="store_true", help="print the diagonal as a document")
    s.add_argument("file")
    s.set_defaults(run=cmd_lift)
    s = sub.add_parser("path-object", help="path object of a bigroupoid")
    s.add_argument("--emit", choices=("PB", "R", "S", "T", "ST"))
    s.add_argument("file")
    s.set_defaults(run=cmd_path_object)
    s = sub.add_parser("pullback", help="pullback of a fibration along a morphism")
    s.add_argument("--emit", choices=("object", "P", "R"))
    s.add_argument("fibration")
    s.add_argument("other")
    s.set_defaults(run=cmd_pullback)
    s = sub.add_parser("reduce", help="minimal form of a 1-cell term")
    s.add_argument("term")
    s.set_defaults(run=cmd_reduce)
    s = sub.add_parser("coherence", help="canonical 2-cell between two terms")
    s.add_argument("u")
    s.add_argument("v")
    s.set_defaults(run=cmd_coherence)
    s = sub.add_parser("eval", help="evaluate a term in a bigroupoid")
    s.add_argument("file")
    s.add_argument("--assign", required=True)
    s.add_argument("term")
    s.set_defaults(run=cmd_eval)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    args.verbose = args.verbose or args.verbose_here
    say = _Report(sys.stdout)
    try:
        return args.run(args, say)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StructuralError, PreconditionError, ConeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ConstructionError as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
