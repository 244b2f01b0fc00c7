"""Free-bigroupoid terms, the rewriting engine that decides coherence, and
evaluation of terms into finite bigroupoids (optionally along a morphism)."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, fields
from typing import Any

from .core import (
    CompositionError,
    FiniteBigroupoid,
    PreconditionError,
    Pseudofunctor,
    StructuralError,
    cell_key,
)


class EndpointError(StructuralError):
    pass


class TermSyntaxError(StructuralError):
    pass


class _Node:
    """Hash-caching base for immutable term nodes."""

    def _key(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __repr__(self):
        return to_string(self)


class OneCell(_Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Gen(OneCell):
    edge: Any


@dataclass(frozen=True, eq=False, repr=False)
class Unit(OneCell):
    node: Any


@dataclass(frozen=True, eq=False, repr=False)
class Comp(OneCell):
    """left after right."""

    left: OneCell
    right: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Star(OneCell):
    term: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Mapped(_Node):
    """Edge id standing for the image of a source term under a morphism."""

    term: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class MappedNode(_Node):
    node: Any


class TwoCell(_Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Id(TwoCell):
    u: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Assoc(TwoCell):
    h: OneCell
    g: OneCell
    f: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class LUnit(TwoCell):
    f: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class RUnit(TwoCell):
    f: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Counit(TwoCell):
    u: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Unit2(TwoCell):
    u: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class DoubleStar(TwoCell):
    u: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class StarComp(TwoCell):
    """(g f)* -> f* g*."""

    f: OneCell
    g: OneCell


@dataclass(frozen=True, eq=False, repr=False)
class Inv(TwoCell):
    t: TwoCell


@dataclass(frozen=True, eq=False, repr=False)
class VComp(TwoCell):
    """second after first."""

    second: TwoCell
    first: TwoCell


@dataclass(frozen=True, eq=False, repr=False)
class HComp(TwoCell):
    left: TwoCell
    right: TwoCell


@dataclass(frozen=True, eq=False, repr=False)
class StarCell(TwoCell):
    t: TwoCell


@dataclass(frozen=True, eq=False, repr=False)
class Phi(TwoCell):
    """Comparison cell of a morphism: kind 'comp' with data (g, f), 'unit'
    with a node, or 'inv' with a 1-cell term (all over the source graph)."""

    kind: str
    data: Any


@dataclass(frozen=True, eq=False, repr=False)
class MappedCell(TwoCell):
    """Image under a morphism of a source 2-cell term."""

    t: TwoCell


@dataclass(frozen=True, eq=False, repr=False)
class Lit(TwoCell):
    """An explicit 2-cell (or a named hole filled at evaluation time)."""

    cell: Any
    src: OneCell
    tgt: OneCell


@dataclass(frozen=True)
class Witness:
    term: TwoCell
    src: OneCell
    tgt: OneCell


# ---------------------------------------------------------------- smart constructors


def vcomp(second: TwoCell, first: TwoCell) -> TwoCell:
    if isinstance(first, Id):
        return second
    if isinstance(second, Id):
        return first
    return VComp(second, first)


def vchain(*cells: TwoCell) -> TwoCell:
    """Vertical composite; the last cell is applied first."""
    out = cells[-1]
    for c in reversed(cells[:-1]):
        out = vcomp(c, out)
    return out


def hcomp(left: TwoCell, right: TwoCell) -> TwoCell:
    if isinstance(left, Id) and isinstance(right, Id):
        return Id(Comp(left.u, right.u))
    return HComp(left, right)


def inv(t: TwoCell) -> TwoCell:
    if isinstance(t, Id):
        return t
    if isinstance(t, Inv):
        return t.t
    return Inv(t)


def star_cell(t: TwoCell) -> TwoCell:
    if isinstance(t, Id):
        return Id(Star(t.u))
    return StarCell(t)


def comp(*terms: OneCell) -> OneCell:
    """Left-associated composite of the given terms, written left to right."""
    out = terms[0]
    for t in terms[1:]:
        out = Comp(out, t)
    return out


# ---------------------------------------------------------------- graphs and endpoints


class Graph:
    def __init__(self, nodes, edges):
        self.nodes = tuple(nodes)
        self.edges = dict(edges)
        self._nodeset = nodeset = set(self.nodes)
        for e, (s, t) in self.edges.items():
            if s not in nodeset or t not in nodeset:
                raise StructuralError(f"edge {e!r} has an undeclared endpoint")
        self._one = {}
        self._two = {}

    def __eq__(self, other):
        return isinstance(other, Graph) and set(self.nodes) == set(other.nodes) and self.edges == other.edges

    __hash__ = object.__hash__

    def one_ends(self, u: OneCell):
        got = self._one.get(u)
        if got is None:
            got = self._one_ends(u)
            self._one[u] = got
        return got

    def _one_ends(self, u):
        if isinstance(u, Gen):
            e = u.edge
            if isinstance(e, Mapped):
                s, t = self.one_ends(e.term)
                return (MappedNode(s), MappedNode(t))
            if e not in self.edges:
                raise StructuralError(f"unknown edge {e!r}")
            return self.edges[e]
        if isinstance(u, Unit):
            n = u.node
            base = n.node if isinstance(n, MappedNode) else n
            if base not in self._nodeset:
                raise StructuralError(f"unknown node {n!r}")
            return (n, n)
        if isinstance(u, Comp):
            ls, lt = self.one_ends(u.left)
            rs, rt = self.one_ends(u.right)
            if rt != ls:
                raise EndpointError(f"cannot compose {to_string(u.left)} after {to_string(u.right)}")
            return (rs, lt)
        if isinstance(u, Star):
            s, t = self.one_ends(u.term)
            return (t, s)
        raise StructuralError(f"not a 1-cell term: {u!r}")

    def src(self, u):
        return self.one_ends(u)[0]

    def tgt(self, u):
        return self.one_ends(u)[1]

    def ends(self, t: TwoCell):
        """Source and target 1-cell terms of a 2-cell term."""
        got = self._two.get(t)
        if got is None:
            got = self._ends(t)
            self._two[t] = got
        return got

    def _ends(self, t):
        one = self.one_ends
        if isinstance(t, Id):
            one(t.u)
            return (t.u, t.u)
        if isinstance(t, Assoc):
            s = Comp(Comp(t.h, t.g), t.f)
            one(s)
            return (s, Comp(t.h, Comp(t.g, t.f)))
        if isinstance(t, LUnit):
            return (Comp(Unit(self.tgt(t.f)), t.f), t.f)
        if isinstance(t, RUnit):
            return (Comp(t.f, Unit(self.src(t.f))), t.f)
        if isinstance(t, Counit):
            return (Comp(Star(t.u), t.u), Unit(self.src(t.u)))
        if isinstance(t, Unit2):
            return (Unit(self.tgt(t.u)), Comp(t.u, Star(t.u)))
        if isinstance(t, DoubleStar):
            one(t.u)
            return (Star(Star(t.u)), t.u)
        if isinstance(t, StarComp):
            s = Star(Comp(t.g, t.f))
            one(s)
            return (s, Comp(Star(t.f), Star(t.g)))
        if isinstance(t, Inv):
            s, g = self.ends(t.t)
            return (g, s)
        if isinstance(t, VComp):
            s1, t1 = self.ends(t.first)
            s2, t2 = self.ends(t.second)
            if t1 != s2:
                raise EndpointError(
                    f"vertical composite mismatch: {to_string(t1)} vs {to_string(s2)}"
                )
            return (s1, t2)
        if isinstance(t, HComp):
            ls, lt = self.ends(t.left)
            rs, rt = self.ends(t.right)
            s = Comp(ls, rs)
            one(s)
            return (s, Comp(lt, rt))
        if isinstance(t, StarCell):
            s, g = self.ends(t.t)
            return (Star(s), Star(g))
        if isinstance(t, Phi):
            if t.kind == "comp":
                g, f = t.data
                gf = Comp(g, f)
                one(gf)
                return (Comp(Gen(Mapped(g)), Gen(Mapped(f))), Gen(Mapped(gf)))
            if t.kind == "unit":
                return (Unit(MappedNode(t.data)), Gen(Mapped(Unit(t.data))))
            if t.kind == "inv":
                one(t.data)
                return (Star(Gen(Mapped(t.data))), Gen(Mapped(Star(t.data))))
            raise StructuralError(f"unknown comparison kind {t.kind!r}")
        if isinstance(t, MappedCell):
            s, g = self.ends(t.t)
            return (Gen(Mapped(s)), Gen(Mapped(g)))
        if isinstance(t, Lit):
            if one(t.src) != one(t.tgt):
                raise EndpointError("explicit 2-cell between non-parallel terms")
            return (t.src, t.tgt)
        raise StructuralError(f"not a 2-cell term: {t!r}")

    def witness(self, t: TwoCell) -> Witness:
        s, g = self.ends(t)
        return Witness(t, s, g)


def contains_phi(t: TwoCell) -> bool:
    if isinstance(t, (Phi, MappedCell)):
        return True
    return any(isinstance(getattr(t, f.name), TwoCell) and contains_phi(getattr(t, f.name)) for f in fields(t))


def contains_lit(t: TwoCell) -> bool:
    if isinstance(t, Lit):
        return True
    return any(isinstance(getattr(t, f.name), TwoCell) and contains_lit(getattr(t, f.name)) for f in fields(t))


# ---------------------------------------------------------------- strictification


def _letters(u: OneCell):
    if isinstance(u, Gen):
        if isinstance(u.edge, Mapped):
            return [(Mapped(Gen(e)), s) for e, s in _letters(u.edge.term)]
        return [(u.edge, 1)]
    if isinstance(u, Unit):
        return []
    if isinstance(u, Comp):
        return _letters(u.left) + _letters(u.right)
    if isinstance(u, Star):
        return [(e, -s) for e, s in reversed(_letters(u.term))]
    raise StructuralError(f"not a 1-cell term: {u!r}")


def free_reduce(word) -> tuple:
    out = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def strictify(u: OneCell, graph: Graph | None = None) -> tuple:
    """Reduced free-groupoid word of u, as (edge, +1 | -1) letters written left to right."""
    if graph is not None:
        graph.one_ends(u)
    return free_reduce(_letters(u))


def has_canonical_2cell(u: OneCell, v: OneCell, graph: Graph) -> bool:
    _check_parallel(u, v, graph)
    return strictify(u) == strictify(v)


def _check_parallel(u, v, graph):
    if graph.one_ends(u) != graph.one_ends(v):
        raise EndpointError(f"terms {to_string(u)} and {to_string(v)} are not parallel")


def length(u: OneCell) -> int:
    if isinstance(u, Gen):
        return 1
    if isinstance(u, Unit):
        return 0
    if isinstance(u, Comp):
        return length(u.left) + length(u.right)
    return length(u.term)


# ---------------------------------------------------------------- unit deletion and R


def delete_units(u: OneCell, graph: Graph):
    """Remove units composed with something else, bottom-up.  Returns (u', w : u -> u')."""
    if isinstance(u, (Gen, Unit)):
        return u, Id(u)
    if isinstance(u, Star):
        t, w = delete_units(u.term, graph)
        return Star(t), star_cell(w)
    l, wl = delete_units(u.left, graph)
    r, wr = delete_units(u.right, graph)
    w = hcomp(wl, wr)
    if isinstance(l, Unit):
        return r, vcomp(LUnit(r), w)
    if isinstance(r, Unit):
        return l, vcomp(RUnit(l), w)
    return Comp(l, r), w


def delete_units_topdown(u: OneCell, graph: Graph):
    """An alternative unit-deletion order: strip outer units first."""
    if isinstance(u, (Gen, Unit)):
        return u, Id(u)
    if isinstance(u, Star):
        t, w = delete_units_topdown(u.term, graph)
        return Star(t), star_cell(w)
    if isinstance(u.left, Unit):
        r, w = delete_units_topdown(u.right, graph)
        return r, vcomp(w, LUnit(u.right))
    if isinstance(u.right, Unit):
        l, w = delete_units_topdown(u.left, graph)
        return l, vcomp(w, RUnit(u.left))
    l, wl = delete_units_topdown(u.left, graph)
    r, wr = delete_units_topdown(u.right, graph)
    w = hcomp(wl, wr)
    if isinstance(l, Unit):
        return r, vcomp(LUnit(r), w)
    if isinstance(r, Unit):
        return l, vcomp(RUnit(l), w)
    return Comp(l, r), w


def _is_letter(u) -> bool:
    return isinstance(u, Gen) or (isinstance(u, Star) and isinstance(u.term, Gen))


def _R(u: OneCell, graph: Graph):
    if isinstance(u, (Gen, Unit)) or _is_letter(u):
        return u, Id(u)
    if isinstance(u, Comp):
        l, wl = _R(u.left, graph)
        r, wr = _R(u.right, graph)
        return Comp(l, r), hcomp(wl, wr)
    inner = u.term
    if isinstance(inner, Unit):
        # R 1* = 1
        return inner, vcomp(Counit(inner), inv(RUnit(u)))
    if isinstance(inner, Star):
        # R v** = R v
        v = inner.term
        r, w = _R(v, graph)
        return r, vcomp(w, DoubleStar(v))
    # R (w v)* = R v* . R w*
    w_, v = inner.left, inner.right
    rv, wv = _R(Star(v), graph)
    rw, ww = _R(Star(w_), graph)
    return Comp(rv, rw), vcomp(hcomp(wv, ww), StarComp(v, w_))


def rewrite_R(u: OneCell, graph: Graph):
    """Returns (R u, witness u -> R u); superfluous units are deleted before and after."""
    graph.one_ends(u)
    u1, w1 = delete_units(u, graph)
    u2, w2 = _R(u1, graph)
    u3, w3 = delete_units(u2, graph)
    return u3, Witness(vchain(w3, w2, w1), u, u3)


def is_R_fixed(u: OneCell) -> bool:
    if isinstance(u, Unit):
        return True
    return _is_comb_free_word(u)


def _is_comb_free_word(u):
    if _is_letter(u):
        return True
    if isinstance(u, Comp):
        return _is_comb_free_word(u.left) and _is_comb_free_word(u.right)
    return False


# ---------------------------------------------------------------- bracketings


def atoms(u: OneCell) -> list:
    if isinstance(u, Comp):
        return atoms(u.left) + atoms(u.right)
    return [u]


def right_comb(u: OneCell):
    """(comb, w : u -> comb) with comb = a1 . (a2 . (... . an))."""
    if not isinstance(u, Comp):
        return u, Id(u)
    r, wr = right_comb(u.right)
    return _attach_right(u.left, r, hcomp(Id(u.left), wr))


def _attach_right(l, r, w):
    if not isinstance(l, Comp):
        return Comp(l, r), w
    l1, l2 = l.left, l.right
    w = vcomp(Assoc(l1, l2, r), w)
    inner, wi = _attach_right(l2, r, Id(Comp(l2, r)))
    w = vcomp(hcomp(Id(l1), wi), w)
    return _attach_right(l1, inner, w)


def left_comb(u: OneCell):
    """(comb, w : u -> comb) with comb = ((a1 . a2) . ...) . an."""
    if not isinstance(u, Comp):
        return u, Id(u)
    l, wl = left_comb(u.left)
    return _attach_left(l, u.right, hcomp(wl, Id(u.right)))


def _attach_left(l, r, w):
    if not isinstance(r, Comp):
        return Comp(l, r), w
    r1, r2 = r.left, r.right
    w = vcomp(inv(Assoc(l, r1, r2)), w)
    inner, wi = _attach_left(l, r1, Id(Comp(l, r1)))
    w = vcomp(hcomp(wi, Id(r2)), w)
    return _attach_left(inner, r2, w)


def from_atoms_right(items) -> OneCell:
    out = items[-1]
    for a in reversed(items[:-1]):
        out = Comp(a, out)
    return out


def from_atoms_left(items) -> OneCell:
    out = items[0]
    for a in items[1:]:
        out = Comp(out, a)
    return out


def reassoc(s: OneCell, t: OneCell) -> TwoCell:
    """Associativity-only 2-cell between two bracketings of the same atoms."""
    if atoms(s) != atoms(t):
        raise EndpointError("reassociation between different atom sequences")
    _, ws = right_comb(s)
    _, wt = right_comb(t)
    return vcomp(inv(wt), ws)


def au_connector(s: OneCell, t: OneCell, graph: Graph) -> TwoCell:
    """2-cell s -> t built from a, l, r alone; both must agree once units are
    deleted and brackets forgotten."""
    if s == t:
        return Id(s)
    s1, ws = delete_units(s, graph)
    t1, wt = delete_units(t, graph)
    if atoms(s1) != atoms(t1):
        raise EndpointError(f"no associativity/unit cell from {to_string(s)} to {to_string(t)}")
    _, cs = right_comb(s1)
    _, ct = right_comb(t1)
    return vchain(inv(wt), inv(ct), cs, ws)


def paste(steps, graph: Graph, src: OneCell | None = None, tgt: OneCell | None = None) -> TwoCell:
    """Compose 2-cells written as if the target were strict, inserting
    associativity/unit cells between consecutive steps."""
    out = None
    cur = src
    for step in steps:
        s, t = graph.ends(step)
        if cur is None:
            out = step
        else:
            conn = au_connector(cur, s, graph)
            out = vchain(step, conn) if out is None else vchain(step, conn, out)
        cur = t
    if tgt is not None:
        out = vcomp(au_connector(cur, tgt, graph), out) if out is not None else au_connector(cur, tgt, graph)
    graph.ends(out)
    return out


# ---------------------------------------------------------------- simple reductions


def _cancel_cell(x: OneCell, y: OneCell):
    """Reduction cell for an adjacent pair x . y, or None."""
    if isinstance(x, Star) and isinstance(y, Gen) and x.term == y:
        return Counit(y)
    if isinstance(x, Gen) and isinstance(y, Star) and y.term == x:
        return inv(Unit2(x))
    return None


def reduction_positions(letters) -> list:
    return [i for i in range(len(letters) - 1) if _cancel_cell(letters[i], letters[i + 1]) is not None]


def _whisker_left(prefix, cell):
    for x in reversed(prefix):
        cell = hcomp(Id(x), cell)
    return cell


def reduce_right_comb(letters, i, graph: Graph):
    """Simple reduction at pair (i, i+1) of the right comb on letters.
    Returns (new letters, 2-cell from the old comb to the new one)."""
    n = len(letters)
    red = _cancel_cell(letters[i], letters[i + 1])
    if red is None:
        raise PreconditionError(f"no simple reduction at position {i}")
    x, y = letters[i], letters[i + 1]
    new = letters[:i] + letters[i + 2:]
    if i + 2 < n:
        rest = from_atoms_right(letters[i + 2:])
        local = vchain(LUnit(rest), hcomp(red, Id(rest)), inv(Assoc(x, y, rest)))
        cell = _whisker_left(letters[:i], local)
    elif i == 0:
        cell = red
    else:
        prev = letters[i - 1]
        local = vcomp(RUnit(prev), hcomp(Id(prev), red))
        cell = _whisker_left(letters[: i - 1], local)
    return new, cell


def reduce_left_comb(letters, i, graph: Graph):
    """Simple reduction at pair (i, i+1) of the left comb on letters."""
    n = len(letters)
    red = _cancel_cell(letters[i], letters[i + 1])
    if red is None:
        raise PreconditionError(f"no simple reduction at position {i}")
    x, y = letters[i], letters[i + 1]
    new = letters[:i] + letters[i + 2:]
    if i > 0:
        before = from_atoms_left(letters[:i])
        local = vchain(RUnit(before), hcomp(Id(before), red), Assoc(before, x, y))
    elif n == 2:
        local = red
    else:
        nxt = letters[2]
        local = vcomp(LUnit(nxt), hcomp(red, Id(nxt)))
    # whisker on the right by the remaining letters, innermost first
    start = i + 2 if i > 0 else min(3, n)
    for z in letters[start:]:
        local = hcomp(local, Id(z))
    return new, local


def _comb_term(letters, node, right=True):
    if not letters:
        return Unit(node)
    return from_atoms_right(letters) if right else from_atoms_left(letters)


def normalize(u: OneCell, graph: Graph):
    """Reduce an R-fixed term to its minimal form by leftmost simple reductions.

    Returns (m, witness u -> m, lengths) where lengths traces the length
    after each reduction step (starting with the length of u)."""
    if not is_R_fixed(u):
        raise PreconditionError(f"{to_string(u)} is not fixed by R")
    src = graph.src(u)
    comb, w = right_comb(u)
    letters = atoms(comb) if not isinstance(comb, Unit) else []
    trace = [length(u)]
    while True:
        pos = reduction_positions(letters)
        if not pos:
            break
        letters, step = reduce_right_comb(letters, pos[0], graph)
        w = vcomp(step, w)
        trace.append(len(letters))
    m = _comb_term(letters, src)
    graph.ends(w)
    return m, Witness(w, u, m), trace


def normalize_alt(u: OneCell, graph: Graph):
    """Rightmost reductions on the left comb; used as an independent route."""
    if not is_R_fixed(u):
        raise PreconditionError(f"{to_string(u)} is not fixed by R")
    src = graph.src(u)
    comb, w = left_comb(u)
    letters = atoms(comb) if not isinstance(comb, Unit) else []
    while True:
        pos = reduction_positions(letters)
        if not pos:
            break
        letters, step = reduce_left_comb(letters, pos[-1], graph)
        w = vcomp(step, w)
    m = _comb_term(letters, src, right=False)
    return m, Witness(w, u, m)


def minimal_form(u: OneCell, graph: Graph) -> OneCell:
    ru, _ = rewrite_R(u, graph)
    return normalize(ru, graph)[0]


def canonical_2cell(u: OneCell, v: OneCell, graph: Graph) -> Witness | None:
    """The canonical witness u -> v through the shared normal form, or None."""
    _check_parallel(u, v, graph)
    if strictify(u) != strictify(v):
        return None
    ru, wu = rewrite_R(u, graph)
    rv, wv = rewrite_R(v, graph)
    mu, nu, _ = normalize(ru, graph)
    mv, nv, _ = normalize(rv, graph)
    if mu != mv:
        raise PreconditionError("normal forms disagree")
    t = vchain(inv(wv.term), inv(nv.term), nu.term, wu.term)
    graph.ends(t)
    return Witness(t, u, v)


def canonical_2cell_alt(u: OneCell, v: OneCell, graph: Graph) -> Witness | None:
    """A second, independently routed canonical witness u -> v."""
    _check_parallel(u, v, graph)
    if strictify(u) != strictify(v):
        return None

    def route(x):
        x1, w1 = delete_units_topdown(x, graph)
        x2, w2 = _R(x1, graph)
        x3, w3 = delete_units_topdown(x2, graph)
        m, n = normalize_alt(x3, graph)
        return m, vchain(n.term, w3, w2, w1)

    mu, wu = route(u)
    mv, wv = route(v)
    if mu != mv:
        raise PreconditionError("normal forms disagree")
    t = vcomp(inv(wv), wu)
    graph.ends(t)
    return Witness(t, u, v)


def decide_formal(t1: TwoCell, t2: TwoCell, graph: Graph, morphism_mode: bool = False) -> bool:
    """Whether two formal 2-cells are equal: exactly when they are parallel."""
    for t in (t1, t2):
        if contains_lit(t):
            raise StructuralError("explicit 2-cells are not formal")
        if not morphism_mode and contains_phi(t):
            raise StructuralError("comparison cells need morphism mode")
    return graph.ends(t1) == graph.ends(t2)


# ---------------------------------------------------------------- evaluation


def _double_star_template():
    g = Graph(["a", "b"], {"f": ("a", "b")})
    f = Gen("f")
    fs, fss = Star(f), Star(Star(f))
    t = vchain(
        LUnit(f),
        hcomp(Counit(fs), Id(f)),
        inv(Assoc(fss, fs, f)),
        hcomp(Id(fss), inv(Counit(f))),
        inv(RUnit(fss)),
    )
    assert g.ends(t) == (fss, f)
    return t


def _star_comp_template():
    g = Graph(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
    f, gg = Gen("f"), Gen("g")
    fs, gs = Star(f), Star(gg)
    s0 = Star(Comp(gg, f))
    steps = [
        inv(RUnit(s0)),
        hcomp(Id(s0), Unit2(gg)),
        hcomp(Id(s0), hcomp(Id(gg), vcomp(hcomp(Unit2(f), Id(gs)), inv(LUnit(gs))))),
    ]
    cur = g.ends(steps[-1])[1]
    target = Comp(Comp(s0, Comp(gg, f)), Comp(fs, gs))
    steps.append(reassoc(cur, target))
    steps.append(hcomp(Counit(Comp(gg, f)), Id(Comp(fs, gs))))
    steps.append(LUnit(Comp(fs, gs)))
    t = vchain(*reversed(steps))
    assert g.ends(t) == (s0, Comp(fs, gs))
    return t


_DOUBLE_STAR = None
_STAR_COMP = None


class Evaluator:
    """Evaluate terms in a finite bigroupoid under an assignment of nodes to
    0-cells, edges to 1-cells and (optionally) named holes to 2-cells.

    With a morphism F, mapped edges and comparison cells are interpreted
    along F, using source_nodes/source_edges for the source-side terms."""

    def __init__(self, B: FiniteBigroupoid, nodes=None, edges=None, cells=None,
                 morphism: Pseudofunctor | None = None, source_nodes=None, source_edges=None):
        self.B = B
        self.nodes = dict(nodes or {})
        self.edges = dict(edges or {})
        self.cells = dict(cells or {})
        self.F = morphism
        self._one = {}
        self._two = {}
        if morphism is not None:
            self.source = Evaluator(morphism.source, source_nodes, source_edges)

    def node(self, n):
        if isinstance(n, MappedNode):
            return self.F.f0(self.source.node(n.node))
        try:
            return self.nodes[n]
        except KeyError:
            raise StructuralError(f"node {n!r} is not assigned") from None

    def one(self, u: OneCell):
        got = self._one.get(u)
        if got is not None:
            return got
        B = self.B
        try:
            if isinstance(u, Gen):
                if isinstance(u.edge, Mapped):
                    got = self.F.f1(self.source.one(u.edge.term))
                else:
                    try:
                        got = self.edges[u.edge]
                    except KeyError:
                        raise StructuralError(f"edge {u.edge!r} is not assigned") from None
            elif isinstance(u, Unit):
                got = B.one(self.node(u.node))
            elif isinstance(u, Comp):
                got = B.comp1(self.one(u.left), self.one(u.right))
            elif isinstance(u, Star):
                got = B.star1(self.one(u.term))
            else:
                raise StructuralError(f"not a 1-cell term: {u!r}")
        except CompositionError as exc:
            raise EndpointError(str(exc)) from None
        self._one[u] = got
        return got

    def two(self, t: TwoCell):
        got = self._two.get(t)
        if got is not None:
            return got
        try:
            got = self._two_uncached(t)
        except CompositionError as exc:
            raise EndpointError(str(exc)) from None
        self._two[t] = got
        return got

    def _two_uncached(self, t):
        global _DOUBLE_STAR, _STAR_COMP
        B, one = self.B, self.one
        if isinstance(t, Id):
            return B.id2(one(t.u))
        if isinstance(t, Assoc):
            return B.a(one(t.h), one(t.g), one(t.f))
        if isinstance(t, LUnit):
            return B.l(one(t.f))
        if isinstance(t, RUnit):
            return B.r(one(t.f))
        if isinstance(t, Counit):
            return B.e(one(t.u))
        if isinstance(t, Unit2):
            return B.i(one(t.u))
        if isinstance(t, DoubleStar):
            if _DOUBLE_STAR is None:
                _DOUBLE_STAR = _double_star_template()
            f = one(t.u)
            sub = Evaluator(B, {"a": B.src1(f), "b": B.tgt1(f)}, {"f": f})
            return sub.two(_DOUBLE_STAR)
        if isinstance(t, StarComp):
            if _STAR_COMP is None:
                _STAR_COMP = _star_comp_template()
            f, g = one(t.f), one(t.g)
            sub = Evaluator(B, {"a": B.src1(f), "b": B.tgt1(f), "c": B.tgt1(g)}, {"f": f, "g": g})
            return sub.two(_STAR_COMP)
        if isinstance(t, Inv):
            return B.inv2(self.two(t.t))
        if isinstance(t, VComp):
            return B.vcomp(self.two(t.second), self.two(t.first))
        if isinstance(t, HComp):
            return B.hcomp(self.two(t.left), self.two(t.right))
        if isinstance(t, StarCell):
            return B.star2(self.two(t.t))
        if isinstance(t, Phi):
            if self.F is None:
                raise StructuralError("comparison cell outside morphism mode")
            F, S = self.F, self.source
            if t.kind == "comp":
                g, f = t.data
                return F.phi_comp[(S.one(g), S.one(f))]
            if t.kind == "unit":
                return F.phi_unit[S.node(t.data)]
            if t.kind == "inv":
                return F.phi_inv[S.one(t.data)]
            raise StructuralError(f"unknown comparison kind {t.kind!r}")
        if isinstance(t, MappedCell):
            if self.F is None:
                raise StructuralError("mapped cell outside morphism mode")
            return self.F.f2(self.source.two(t.t))
        if isinstance(t, Lit):
            cell = self.cells.get(t.cell, t.cell)
            if cell not in B.arrows2:
                raise StructuralError(f"unknown 2-cell {cell!r}")
            if B.arrows2[cell] != (one(t.src), one(t.tgt)):
                raise EndpointError(f"explicit 2-cell {cell!r} has the wrong endpoints")
            return cell
        raise StructuralError(f"not a 2-cell term: {t!r}")


def eval_1cell(B: FiniteBigroupoid, assign, u: OneCell):
    nodes, edges = assign
    return Evaluator(B, nodes, edges).one(u)


def eval_2cell(B: FiniteBigroupoid, assign, t: TwoCell):
    nodes, edges = assign
    return Evaluator(B, nodes, edges).two(t)


def eval_word(B: FiniteBigroupoid, assign, word):
    """Evaluate a free-groupoid word (edge, sign) with left-associated grouping."""
    nodes, edges = assign
    cells = [edges[e] if s > 0 else B.star1(edges[e]) for e, s in word]
    out = cells[0]
    for c in cells[1:]:
        out = B.comp1(out, c)
    return out


def graph_of(B: FiniteBigroupoid) -> Graph:
    """The underlying graph of B: its 0-cells and 1-cells."""
    return Graph(B.zero_cells, dict(B.cell1))


def identity_assignment(B: FiniteBigroupoid):
    return ({A: A for A in B.zero_cells}, {f: f for f in B.cell1})


# ---------------------------------------------------------------- syntax

_TOKEN = re.compile(r"\s*(?:(F\[)|([().*\]])|([A-Za-z0-9_'\-]+))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TermSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        out.append((m.group(1) or m.group(2) or m.group(3), m.start(m.lastindex)))
        pos = m.end()
    return out


def parse_term(text: str) -> OneCell:
    """Parse the term grammar; n-ary composites group to the left."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(toks):
            raise TermSyntaxError(f"unexpected end of term, expected {expected or 'a term'}")
        tok, at = toks[pos]
        if expected is not None and tok != expected:
            raise TermSyntaxError(f"expected {expected!r} at offset {at}, found {tok!r}")
        pos += 1
        return tok

    def primary():
        tok = take()
        if tok == "(":
            parts = [term()]
            while peek() == ".":
                take(".")
                parts.append(term())
            take(")")
            return comp(*parts)
        if tok == "F[":
            inner = term()
            take("]")
            return Gen(Mapped(inner))
        if tok in (")", ".", "*", "]"):
            raise TermSyntaxError(f"unexpected {tok!r} at offset {toks[pos - 1][1]}")
        if tok.startswith("1_") and len(tok) > 2:
            return Unit(tok[2:])
        return Gen(tok)

    def term():
        t = primary()
        while peek() == "*":
            take("*")
            t = Star(t)
        return t

    out = term()
    if pos != len(toks):
        raise TermSyntaxError(f"trailing input at offset {toks[pos][1]}")
    return out


def _node_name(n) -> str:
    if isinstance(n, MappedNode):
        return f"F[{_node_name(n.node)}]"
    return str(n)


def to_string(x) -> str:
    if isinstance(x, Gen):
        if isinstance(x.edge, Mapped):
            return f"F[{to_string(x.edge.term)}]"
        return str(x.edge)
    if isinstance(x, Unit):
        return f"1_{_node_name(x.node)}"
    if isinstance(x, Comp):
        return f"({to_string(x.left)} . {to_string(x.right)})"
    if isinstance(x, Star):
        return f"{to_string(x.term)}*"
    if isinstance(x, Mapped):
        return f"F[{to_string(x.term)}]"
    if isinstance(x, MappedNode):
        return _node_name(x)
    if isinstance(x, Id):
        return f"id[{to_string(x.u)}]"
    if isinstance(x, Assoc):
        return f"a[{to_string(x.h)}, {to_string(x.g)}, {to_string(x.f)}]"
    if isinstance(x, LUnit):
        return f"l[{to_string(x.f)}]"
    if isinstance(x, RUnit):
        return f"r[{to_string(x.f)}]"
    if isinstance(x, Counit):
        return f"e[{to_string(x.u)}]"
    if isinstance(x, Unit2):
        return f"i[{to_string(x.u)}]"
    if isinstance(x, DoubleStar):
        return f"u[{to_string(x.u)}]"
    if isinstance(x, StarComp):
        return f"b[{to_string(x.f)}, {to_string(x.g)}]"
    if isinstance(x, Inv):
        return f"inv({to_string(x.t)})"
    if isinstance(x, VComp):
        return f"({to_string(x.second)} o {to_string(x.first)})"
    if isinstance(x, HComp):
        return f"({to_string(x.left)} * {to_string(x.right)})"
    if isinstance(x, StarCell):
        return f"star({to_string(x.t)})"
    if isinstance(x, Phi):
        if x.kind == "comp":
            return f"phi[{to_string(x.data[0])}, {to_string(x.data[1])}]"
        if x.kind == "unit":
            return f"phi[1_{_node_name(x.data)}]"
        return f"phi[{to_string(x.data)}*]"
    if isinstance(x, MappedCell):
        return f"F[{to_string(x.t)}]"
    if isinstance(x, Lit):
        return f"cell[{x.cell}]"
    return repr(x)


def infer_graph(*terms: OneCell, parallel: bool = False) -> Graph:
    """Smallest graph making the terms well formed, found by unifying endpoints.
    With parallel=True the terms are also required to share both endpoints.
    Nodes not pinned by a unit get generated names."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    edges = set()

    def walk(u):
        if isinstance(u, Gen):
            if isinstance(u.edge, Mapped):
                raise StructuralError("cannot infer a graph for mapped edges")
            edges.add(u.edge)
            ends = (("s", u.edge), ("t", u.edge))
            for x in ends:
                find(x)
            return ends
        if isinstance(u, Unit):
            v = ("n", u.node)
            find(v)
            return (v, v)
        if isinstance(u, Comp):
            ls, lt = walk(u.left)
            rs, rt = walk(u.right)
            union(rt, ls)
            return (rs, lt)
        if isinstance(u, Star):
            s, t = walk(u.term)
            return (t, s)
        raise StructuralError(f"not a 1-cell term: {u!r}")

    ends = [walk(t) for t in terms]
    if parallel:
        for s, t in ends[1:]:
            union(s, ends[0][0])
            union(t, ends[0][1])
    classes = {}
    for x in list(parent):
        classes.setdefault(find(x), []).append(x)
    name = {}
    for root, members in classes.items():
        named = sorted({m[1] for m in members if m[0] == "n"}, key=cell_key)
        if len(named) > 1:
            raise EndpointError(f"nodes {named[0]!r} and {named[1]!r} would have to coincide")
        if named:
            label = named[0]
        else:
            m = min(members, key=cell_key)
            label = f"{'src' if m[0] == 's' else 'tgt'}({m[1]})"
        for m in members:
            name[m] = label
    nodes = sorted(set(name.values()), key=cell_key)
    graph_edges = {e: (name[("s", e)], name[("t", e)]) for e in edges}
    return Graph(nodes, graph_edges)


# ---------------------------------------------------------------- standard identities


@dataclass(frozen=True)
class Identity:
    """A claimed equation lhs = rhs between 2-cell terms over graph.  Holes
    (named Lit cells) range over all 2-cells with the right endpoints."""

    name: str
    graph: Graph
    lhs: TwoCell
    rhs: TwoCell
    holes: tuple = ()


def standard_identities() -> list[Identity]:
    g1 = Graph(["a", "b"], {"f": ("a", "b")})
    f = Gen("f")
    fs, fss = Star(f), Star(Star(f))
    out = [
        Identity("triangle-left", g1,
                 paste([hcomp(Unit2(f), Id(f)), hcomp(Id(f), Counit(f))], g1, src=f, tgt=f), Id(f)),
        Identity("triangle-right", g1,
                 paste([hcomp(Id(fs), Unit2(f)), hcomp(Counit(f), Id(fs))], g1, src=fs, tgt=fs), Id(fs)),
        Identity("double-star-cell", g1,
                 paste([hcomp(Id(fss), inv(Counit(f))), hcomp(Counit(fs), Id(f))], g1, src=fss, tgt=f),
                 DoubleStar(f)),
        Identity("double-star-unit2", g1,
                 paste([inv(Counit(fs)), hcomp(DoubleStar(f), Id(fs))], g1, src=Unit("b"), tgt=Comp(f, fs)),
                 Unit2(f)),
        Identity("double-star-counit", g1,
                 paste([Unit2(fs), hcomp(Id(fs), DoubleStar(f))], g1, src=Unit("a"), tgt=Comp(fs, f)),
                 inv(Counit(f))),
        Identity("double-star-pair", g1,
                 vcomp(Counit(f), hcomp(DoubleStar(fs), DoubleStar(f))), Counit(fss)),
    ]
    g2 = Graph(["a", "b"], {"f": ("a", "b"), "g": ("a", "b")})
    f, g = Gen("f"), Gen("g")
    alpha = Lit("alpha", f, g)
    out.append(Identity(
        "star-of-2-cell", g2, star_cell(alpha),
        paste([hcomp(inv(Counit(g)), Id(Star(f))),
               hcomp(Id(Star(g)), hcomp(inv(alpha), Id(Star(f)))),
               hcomp(Id(Star(g)), inv(Unit2(f)))], g2, src=Star(f), tgt=Star(g)),
        holes=(("alpha", f, g),)))
    g3 = Graph(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c")})
    f, g = Gen("f"), Gen("g")
    gf = Comp(g, f)
    out.append(Identity(
        "star-of-composite", g3,
        paste([hcomp(StarComp(f, g), Id(gf)),
               hcomp(Id(Star(f)), hcomp(Counit(g), Id(f))),
               Counit(f)], g3, src=Comp(Star(gf), gf), tgt=Unit("a")),
        Counit(gf)))
    return out


def identity_instances(B: FiniteBigroupoid, ident: Identity):
    """All evaluators realising the identity's graph (and holes) in B."""
    graph = ident.graph
    nodes = list(graph.nodes)
    edges = sorted(graph.edges, key=cell_key)
    for zs in _product([B.zero_cells] * len(nodes)):
        nmap = dict(zip(nodes, zs))
        choices = [B.hom[(nmap[graph.edges[e][0]], nmap[graph.edges[e][1]])].objects for e in edges]
        for cs in _product(choices):
            emap = dict(zip(edges, cs))
            base = Evaluator(B, nmap, emap)
            hole_choices = []
            for name, s, t in ident.holes:
                x, y = base.one(s), base.one(t)
                hole_choices.append(B.hom[B.cell1[x]].hom(x, y))
            for hs in _product(hole_choices):
                yield Evaluator(B, nmap, emap, {h[0]: c for h, c in zip(ident.holes, hs)})


def _product(lists):
    return itertools.product(*[sorted(x, key=cell_key) for x in lists])


def check_identity(B: FiniteBigroupoid, ident: Identity) -> int:
    """Evaluate both sides at every instance; returns the number of failures."""
    bad = 0
    for ev in identity_instances(B, ident):
        if ev.two(ident.lhs) != ev.two(ident.rhs):
            bad += 1
    return bad
