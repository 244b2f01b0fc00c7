"""Finite bigroupoids, pseudofunctors and icons, together with their validators.

Cells are named by hashable ids (strings, or nested tuples of ids for cells
produced by constructions).  All values are treated as immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

CellId = Hashable


class StructuralError(ValueError):
    """Tables reference undeclared ids or cells have the wrong endpoints."""


class CompositionError(ValueError):
    pass


class ClassError(ValueError):
    """A morphism is not in the class an operation requires."""


class ConeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ConstructionError(RuntimeError):
    """An internal invariant of a construction failed; this is a bug."""


def cell_key(x):
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(cell_key(y) for y in x))
    if isinstance(x, (bool, int)):
        return (0, int(x))
    return (3, repr(x))


def ordered(items: Iterable) -> list:
    return sorted(items, key=cell_key)


def least(items: Iterable):
    return min(items, key=cell_key)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    @classmethod
    def of(cls, violations) -> "ValidationReport":
        violations = tuple(violations)
        return cls(not violations, violations)


# ---------------------------------------------------------------- groupoids


class FiniteGroupoid:
    def __init__(self, objects, arrows, identity, compose, inverse, check=True):
        self.objects = tuple(objects)
        self.arrows = dict(arrows)
        self.identity = dict(identity)
        self._compose = dict(compose)
        self.inverse_table = dict(inverse)
        self._homs = None
        self._data = None
        if check:
            self.check_structure()

    @property
    def compose_table(self) -> dict:
        return self._compose

    def src(self, a):
        return self.arrows[a][0]

    def tgt(self, a):
        return self.arrows[a][1]

    def id(self, x):
        return self.identity[x]

    def comp(self, g, f):
        try:
            return self._compose[(g, f)]
        except KeyError:
            raise CompositionError(f"arrows {g!r} and {f!r} are not composable") from None

    def inv(self, a):
        return self.inverse_table[a]

    def is_identity(self, a) -> bool:
        return self.identity.get(self.arrows[a][0]) == a

    def hom(self, x, y) -> tuple:
        if self._homs is None:
            homs = {}
            for a in ordered(self.arrows):
                homs.setdefault(self.arrows[a], []).append(a)
            self._homs = {k: tuple(v) for k, v in homs.items()}
        return self._homs.get((x, y), ())

    def check_structure(self):
        objs = set(self.objects)
        if len(objs) != len(self.objects):
            raise StructuralError("duplicate object id")
        for a, (s, t) in self.arrows.items():
            if s not in objs or t not in objs:
                raise StructuralError(f"arrow {a!r} has an undeclared endpoint")
        if set(self.identity) != objs:
            raise StructuralError("identity table must cover exactly the objects")
        for x, a in self.identity.items():
            if self.arrows.get(a) != (x, x):
                raise StructuralError(f"identity of {x!r} is not an endo-arrow of {x!r}")
        if set(self.inverse_table) != set(self.arrows):
            raise StructuralError("inverse table must cover exactly the arrows")
        for a, b in self.inverse_table.items():
            s, t = self.arrows[a]
            if self.arrows.get(b) != (t, s):
                raise StructuralError(f"inverse of {a!r} has wrong endpoints")
        out = {}
        for a, (s, t) in self.arrows.items():
            out.setdefault(s, []).append(a)
        expected = 0
        for f, (s, t) in self.arrows.items():
            for g in out.get(t, ()):
                expected += 1
                h = self._compose.get((g, f))
                if h is None:
                    raise StructuralError(f"composite of {g!r} after {f!r} is missing")
                if self.arrows.get(h) != (s, self.arrows[g][1]):
                    raise StructuralError(f"composite of {g!r} after {f!r} has wrong endpoints")
        if expected != len(self._compose):
            raise StructuralError("composition table has entries for non-composable pairs")

    def violations(self) -> list:
        out = []
        arrows = self.arrows
        comp = self.comp
        by_src = {}
        for a, (s, t) in arrows.items():
            by_src.setdefault(s, []).append(a)
        for a, (s, t) in arrows.items():
            if comp(a, self.identity[s]) != a or comp(self.identity[t], a) != a:
                out.append(("groupoid-identity", (a,)))
            b = self.inverse_table[a]
            if comp(b, a) != self.identity[s] or comp(a, b) != self.identity[t]:
                out.append(("groupoid-inverse", (a,)))
        for f, (s, t) in arrows.items():
            for g in by_src.get(t, ()):
                gf = comp(g, f)
                for h in by_src.get(arrows[g][1], ()):
                    if comp(h, gf) != comp(comp(h, g), f):
                        out.append(("groupoid-assoc", (h, g, f)))
        return out

    def data(self):
        if self._data is None:
            self._data = (
                frozenset(self.objects),
                frozenset(self.arrows.items()),
                frozenset(self.identity.items()),
                frozenset(self.compose_table.items()),
                frozenset(self.inverse_table.items()),
            )
        return self._data

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        if isinstance(self, ProductGroupoid) and isinstance(other, ProductGroupoid):
            return self.left == other.left and self.right == other.right
        if len(self.arrows) != len(other.arrows) or len(self.objects) != len(other.objects):
            return False
        return self.data() == other.data()

    __hash__ = object.__hash__

    def __repr__(self):
        return f"FiniteGroupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"


class ProductGroupoid(FiniteGroupoid):
    """The product groupoid; objects and arrows are pairs, composition is lazy."""

    def __init__(self, left: FiniteGroupoid, right: FiniteGroupoid):
        self.left, self.right = left, right
        self.objects = tuple((x, y) for x in left.objects for y in right.objects)
        self.arrows = {
            (a, b): ((sa, sb), (ta, tb))
            for a, (sa, ta) in left.arrows.items()
            for b, (sb, tb) in right.arrows.items()
        }
        self.identity = {(x, y): (left.identity[x], right.identity[y]) for x, y in self.objects}
        self.inverse_table = {
            (a, b): (left.inverse_table[a], right.inverse_table[b]) for a, b in self.arrows
        }
        self._compose = None
        self._homs = None
        self._data = None

    @property
    def compose_table(self) -> dict:
        if self._compose is None:
            lc, rc = self.left.compose_table, self.right.compose_table
            self._compose = {
                ((g1, g2), (f1, f2)): (h1, h2)
                for (g1, f1), h1 in lc.items()
                for (g2, f2), h2 in rc.items()
            }
        return self._compose

    def comp(self, g, f):
        return (self.left.comp(g[0], f[0]), self.right.comp(g[1], f[1]))

    def check_structure(self):
        pass

    def violations(self) -> list:
        return []


def make_groupoid(objects, arrows, identity, compose, inverse) -> FiniteGroupoid:
    return FiniteGroupoid(objects, arrows, identity, compose, inverse)


def discrete_groupoid(objects, arrow_name=lambda x: ("id", x)) -> FiniteGroupoid:
    objects = list(objects)
    arrows = {arrow_name(x): (x, x) for x in objects}
    return FiniteGroupoid(
        objects,
        arrows,
        {x: arrow_name(x) for x in objects},
        {(a, a): a for a in arrows},
        {a: a for a in arrows},
    )


def codiscrete_groupoid(objects) -> FiniteGroupoid:
    """One arrow (x, y) between every ordered pair of objects."""
    objects = list(objects)
    arrows = {(x, y): (x, y) for x in objects for y in objects}
    compose = {((y, z), (x, y)): (x, z) for x in objects for y in objects for z in objects}
    return FiniteGroupoid(
        objects,
        arrows,
        {x: (x, x) for x in objects},
        compose,
        {(x, y): (y, x) for x, y in arrows},
    )


EMPTY_GROUPOID = FiniteGroupoid((), {}, {}, {}, {})
ONE = FiniteGroupoid(("*",), {"*": ("*", "*")}, {"*": "*"}, {("*", "*"): "*"}, {"*": "*"})


def relabel_groupoid(G: FiniteGroupoid, obj, arr) -> FiniteGroupoid:
    """Copy of G with objects renamed by obj and arrows by arr."""
    return FiniteGroupoid(
        [obj(x) for x in G.objects],
        {arr(a): (obj(s), obj(t)) for a, (s, t) in G.arrows.items()},
        {obj(x): arr(a) for x, a in G.identity.items()},
        {(arr(g), arr(f)): arr(h) for (g, f), h in G.compose_table.items()},
        {arr(a): arr(b) for a, b in G.inverse_table.items()},
        check=False,
    )


class GroupoidFunctor:
    def __init__(self, source, target, object_map, arrow_map, check=True):
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        self.arrow_map = dict(arrow_map)
        if check:
            self.check_structure()

    def fo(self, x):
        return self.object_map[x]

    def fa(self, a):
        return self.arrow_map[a]

    def check_structure(self):
        if set(self.object_map) != set(self.source.objects):
            raise StructuralError("functor object map must cover exactly the source objects")
        if set(self.arrow_map) != set(self.source.arrows):
            raise StructuralError("functor arrow map must cover exactly the source arrows")
        tobjs = set(self.target.objects)
        for x, y in self.object_map.items():
            if y not in tobjs:
                raise StructuralError(f"object {x!r} is sent to undeclared {y!r}")
        for a, b in self.arrow_map.items():
            if b not in self.target.arrows:
                raise StructuralError(f"arrow {a!r} is sent to undeclared {b!r}")

    def violations(self) -> list:
        out = []
        S, T = self.source, self.target
        fo, fa = self.object_map, self.arrow_map
        for a, (s, t) in S.arrows.items():
            if T.arrows[fa[a]] != (fo[s], fo[t]):
                out.append(("functor-endpoints", (a,)))
        for x, a in S.identity.items():
            if fa[a] != T.identity[fo[x]]:
                out.append(("functor-identity", (x,)))
        if out:
            return out
        if isinstance(S, ProductGroupoid):
            return self._bifunctor_violations()
        for (g, f), h in S.compose_table.items():
            if T.comp(fa[g], fa[f]) != fa[h]:
                out.append(("functor-composition", (g, f)))
        return out

    def _bifunctor_violations(self) -> list:
        # functorial in each variable separately, plus (a, b) = (a, 1)(1, b) = (1, b)(a, 1);
        # equivalent to checking the whole product compose table, at linear cost
        out = []
        S, T = self.source, self.target
        fa = self.arrow_map
        L, R = S.left, S.right
        for (g, f), h in L.compose_table.items():
            for y, i in R.identity.items():
                if T.comp(fa[(g, i)], fa[(f, i)]) != fa[(h, i)]:
                    out.append(("functor-composition", ((g, i), (f, i))))
        for (g, f), h in R.compose_table.items():
            for x, i in L.identity.items():
                if T.comp(fa[(i, g)], fa[(i, f)]) != fa[(i, h)]:
                    out.append(("functor-composition", ((i, g), (i, f))))
        for (a, b), ((x, y), (x2, y2)) in S.arrows.items():
            ix, ix2, iy, iy2 = L.identity[x], L.identity[x2], R.identity[y], R.identity[y2]
            if T.comp(fa[(a, iy2)], fa[(ix, b)]) != fa[(a, b)]:
                out.append(("functor-composition", ((a, iy2), (ix, b))))
            if T.comp(fa[(ix2, b)], fa[(a, iy)]) != fa[(a, b)]:
                out.append(("functor-composition", ((ix2, b), (a, iy))))
        return out

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GroupoidFunctor):
            return NotImplemented
        return (
            self.object_map == other.object_map
            and self.arrow_map == other.arrow_map
            and self.source == other.source
            and self.target == other.target
        )

    __hash__ = object.__hash__

    def __repr__(self):
        return f"GroupoidFunctor({len(self.object_map)} objects, {len(self.arrow_map)} arrows)"


def identity_functor(G: FiniteGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(G, G, {x: x for x in G.objects}, {a: a for a in G.arrows}, check=False)


def compose_functors(G: GroupoidFunctor, F: GroupoidFunctor) -> GroupoidFunctor:
    """G after F."""
    if F.target is not G.source and F.target != G.source:
        raise CompositionError("functors are not composable")
    go, ga = G.object_map, G.arrow_map
    return GroupoidFunctor(
        F.source,
        G.target,
        {x: go[y] for x, y in F.object_map.items()},
        {a: ga[b] for a, b in F.arrow_map.items()},
        check=False,
    )


def product_functor(F1: GroupoidFunctor, F2: GroupoidFunctor, source=None, target=None):
    source = source or ProductGroupoid(F1.source, F2.source)
    target = target or ProductGroupoid(F1.target, F2.target)
    o1, o2, a1, a2 = F1.object_map, F2.object_map, F1.arrow_map, F2.arrow_map
    return GroupoidFunctor(
        source,
        target,
        {(x, y): (o1[x], o2[y]) for x, y in source.objects},
        {(a, b): (a1[a], a2[b]) for a, b in source.arrows},
        check=False,
    )


def constant_functor(source: FiniteGroupoid, target: FiniteGroupoid, obj) -> GroupoidFunctor:
    a = target.identity[obj]
    return GroupoidFunctor(
        source, target, {x: obj for x in source.objects}, {f: a for f in source.arrows}, check=False
    )


class NatIso:
    def __init__(self, source: GroupoidFunctor, target: GroupoidFunctor, components, check=True):
        self.source = source
        self.target = target
        self.components = dict(components)
        if check:
            self.check_structure()

    def __getitem__(self, x):
        return self.components[x]

    def check_structure(self):
        S, T = self.source, self.target
        if S.source is not T.source and S.source != T.source:
            raise StructuralError("natural isomorphism between functors with different sources")
        if set(self.components) != set(S.source.objects):
            raise StructuralError("components must cover exactly the source objects")
        C = S.target
        for x, c in self.components.items():
            if C.arrows.get(c) != (S.fo(x), T.fo(x)):
                raise StructuralError(f"component at {x!r} has wrong endpoints")

    def violations(self) -> list:
        out = []
        S, T, C = self.source, self.target, self.source.target
        for a, (x, y) in S.source.arrows.items():
            if C.comp(self.components[y], S.fa(a)) != C.comp(T.fa(a), self.components[x]):
                out.append(("naturality", (a,)))
        return out

    def inverse(self) -> "NatIso":
        C = self.source.target
        return NatIso(
            self.target,
            self.source,
            {x: C.inv(c) for x, c in self.components.items()},
            check=False,
        )

    def __eq__(self, other):
        if not isinstance(other, NatIso):
            return NotImplemented
        return (
            self.components == other.components
            and self.source == other.source
            and self.target == other.target
        )

    __hash__ = object.__hash__


def identity_natiso(F: GroupoidFunctor) -> NatIso:
    T = F.target
    return NatIso(F, F, {x: T.identity[y] for x, y in F.object_map.items()}, check=False)


# ---------------------------------------------------------------- bigroupoids


class FiniteBigroupoid:
    """A bigroupoid presented by finite tables.

    hom[(A, B)] is the groupoid of 1-cells A -> B, comp[(A, B, C)] the
    composition functor hom(B, C) x hom(A, B) -> hom(A, C).  The structural
    cells are keyed as assoc[(h, g, f)], lunit[f], runit[f], counit[f],
    unit2[f].  1-cell and 2-cell ids must be unique across the whole
    bigroupoid.
    """

    def __init__(self, zero_cells, hom, comp, unit, inv, assoc, lunit, runit, counit, unit2, check=True):
        self.zero_cells = tuple(zero_cells)
        self.hom = dict(hom)
        self.comp = dict(comp)
        self.unit = dict(unit)
        self.inv = dict(inv)
        self.assoc = dict(assoc)
        self.lunit = dict(lunit)
        self.runit = dict(runit)
        self.counit = dict(counit)
        self.unit2 = dict(unit2)
        self._data = None
        self._index(check)
        if check:
            self.check_structure()

    @classmethod
    def from_tables(cls, zero_cells, hom, comp_maps, unit, inv_maps, assoc, lunit, runit, counit, unit2, check=True):
        """Build from raw (object_map, arrow_map) pairs for composition and inverse."""
        comp = {}
        for (A, B, C), (om, am) in comp_maps.items():
            src = ProductGroupoid(hom[(B, C)], hom[(A, B)])
            comp[(A, B, C)] = GroupoidFunctor(src, hom[(A, C)], om, am, check=check)
        inv = {
            (A, B): GroupoidFunctor(hom[(A, B)], hom[(B, A)], om, am, check=check)
            for (A, B), (om, am) in inv_maps.items()
        }
        return cls(zero_cells, hom, comp, unit, inv, assoc, lunit, runit, counit, unit2, check=check)

    def _index(self, check):
        cell1, cell2, arrows2 = {}, {}, {}
        out1 = {A: [] for A in self.zero_cells}
        for key in sorted(self.hom, key=cell_key):
            G = self.hom[key]
            for x in G.objects:
                if check and x in cell1:
                    raise StructuralError(f"1-cell id {x!r} is used in two hom-groupoids")
                cell1[x] = key
                if key[0] in out1:
                    out1[key[0]].append(x)
            for a, st in G.arrows.items():
                if check and a in cell2:
                    raise StructuralError(f"2-cell id {a!r} is used in two hom-groupoids")
                cell2[a] = key
                arrows2[a] = st
        self.cell1, self.cell2, self.arrows2 = cell1, cell2, arrows2
        self.out1 = {A: tuple(v) for A, v in out1.items()}
        self._id2 = {}
        self._inv2 = {}
        self._vc = {}
        for G in self.hom.values():
            self._id2.update(G.identity)
            self._inv2.update(G.inverse_table)
            self._vc.update(G.compose_table)
        self._c1, self._c2, self._s1, self._s2 = {}, {}, {}, {}
        for F in self.comp.values():
            self._c1.update(F.object_map)
            self._c2.update(F.arrow_map)
        for F in self.inv.values():
            self._s1.update(F.object_map)
            self._s2.update(F.arrow_map)

    # lookups
    def src1(self, f):
        return self.cell1[f][0]

    def tgt1(self, f):
        return self.cell1[f][1]

    def src2(self, a):
        return self.arrows2[a][0]

    def tgt2(self, a):
        return self.arrows2[a][1]

    def one(self, A):
        return self.unit[A]

    def id2(self, f):
        return self._id2[f]

    def is_id2(self, a) -> bool:
        return self._id2.get(self.arrows2[a][0]) == a

    def vcomp(self, b, a):
        """b after a (vertical)."""
        try:
            return self._vc[(b, a)]
        except KeyError:
            raise CompositionError(f"2-cells {b!r} and {a!r} are not vertically composable") from None

    def vchain(self, *cells):
        """Vertical composite, leftmost applied last."""
        out = cells[-1]
        for c in reversed(cells[:-1]):
            out = self.vcomp(c, out)
        return out

    def inv2(self, a):
        return self._inv2[a]

    def comp1(self, g, f):
        try:
            return self._c1[(g, f)]
        except KeyError:
            raise CompositionError(f"1-cells {g!r} and {f!r} are not composable") from None

    def hcomp(self, b, a):
        try:
            return self._c2[(b, a)]
        except KeyError:
            raise CompositionError(f"2-cells {b!r} and {a!r} are not horizontally composable") from None

    def star1(self, f):
        return self._s1[f]

    def star2(self, a):
        return self._s2[a]

    def a(self, h, g, f):
        return self.assoc[(h, g, f)]

    def l(self, f):
        return self.lunit[f]

    def r(self, f):
        return self.runit[f]

    def e(self, f):
        return self.counit[f]

    def i(self, f):
        return self.unit2[f]

    def one_cells(self):
        return ordered(self.cell1)

    def two_cells(self):
        return ordered(self.cell2)

    def arrows_from(self, f):
        A, B = self.cell1[f]
        G = self.hom[(A, B)]
        return [a for x in G.objects for a in G.hom(f, x)]

    def chains(self, n: int) -> list:
        """Composable n-tuples of 1-cells, written last-first as in (h, g, f)."""
        res = [(f,) for f in self.cell1]
        out1, cell1 = self.out1, self.cell1
        for _ in range(n - 1):
            res = [(g,) + c for c in res for g in out1[cell1[c[0]][1]]]
        return res

    def check_structure(self):
        cells = self.zero_cells
        if len(set(cells)) != len(cells):
            raise StructuralError("duplicate 0-cell id")
        pairs = {(A, B) for A in cells for B in cells}
        if set(self.hom) != pairs:
            raise StructuralError("hom table must cover exactly the ordered pairs of 0-cells")
        triples = {(A, B, C) for A in cells for B in cells for C in cells}
        if set(self.comp) != triples:
            raise StructuralError("composition table must cover exactly the triples of 0-cells")
        for (A, B, C), F in self.comp.items():
            src = F.source
            if not isinstance(src, ProductGroupoid) or src.left != self.hom[(B, C)] or src.right != self.hom[(A, B)]:
                raise StructuralError(f"composition functor at {(A, B, C)!r} has the wrong source")
            if F.target is not self.hom[(A, C)] and F.target != self.hom[(A, C)]:
                raise StructuralError(f"composition functor at {(A, B, C)!r} has the wrong target")
        if set(self.unit) != set(cells):
            raise StructuralError("unit table must cover exactly the 0-cells")
        for A, u in self.unit.items():
            if self.cell1.get(u) != (A, A):
                raise StructuralError(f"unit of {A!r} is not a 1-cell {A!r} -> {A!r}")
        if set(self.inv) != pairs:
            raise StructuralError("inverse table must cover exactly the ordered pairs of 0-cells")
        for (A, B), F in self.inv.items():
            if (F.source is not self.hom[(A, B)] and F.source != self.hom[(A, B)]) or (
                F.target is not self.hom[(B, A)] and F.target != self.hom[(B, A)]
            ):
                raise StructuralError(f"inverse functor at {(A, B)!r} has the wrong endpoints")

        def need(table, key, src, tgt, name):
            if key not in table:
                raise StructuralError(f"{name} component at {key!r} is missing")
            c = table[key]
            if self.arrows2.get(c) != (src, tgt):
                raise StructuralError(f"{name} component at {key!r} has wrong endpoints")

        triples1 = self.chains(3)
        if len(self.assoc) != len(triples1):
            raise StructuralError("assoc table must cover exactly the composable triples")
        c1 = self.comp1
        for h, g, f in triples1:
            need(self.assoc, (h, g, f), c1(c1(h, g), f), c1(h, c1(g, f)), "assoc")
        for name, table in (("lunit", self.lunit), ("runit", self.runit), ("counit", self.counit), ("unit2", self.unit2)):
            if len(table) != len(self.cell1):
                raise StructuralError(f"{name} table must cover exactly the 1-cells")
        for f, (A, B) in self.cell1.items():
            need(self.lunit, f, c1(self.unit[B], f), f, "lunit")
            need(self.runit, f, c1(f, self.unit[A]), f, "runit")
            need(self.counit, f, c1(self.star1(f), f), self.unit[A], "counit")
            need(self.unit2, f, self.unit[B], c1(f, self.star1(f)), "unit2")

    def data(self):
        if self._data is None:
            self._data = (
                frozenset(self.zero_cells),
                frozenset((k, G.data()) for k, G in self.hom.items()),
                frozenset(self._c1.items()),
                frozenset(self._c2.items()),
                frozenset(self.unit.items()),
                frozenset(self._s1.items()),
                frozenset(self._s2.items()),
                frozenset(self.assoc.items()),
                frozenset(self.lunit.items()),
                frozenset(self.runit.items()),
                frozenset(self.counit.items()),
                frozenset(self.unit2.items()),
            )
        return self._data

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteBigroupoid):
            return NotImplemented
        if len(self.cell1) != len(other.cell1) or len(self.cell2) != len(other.cell2):
            return False
        return self.data() == other.data()

    __hash__ = object.__hash__

    def sizes(self) -> tuple:
        return (len(self.zero_cells), len(self.cell1), len(self.cell2))

    def is_strict(self) -> bool:
        return all(
            self.is_id2(c)
            for table in (self.assoc, self.lunit, self.runit, self.counit, self.unit2)
            for c in table.values()
        )

    def __repr__(self):
        n0, n1, n2 = self.sizes()
        return f"FiniteBigroupoid({n0} 0-cells, {n1} 1-cells, {n2} 2-cells)"


def _naturality_in_each_variable(B: FiniteBigroupoid, out: list):
    vc, hc, id2, c1 = B.vcomp, B.hcomp, B.id2, B.comp1
    tgt2 = B.tgt2
    for h, g, f in B.chains(3):
        a = B.a(h, g, f)
        ig, if_, ih = id2(g), id2(f), id2(h)
        for x in B.arrows_from(h):
            h2 = tgt2(x)
            if vc(B.a(h2, g, f), hc(hc(x, ig), if_)) != vc(hc(x, hc(ig, if_)), a):
                out.append(("naturality-assoc", (x, g, f)))
        for x in B.arrows_from(g):
            g2 = tgt2(x)
            if vc(B.a(h, g2, f), hc(hc(ih, x), if_)) != vc(hc(ih, hc(x, if_)), a):
                out.append(("naturality-assoc", (h, x, f)))
        for x in B.arrows_from(f):
            f2 = tgt2(x)
            if vc(B.a(h, g, f2), hc(hc(ih, ig), x)) != vc(hc(ih, hc(ig, x)), a):
                out.append(("naturality-assoc", (h, g, x)))
    for x, (f, f2) in B.arrows2.items():
        A, C = B.cell1[f]
        i1A, i1C = id2(B.one(A)), id2(B.one(C))
        if vc(B.l(f2), hc(i1C, x)) != vc(x, B.l(f)):
            out.append(("naturality-lunit", (x,)))
        if vc(B.r(f2), hc(x, i1A)) != vc(x, B.r(f)):
            out.append(("naturality-runit", (x,)))
        if vc(B.e(f2), hc(B.star2(x), x)) != B.e(f):
            out.append(("naturality-counit", (x,)))
        if vc(hc(x, B.star2(x)), B.i(f)) != B.i(f2):
            out.append(("naturality-unit2", (x,)))


def validate_bigroupoid(B: FiniteBigroupoid) -> ValidationReport:
    out = []
    for key in ordered(B.hom):
        out.extend((tag, (key,) + t) for tag, t in B.hom[key].violations())
    for key in ordered(B.comp):
        out.extend((tag, ("comp", key) + t) for tag, t in B.comp[key].violations())
    for key in ordered(B.inv):
        out.extend((tag, ("inv", key) + t) for tag, t in B.inv[key].violations())
    if out:
        # axioms below presuppose functorial tables
        return ValidationReport.of(out)
    _naturality_in_each_variable(B, out)
    vc, hc, id2, c1, a = B.vcomp, B.hcomp, B.id2, B.comp1, B.a
    for k, h, g, f in B.chains(4):
        lhs = vc(vc(hc(id2(k), a(h, g, f)), a(k, c1(h, g), f)), hc(a(k, h, g), id2(f)))
        rhs = vc(a(k, h, c1(g, f)), a(c1(k, h), g, f))
        if lhs != rhs:
            out.append(("pentagon", (k, h, g, f)))
    for g, f in B.chains(2):
        one = B.one(B.tgt1(f))
        if vc(hc(id2(g), B.l(f)), a(g, one, f)) != hc(B.r(g), id2(f)):
            out.append(("triangle", (g, f)))
    for f in B.cell1:
        fs = B.star1(f)
        lhs = B.vchain(B.r(f), hc(id2(f), B.e(f)), a(f, fs, f), hc(B.i(f), id2(f)))
        if lhs != B.l(f):
            out.append(("zigzag", (f,)))
    return ValidationReport.of(out)


# ---------------------------------------------------------------- pseudofunctors


class Pseudofunctor:
    """A morphism of bigroupoids with comparison cells

    phi_comp[(g, f)] : F g . F f -> F(g f)
    phi_unit[A]      : 1_{FA} -> F(1_A)
    phi_inv[f]       : (F f)* -> F(f*)
    """

    def __init__(self, source, target, zero_map, local, phi_comp, phi_unit, phi_inv, check=True):
        self.source = source
        self.target = target
        self.zero_map = dict(zero_map)
        self.local = dict(local)
        self.phi_comp = dict(phi_comp)
        self.phi_unit = dict(phi_unit)
        self.phi_inv = dict(phi_inv)
        self._f1, self._f2 = {}, {}
        for F in self.local.values():
            self._f1.update(F.object_map)
            self._f2.update(F.arrow_map)
        if check:
            self.check_structure()

    def f0(self, A):
        return self.zero_map[A]

    def f1(self, f):
        return self._f1[f]

    def f2(self, a):
        return self._f2[a]

    def check_structure(self):
        S, T = self.source, self.target
        if set(self.zero_map) != set(S.zero_cells):
            raise StructuralError("0-cell map must cover exactly the source 0-cells")
        tcells = set(T.zero_cells)
        if any(v not in tcells for v in self.zero_map.values()):
            raise StructuralError("0-cell map hits an undeclared 0-cell")
        if set(self.local) != set(S.hom):
            raise StructuralError("local functors must cover exactly the source hom pairs")
        F0 = self.zero_map
        for (A, B), F in self.local.items():
            if F.source is not S.hom[(A, B)] and F.source != S.hom[(A, B)]:
                raise StructuralError(f"local functor at {(A, B)!r} has the wrong source")
            if F.target is not T.hom[(F0[A], F0[B])] and F.target != T.hom[(F0[A], F0[B])]:
                raise StructuralError(f"local functor at {(A, B)!r} has the wrong target")
        f1, c1, tc = self.f1, T.comp1, T.arrows2

        def need(table, key, src, tgt, name):
            if key not in table:
                raise StructuralError(f"{name} component at {key!r} is missing")
            if tc.get(table[key]) != (src, tgt):
                raise StructuralError(f"{name} component at {key!r} has wrong endpoints")

        pairs = S.chains(2)
        if len(self.phi_comp) != len(pairs):
            raise StructuralError("phi_comp must cover exactly the composable pairs")
        for g, f in pairs:
            need(self.phi_comp, (g, f), c1(f1(g), f1(f)), f1(S.comp1(g, f)), "phi_comp")
        if set(self.phi_unit) != set(S.zero_cells):
            raise StructuralError("phi_unit must cover exactly the source 0-cells")
        for A in S.zero_cells:
            need(self.phi_unit, A, T.one(F0[A]), f1(S.one(A)), "phi_unit")
        if set(self.phi_inv) != set(S.cell1):
            raise StructuralError("phi_inv must cover exactly the source 1-cells")
        for f in S.cell1:
            need(self.phi_inv, f, T.star1(f1(f)), f1(S.star1(f)), "phi_inv")

    def is_strict(self) -> bool:
        T = self.target
        return all(
            T.is_id2(c)
            for table in (self.phi_comp, self.phi_unit, self.phi_inv)
            for c in table.values()
        )

    def same_maps(self, other: "Pseudofunctor") -> bool:
        return (
            self.zero_map == other.zero_map
            and self._f1 == other._f1
            and self._f2 == other._f2
            and self.phi_comp == other.phi_comp
            and self.phi_unit == other.phi_unit
            and self.phi_inv == other.phi_inv
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Pseudofunctor):
            return NotImplemented
        return self.same_maps(other) and self.source == other.source and self.target == other.target

    __hash__ = object.__hash__

    def __repr__(self):
        return f"Pseudofunctor({self.source!r} -> {self.target!r})"


def validate_pseudofunctor(F: Pseudofunctor) -> ValidationReport:
    S, T = F.source, F.target
    out = []
    for key in ordered(F.local):
        out.extend((tag, ("local", key) + t) for tag, t in F.local[key].violations())
    if out:
        return ValidationReport.of(out)
    vc, hc, id2, c1 = T.vcomp, T.hcomp, T.id2, T.comp1
    f1, f2 = F.f1, F.f2
    pc, pu, pi = F.phi_comp, F.phi_unit, F.phi_inv
    for g, f in S.chains(2):
        phi = pc[(g, f)]
        for x in S.arrows_from(g):
            g2 = S.tgt2(x)
            if vc(pc[(g2, f)], hc(f2(x), id2(f1(f)))) != vc(f2(S.hcomp(x, S.id2(f))), phi):
                out.append(("naturality-phi", (x, f)))
        for x in S.arrows_from(f):
            f2_ = S.tgt2(x)
            if vc(pc[(g, f2_)], hc(id2(f1(g)), f2(x))) != vc(f2(S.hcomp(S.id2(g), x)), phi):
                out.append(("naturality-phi", (g, x)))
    for x, (f, f2_) in S.arrows2.items():
        if vc(pi[f2_], T.star2(f2(x))) != vc(f2(S.star2(x)), pi[f]):
            out.append(("naturality-phi-inv", (x,)))
    for h, g, f in S.chains(3):
        Fh, Fg, Ff = f1(h), f1(g), f1(f)
        lhs = _chain(T, f2(S.a(h, g, f)), pc[(S.comp1(h, g), f)], hc(pc[(h, g)], id2(Ff)))
        rhs = _chain(T, pc[(h, S.comp1(g, f))], hc(id2(Fh), pc[(g, f)]), T.a(Fh, Fg, Ff))
        if lhs != rhs:
            out.append(("hexagon", (h, g, f)))
    for f, (A, B) in S.cell1.items():
        Ff = f1(f)
        oneA, oneB = S.one(A), S.one(B)
        if _chain(T, f2(S.r(f)), pc[(f, oneA)], hc(id2(Ff), pu[A])) != T.r(Ff):
            out.append(("unit-r", (f,)))
        if _chain(T, f2(S.l(f)), pc[(oneB, f)], hc(pu[B], id2(Ff))) != T.l(Ff):
            out.append(("unit-l", (f,)))
        fs = S.star1(f)
        if _chain(T, f2(S.e(f)), pc[(fs, f)], hc(pi[f], id2(Ff))) != vc(pu[A], T.e(Ff)):
            out.append(("counit", (f,)))
        if vc(f2(S.i(f)), pu[B]) != _chain(T, pc[(f, fs)], hc(id2(Ff), pi[f]), T.i(Ff)):
            out.append(("unit2", (f,)))
    return ValidationReport.of(out)


def _chain(B: FiniteBigroupoid, *cells):
    return B.vchain(*cells)


def identity_pseudofunctor(B: FiniteBigroupoid) -> Pseudofunctor:
    return Pseudofunctor(
        B,
        B,
        {A: A for A in B.zero_cells},
        {k: identity_functor(G) for k, G in B.hom.items()},
        {(g, f): B.id2(B.comp1(g, f)) for g, f in B.chains(2)},
        {A: B.id2(B.one(A)) for A in B.zero_cells},
        {f: B.id2(B.star1(f)) for f in B.cell1},
        check=False,
    )


def compose_pseudofunctors(G: Pseudofunctor, F: Pseudofunctor) -> Pseudofunctor:
    """G after F, with comparison cells pasted from both."""
    if F.target is not G.source and F.target != G.source:
        raise CompositionError("target of the first morphism is not the source of the second")
    S, T = F.source, G.target
    F0 = F.zero_map
    local = {
        (A, B): compose_functors(G.local[(F0[A], F0[B])], Fl) for (A, B), Fl in F.local.items()
    }
    g1, g2, vc = G.f1, G.f2, T.vcomp
    f1 = F.f1
    phi_comp = {(g, f): vc(g2(c), G.phi_comp[(f1(g), f1(f))]) for (g, f), c in F.phi_comp.items()}
    phi_unit = {A: vc(g2(c), G.phi_unit[F0[A]]) for A, c in F.phi_unit.items()}
    phi_inv = {f: vc(g2(c), G.phi_inv[f1(f)]) for f, c in F.phi_inv.items()}
    return Pseudofunctor(
        S, T, {A: G.zero_map[B] for A, B in F0.items()}, local, phi_comp, phi_unit, phi_inv, check=False
    )


def strict_pseudofunctor(source, target, zero_map, local) -> Pseudofunctor:
    """A morphism whose comparison cells are identities; raises if that is ill-typed."""
    tmp = {}
    for F in local.values():
        tmp.update(F.object_map)
    S, T = source, target
    return Pseudofunctor(
        S,
        T,
        zero_map,
        local,
        {(g, f): T.id2(tmp[S.comp1(g, f)]) for g, f in S.chains(2)},
        {A: T.id2(tmp[S.one(A)]) for A in S.zero_cells},
        {f: T.id2(tmp[S.star1(f)]) for f in S.cell1},
    )


# ---------------------------------------------------------------- icons


class Icon:
    def __init__(self, source: Pseudofunctor, target: Pseudofunctor, components, check=True):
        self.source = source
        self.target = target
        self.components = dict(components)
        self._c = {}
        for N in self.components.values():
            self._c.update(N.components)
        if check:
            self.check_structure()

    def __getitem__(self, f):
        return self._c[f]

    def check_structure(self):
        F, G = self.source, self.target
        if F.zero_map != G.zero_map:
            raise StructuralError("icon between morphisms that disagree on 0-cells")
        if set(self.components) != set(F.local):
            raise StructuralError("icon components must cover exactly the hom pairs")
        T = F.target
        for key, N in self.components.items():
            if set(N.components) != set(F.local[key].source.objects):
                raise StructuralError(f"icon components at {key!r} do not cover the 1-cells")
            for f, c in N.components.items():
                if T.arrows2.get(c) != (F.f1(f), G.f1(f)):
                    raise StructuralError(f"icon component at {f!r} has wrong endpoints")

    def violations(self) -> list:
        F, G = self.source, self.target
        S, T = F.source, F.target
        out = []
        for key in ordered(self.components):
            N = self.components[key]
            for a, (f, f2) in N.source.source.arrows.items():
                if T.vcomp(self._c[f2], F.f2(a)) != T.vcomp(G.f2(a), self._c[f]):
                    out.append(("icon-naturality", (a,)))
        c = self._c
        for g, f in S.chains(2):
            lhs = T.vcomp(c[S.comp1(g, f)], F.phi_comp[(g, f)])
            rhs = T.vcomp(G.phi_comp[(g, f)], T.hcomp(c[g], c[f]))
            if lhs != rhs:
                out.append(("icon-comp", (g, f)))
        for A in S.zero_cells:
            if T.vcomp(c[S.one(A)], F.phi_unit[A]) != G.phi_unit[A]:
                out.append(("icon-unit", (A,)))
        for f in S.cell1:
            lhs = T.vcomp(c[S.star1(f)], F.phi_inv[f])
            rhs = T.vcomp(G.phi_inv[f], T.star2(c[f]))
            if lhs != rhs:
                out.append(("icon-inv", (f,)))
        return out


def validate_icon(icon: Icon) -> ValidationReport:
    return ValidationReport.of(icon.violations())


def icon_from_cells(F: Pseudofunctor, G: Pseudofunctor, cells: dict) -> Icon:
    comps = {
        key: NatIso(F.local[key], G.local[key], {f: cells[f] for f in F.local[key].source.objects})
        for key in F.local
    }
    return Icon(F, G, comps)


def identity_icon(F: Pseudofunctor) -> Icon:
    return Icon(F, F, {k: identity_natiso(L) for k, L in F.local.items()})


# ---------------------------------------------------------------- products and terminal object


def product_bigroupoid(B: FiniteBigroupoid, C: FiniteBigroupoid) -> FiniteBigroupoid:
    cells = [(A, A2) for A in B.zero_cells for A2 in C.zero_cells]
    hom = {(X, Y): ProductGroupoid(B.hom[(X[0], Y[0])], C.hom[(X[1], Y[1])]) for X in cells for Y in cells}
    bc1, cc1, bc2, cc2 = B._c1, C._c1, B._c2, C._c2
    comp = {}
    for X in cells:
        for Y in cells:
            for Z in cells:
                src = ProductGroupoid(hom[(Y, Z)], hom[(X, Y)])
                om = {
                    (g, f): (bc1[(g[0], f[0])], cc1[(g[1], f[1])]) for g, f in src.objects
                }
                am = {
                    (b, a): (bc2[(b[0], a[0])], cc2[(b[1], a[1])]) for b, a in src.arrows
                }
                comp[(X, Y, Z)] = GroupoidFunctor(src, hom[(X, Z)], om, am, check=False)
    inv = {}
    for (X, Y), G in hom.items():
        inv[(X, Y)] = GroupoidFunctor(
            G,
            hom[(Y, X)],
            {f: (B.star1(f[0]), C.star1(f[1])) for f in G.objects},
            {a: (B.star2(a[0]), C.star2(a[1])) for a in G.arrows},
            check=False,
        )
    unit = {X: (B.one(X[0]), C.one(X[1])) for X in cells}
    P = FiniteBigroupoid(cells, hom, comp, unit, inv, {}, {}, {}, {}, {}, check=False)
    P.assoc = {
        (h, g, f): (B.a(h[0], g[0], f[0]), C.a(h[1], g[1], f[1])) for h, g, f in P.chains(3)
    }
    for name in ("lunit", "runit", "counit", "unit2"):
        bt, ct = getattr(B, name), getattr(C, name)
        setattr(P, name, {f: (bt[f[0]], ct[f[1]]) for f in P.cell1})
    return P


def projection(P: FiniteBigroupoid, B: FiniteBigroupoid, index: int) -> Pseudofunctor:
    local = {}
    for (X, Y), G in P.hom.items():
        target = B.hom[(X[index], Y[index])]
        local[(X, Y)] = GroupoidFunctor(
            G, target, {f: f[index] for f in G.objects}, {a: a[index] for a in G.arrows}, check=False
        )
    return strict_pseudofunctor(P, B, {X: X[index] for X in P.zero_cells}, local)


def pairing(F: Pseudofunctor, G: Pseudofunctor, P: FiniteBigroupoid) -> Pseudofunctor:
    """The morphism <F, G> into the product P of the two targets."""
    if F.source is not G.source and F.source != G.source:
        raise CompositionError("pairing needs a common source")
    S = F.source
    zero = {A: (F.f0(A), G.f0(A)) for A in S.zero_cells}
    local = {}
    for (A, B), Gl in S.hom.items():
        local[(A, B)] = GroupoidFunctor(
            Gl,
            P.hom[(zero[A], zero[B])],
            {f: (F.f1(f), G.f1(f)) for f in Gl.objects},
            {a: (F.f2(a), G.f2(a)) for a in Gl.arrows},
            check=False,
        )
    return Pseudofunctor(
        S,
        P,
        zero,
        local,
        {k: (F.phi_comp[k], G.phi_comp[k]) for k in F.phi_comp},
        {k: (F.phi_unit[k], G.phi_unit[k]) for k in F.phi_unit},
        {k: (F.phi_inv[k], G.phi_inv[k]) for k in F.phi_inv},
    )


def product_pseudofunctor(F: Pseudofunctor, G: Pseudofunctor, source: FiniteBigroupoid, target: FiniteBigroupoid) -> Pseudofunctor:
    """F x G between the given products of sources and of targets."""
    p1 = projection(source, F.source, 0)
    p2 = projection(source, G.source, 1)
    return pairing(compose_pseudofunctors(F, p1), compose_pseudofunctors(G, p2), target)


def diagonal(B: FiniteBigroupoid, P: FiniteBigroupoid) -> Pseudofunctor:
    I = identity_pseudofunctor(B)
    return pairing(I, I, P)


def product_and_diagonal(B: FiniteBigroupoid, C: FiniteBigroupoid):
    """Returns (B x C, projections, diagonal or None when B and C differ)."""
    P = product_bigroupoid(B, C)
    projs = (projection(P, B, 0), projection(P, C, 1))
    delta = diagonal(B, P) if (B is C or B == C) else None
    return P, projs, delta


def terminal_bigroupoid() -> FiniteBigroupoid:
    G = FiniteGroupoid(("1",), {"id": ("1", "1")}, {"1": "id"}, {("id", "id"): "id"}, {"id": "id"})
    src = ProductGroupoid(G, G)
    comp = {("*", "*", "*"): GroupoidFunctor(src, G, {("1", "1"): "1"}, {("id", "id"): "id"})}
    inv = {("*", "*"): identity_functor(G)}
    return FiniteBigroupoid(
        ("*",), {("*", "*"): G}, comp, {"*": "1"}, inv,
        {("1", "1", "1"): "id"}, {"1": "id"}, {"1": "id"}, {"1": "id"}, {"1": "id"},
    )


def empty_bigroupoid() -> FiniteBigroupoid:
    return FiniteBigroupoid((), {}, {}, {}, {}, {}, {}, {}, {}, {})


def bang(B: FiniteBigroupoid, terminal: FiniteBigroupoid | None = None) -> Pseudofunctor:
    T = terminal or terminal_bigroupoid()
    G = T.hom[("*", "*")]
    local = {
        k: GroupoidFunctor(H, G, {f: "1" for f in H.objects}, {a: "id" for a in H.arrows}, check=False)
        for k, H in B.hom.items()
    }
    return strict_pseudofunctor(B, T, {A: "*" for A in B.zero_cells}, local)


def terminal_and_bang(B: FiniteBigroupoid):
    T = terminal_bigroupoid()
    return T, bang(B, T)


# ---------------------------------------------------------------- sub-bigroupoids


def full_sub_bigroupoid(B: FiniteBigroupoid, cells) -> FiniteBigroupoid:
    keep = [A for A in B.zero_cells if A in set(cells)]
    hom = {(A, C): B.hom[(A, C)] for A in keep for C in keep}
    comp = {(A, C, D): B.comp[(A, C, D)] for A in keep for C in keep for D in keep}
    inv = {k: B.inv[k] for k in hom}
    ones = {x for k in hom for x in hom[k].objects}
    sub = FiniteBigroupoid(
        keep, hom, comp, {A: B.one(A) for A in keep}, inv, {}, {}, {}, {}, {}, check=False
    )
    sub.assoc = {k: B.assoc[k] for k in sub.chains(3)}
    for name in ("lunit", "runit", "counit", "unit2"):
        table = getattr(B, name)
        setattr(sub, name, {f: table[f] for f in ones})
    return sub


def inclusion(sub: FiniteBigroupoid, B: FiniteBigroupoid) -> Pseudofunctor:
    return strict_pseudofunctor(
        sub,
        B,
        {A: A for A in sub.zero_cells},
        {k: GroupoidFunctor(G, B.hom[k], {x: x for x in G.objects}, {a: a for a in G.arrows}, check=False)
         for k, G in sub.hom.items()},
    )
