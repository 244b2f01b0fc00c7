"""Small bigroupoids and morphisms used as test fixtures and as CLI samples."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import (
    FiniteBigroupoid,
    FiniteGroupoid,
    GroupoidFunctor,
    ProductGroupoid,
    Pseudofunctor,
    StructuralError,
    codiscrete_groupoid,
    cell_key,
    discrete_groupoid,
    validate_pseudofunctor,
)


@dataclass(frozen=True)
class FiniteGroup:
    names: tuple
    mul: dict  # (x, y) -> x*y
    unit: str

    def inv(self, x):
        return next(y for y in self.names if self.mul[(x, y)] == self.unit)


def cyclic_group(n: int, letter: str = "f") -> FiniteGroup:
    def name(k):
        return "1" if k == 0 else (letter if k == 1 else f"{letter}{k}")

    names = tuple(name(k) for k in range(n))
    mul = {(name(a), name(b)): name((a + b) % n) for a in range(n) for b in range(n)}
    return FiniteGroup(names, mul, "1")


def cyclic_cocycle(n: int, m: int, scale: int = 1):
    """The 3-cocycle a(b + c - [b + c]) / n on Z/n with values in Z/m.

    It is a cocycle whenever m divides scale * n ... in practice use m == n or
    m a divisor of n.
    """

    def c(x, y, z):
        return (scale * x * ((y + z) - (y + z) % n) // n) % m

    return c


class CocycleBigroupoid(FiniteBigroupoid):
    """One 0-cell, 1-cells the elements of a finite group H, and at each 1-cell
    an automorphism torsor over Z/m; associativity is measured by a cocycle."""

    label_modulus: int

    def cell(self, f, a):
        return f"{f}:{a % self.label_modulus}"

    def label(self, cell) -> int:
        return int(cell.rsplit(":", 1)[1])

    def one_cell(self, cell):
        return cell.rsplit(":", 1)[0]


def cocycle_bigroupoid(group: FiniteGroup, m: int, c) -> CocycleBigroupoid:
    """c(h, g, f) takes group names; it must be a normalized 3-cocycle valued in Z/m."""
    P = "*"
    names = group.names

    def cell(f, a):
        return f"{f}:{a % m}"

    arrows = {cell(f, a): (f, f) for f in names for a in range(m)}
    G = FiniteGroupoid(
        names,
        arrows,
        {f: cell(f, 0) for f in names},
        {(cell(f, b), cell(f, a)): cell(f, a + b) for f in names for a in range(m) for b in range(m)},
        {cell(f, a): cell(f, -a) for f in names for a in range(m)},
    )
    mul = group.mul
    src = ProductGroupoid(G, G)
    comp = GroupoidFunctor(
        src,
        G,
        {(g, f): mul[(g, f)] for g in names for f in names},
        {(b, a): cell(mul[(b.rsplit(":", 1)[0], a.rsplit(":", 1)[0])], int(b.rsplit(":", 1)[1]) + int(a.rsplit(":", 1)[1]))
         for b in arrows for a in arrows},
    )
    inverse = {f: group.inv(f) for f in names}
    inv = GroupoidFunctor(
        G,
        G,
        inverse,
        {cell(f, a): cell(inverse[f], -a) for f in names for a in range(m)},
    )
    assoc = {(h, g, f): cell(mul[(mul[(h, g)], f)], c(h, g, f)) for h in names for g in names for f in names}
    zero = {f: cell(f, 0) for f in names}
    unit1 = group.unit
    counit = {f: cell(unit1, 0) for f in names}
    unit2 = {f: cell(unit1, -c(f, inverse[f], f)) for f in names}
    B = CocycleBigroupoid(
        (P,), {(P, P): G}, {(P, P, P): comp}, {P: unit1}, {(P, P): inv},
        assoc, zero, dict(zero), counit, unit2,
    )
    B.label_modulus = m
    B.group = group
    return B


def z2_cocycle_fixture() -> CocycleBigroupoid:
    """B(Z/2, Z/2, c) with the nontrivial normalized 3-cocycle c(f, f, f) = 1."""
    H = cyclic_group(2)
    idx = {"1": 0, "f": 1}
    c = cyclic_cocycle(2, 2)
    return cocycle_bigroupoid(H, 2, lambda h, g, f: c(idx[h], idx[g], idx[f]))


def delooping(group: FiniteGroup) -> CocycleBigroupoid:
    """One 0-cell, the group as 1-cells, identity 2-cells only."""
    return cocycle_bigroupoid(group, 1, lambda h, g, f: 0)


def zero_cocycle_fixture(group: FiniteGroup, m: int) -> CocycleBigroupoid:
    return cocycle_bigroupoid(group, m, lambda h, g, f: 0)


def groupoid_bigroupoid(G: FiniteGroupoid) -> FiniteBigroupoid:
    """The locally discrete bigroupoid whose 1-cells are the arrows of G."""
    cells = list(G.objects)

    def two(a):
        return ("=", a)

    hom = {}
    for A in cells:
        for B in cells:
            hom[(A, B)] = discrete_groupoid(G.hom(A, B), two)
    comp_maps, inv_maps = {}, {}
    for A in cells:
        for B in cells:
            inv_maps[(A, B)] = (
                {f: G.inv(f) for f in G.hom(A, B)},
                {two(f): two(G.inv(f)) for f in G.hom(A, B)},
            )
            for C in cells:
                pairs = [(g, f) for g in G.hom(B, C) for f in G.hom(A, B)]
                comp_maps[(A, B, C)] = (
                    {(g, f): G.comp(g, f) for g, f in pairs},
                    {(two(g), two(f)): two(G.comp(g, f)) for g, f in pairs},
                )
    all1 = list(G.arrows)
    B = FiniteBigroupoid.from_tables(
        cells, hom, comp_maps, {A: G.id(A) for A in cells}, inv_maps, {}, {}, {}, {}, {}, check=False,
    )
    B.assoc = {(h, g, f): two(G.comp(G.comp(h, g), f)) for h, g, f in B.chains(3)}
    B.lunit = {f: two(f) for f in all1}
    B.runit = {f: two(f) for f in all1}
    B.counit = {f: two(G.id(G.src(f))) for f in all1}
    B.unit2 = {f: two(G.id(G.tgt(f))) for f in all1}
    B.check_structure()
    return B


def codiscrete_bigroupoid(names) -> FiniteBigroupoid:
    return groupoid_bigroupoid(codiscrete_groupoid(list(names)))


def coproduct(B: FiniteBigroupoid, C: FiniteBigroupoid) -> FiniteBigroupoid:
    """Disjoint union; the two inputs must use disjoint ids."""
    if set(B.zero_cells) & set(C.zero_cells) or set(B.cell1) & set(C.cell1) or set(B.cell2) & set(C.cell2):
        raise StructuralError("coproduct needs disjoint ids")
    cells = B.zero_cells + C.zero_cells
    empty = FiniteGroupoid((), {}, {}, {}, {})
    hom = {}
    for X in cells:
        for Y in cells:
            hom[(X, Y)] = B.hom.get((X, Y)) or C.hom.get((X, Y)) or empty
    comp, inv = {}, {}
    for X in cells:
        for Y in cells:
            inv[(X, Y)] = B.inv.get((X, Y)) or C.inv.get((X, Y)) or GroupoidFunctor(empty, empty, {}, {})
            for Z in cells:
                F = B.comp.get((X, Y, Z)) or C.comp.get((X, Y, Z))
                if F is None:
                    src = ProductGroupoid(hom[(Y, Z)], hom[(X, Y)])
                    F = GroupoidFunctor(src, hom[(X, Z)], {}, {})
                comp[(X, Y, Z)] = F
    return FiniteBigroupoid(
        cells, hom, comp, {**B.unit, **C.unit}, inv,
        {**B.assoc, **C.assoc}, {**B.lunit, **C.lunit}, {**B.runit, **C.runit},
        {**B.counit, **C.counit}, {**B.unit2, **C.unit2},
    )


# ---------------------------------------------------------------- twisting


def twist_bigroupoid(B: FiniteBigroupoid, kappa: dict, nu: dict, mu: dict) -> FiniteBigroupoid:
    """Same cells and composition as B, new structural cells chosen so that the
    identity on cells, with comparison cells kappa[(g, f)] : gf -> gf,
    nu[A] : 1_A -> 1_A and mu[f] : f* -> f*, is a morphism from the result to B.

    The automorphisms must be natural (automatic when all 2-cells commute).
    """
    vc, hc, inv, id2, c1, s1 = B.vcomp, B.hcomp, B.inv2, B.id2, B.comp1, B.star1
    assoc = {}
    for h, g, f in B.chains(3):
        assoc[(h, g, f)] = B.vchain(
            kappa[(h, c1(g, f))],
            hc(id2(h), kappa[(g, f)]),
            B.a(h, g, f),
            inv(hc(kappa[(h, g)], id2(f))),
            inv(kappa[(c1(h, g), f)]),
        )
    lunit, runit, counit, unit2 = {}, {}, {}, {}
    for f, (A, C) in B.cell1.items():
        oneA, oneC = B.one(A), B.one(C)
        lunit[f] = B.vchain(B.l(f), inv(hc(nu[C], id2(f))), inv(kappa[(oneC, f)]))
        runit[f] = B.vchain(B.r(f), inv(hc(id2(f), nu[A])), inv(kappa[(f, oneA)]))
        counit[f] = B.vchain(nu[A], B.e(f), inv(hc(mu[f], id2(f))), inv(kappa[(s1(f), f)]))
        unit2[f] = B.vchain(kappa[(f, s1(f))], hc(id2(f), mu[f]), B.i(f), inv(nu[C]))
    T = FiniteBigroupoid(
        B.zero_cells, B.hom, B.comp, B.unit, B.inv, assoc, lunit, runit, counit, unit2
    )
    for attr in ("label_modulus", "group"):
        if hasattr(B, attr):
            setattr(T, attr, getattr(B, attr))
    return T


def twist_comparison(B_twisted: FiniteBigroupoid, B: FiniteBigroupoid, kappa, nu, mu) -> Pseudofunctor:
    """The identity-on-cells morphism from a twisted bigroupoid back to B."""
    local = {k: GroupoidFunctor(G, B.hom[k], {x: x for x in G.objects}, {a: a for a in G.arrows})
             for k, G in B_twisted.hom.items()}
    return Pseudofunctor(B_twisted, B, {A: A for A in B.zero_cells}, local, kappa, nu, mu)


def random_twist_data(B: FiniteBigroupoid, rng: random.Random):
    def pick(f):
        return rng.choice(B.hom[B.cell1[f]].hom(f, f))

    kappa = {(g, f): pick(B.comp1(g, f)) for g, f in B.chains(2)}
    nu = {A: pick(B.one(A)) for A in B.zero_cells}
    mu = {f: pick(B.star1(f)) for f in B.cell1}
    return kappa, nu, mu


def twist_pseudofunctor(F: Pseudofunctor, theta: dict) -> Pseudofunctor:
    """Conjugate F by 2-cells theta[f] : F'f -> Ff with F'f = Ff.

    theta[f] must be an automorphism of F(f); the result F' comes with the
    icon theta : F' => F.
    """
    S, T = F.source, F.target
    vc, inv, hc = T.vcomp, T.inv2, T.hcomp
    local = {}
    for key, L in F.local.items():
        am = {a: T.vchain(inv(theta[y]), L.fa(a), theta[x]) for a, (x, y) in L.source.arrows.items()}
        local[key] = GroupoidFunctor(L.source, L.target, L.object_map, am)
    phi_comp = {
        (g, f): T.vchain(inv(theta[S.comp1(g, f)]), c, hc(theta[g], theta[f]))
        for (g, f), c in F.phi_comp.items()
    }
    phi_unit = {A: vc(inv(theta[S.one(A)]), c) for A, c in F.phi_unit.items()}
    phi_inv = {f: T.vchain(inv(theta[S.star1(f)]), c, T.star2(theta[f])) for f, c in F.phi_inv.items()}
    return Pseudofunctor(S, T, F.zero_map, local, phi_comp, phi_unit, phi_inv)


def random_theta(F: Pseudofunctor, rng: random.Random) -> dict:
    T = F.target
    out = {}
    for f in F.source.one_cells():
        Ff = F.f1(f)
        out[f] = rng.choice(T.hom[T.cell1[Ff]].hom(Ff, Ff))
    return out


# ---------------------------------------------------------------- morphisms between one-object fixtures


def group_morphisms(S: CocycleBigroupoid, T: CocycleBigroupoid, hmap: dict, amap, limit=None):
    """All morphisms S -> T over the group map hmap and label map amap, found
    by searching comparison labels.  phi_inv is forced by the counit square."""
    P, Q = S.zero_cells[0], T.zero_cells[0]
    names = S.group.names
    SG, TG = S.hom[(P, P)], T.hom[(Q, Q)]
    m = T.label_modulus
    local = GroupoidFunctor(
        SG, TG, hmap, {a: T.cell(hmap[S.one_cell(a)], amap(S.label(a))) for a in SG.arrows}
    )
    pairs = [(g, f) for g in names for f in names if g != S.group.unit and f != S.group.unit]
    unit = S.group.unit
    found = []
    for labels in itertools.product(range(m), repeat=len(pairs) + 1):
        psi = dict(zip(pairs, labels[:-1]))
        u = labels[-1]

        def comp_label(g, f):
            if g == unit:
                # forced by the left unit square
                return 0
            if f == unit:
                return 0
            return psi[(g, f)]

        phi_comp = {(g, f): T.cell(hmap[S.group.mul[(g, f)]], comp_label(g, f) - (u if unit in (g, f) else 0))
                    for g in names for f in names}
        phi_unit = {P: T.cell(hmap[unit], u)}
        phi_inv = {}
        for f in names:
            fs = S.group.inv(f)
            # e-square: label(Fe) + phi(f*, f) + phi_f = phi_A + e'
            lab = u + T.label(T.e(hmap[f])) - amap(S.label(S.e(f))) - T.label(phi_comp[(fs, f)])
            phi_inv[f] = T.cell(hmap[fs], lab)
        try:
            F = Pseudofunctor(S, T, {P: Q}, {(P, P): local}, phi_comp, phi_unit, phi_inv)
        except StructuralError:
            continue
        if validate_pseudofunctor(F).ok:
            found.append(F)
            if limit and len(found) >= limit:
                break
    return found


def sort_by_key(items):
    return sorted(items, key=cell_key)
