"""The model structure on finite bigroupoids: classification of morphisms,
both factorizations, both lifting solvers, pullbacks of fibrations and path
objects.  Every construction re-validates what it returns."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import gpd
from .core import (
    ONE,
    ClassError,
    ConeError,
    ConstructionError,
    FiniteBigroupoid,
    FiniteGroupoid,
    GroupoidFunctor,
    NatIso,
    ProductGroupoid,
    Pseudofunctor,
    StructuralError,
    cell_key,
    compose_functors,
    compose_pseudofunctors,
    constant_functor,
    full_sub_bigroupoid,
    identity_functor,
    identity_pseudofunctor,
    inclusion,
    least,
    ordered,
    pairing,
    product_and_diagonal,
    product_functor,
    relabel_groupoid,
    strict_pseudofunctor,
    validate_bigroupoid,
    validate_pseudofunctor,
)
from .terms import Comp, Evaluator, Gen, Graph, HComp, Id, Inv, Lit, Star, Unit, canonical_2cell, paste
from .terms import Counit, Unit2


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    is_fibration: bool
    is_cofibration: bool
    is_weak_equivalence: bool
    is_trivial_fibration: bool = field(init=False)
    is_trivial_cofibration: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "is_trivial_fibration", self.is_fibration and self.is_weak_equivalence)
        object.__setattr__(self, "is_trivial_cofibration", self.is_cofibration and self.is_weak_equivalence)


def _into(F: Pseudofunctor) -> dict:
    """Images of source 1-cells, grouped by the source 1-cell's target."""
    out = {A: set() for A in F.source.zero_cells}
    for f, (A, B) in F.source.cell1.items():
        out[B].add(F.f1(f))
    return out


def is_fibration(F: Pseudofunctor) -> bool:
    S, T = F.source, F.target
    images = _into(F)
    for A2 in S.zero_cells:
        FA2 = F.f0(A2)
        for B in T.zero_cells:
            if any(b not in images[A2] for b in T.hom[(B, FA2)].objects):
                return False
    return all(gpd.is_isofibration(L) for L in F.local.values())


def is_cofibration(F: Pseudofunctor) -> bool:
    values = list(F.zero_map.values())
    if len(set(values)) != len(values):
        return False
    return all(gpd.is_injective_on_objects(L) for L in F.local.values())


def is_weak_equivalence(F: Pseudofunctor) -> bool:
    S, T = F.source, F.target
    image = {F.f0(A) for A in S.zero_cells}
    for B in T.zero_cells:
        if not any(T.hom[(B, C)].objects for C in image):
            return False
    return all(gpd.is_equivalence(L) for L in F.local.values())


def classify(F: Pseudofunctor) -> Classification:
    return Classification(is_fibration(F), is_cofibration(F), is_weak_equivalence(F))


def is_trivial_fibration_by_surjectivity(F: Pseudofunctor) -> bool:
    """Surjective on 0-cells, locally surjective on objects and locally fully faithful."""
    if set(F.zero_map.values()) != set(F.target.zero_cells):
        return False
    return all(gpd.is_surjective_on_objects(L) and gpd.is_fully_faithful(L) for L in F.local.values())


def is_local_isomorphism(F: Pseudofunctor) -> bool:
    return all(gpd.is_isomorphism(L) for L in F.local.values())


def same_morphism(F: Pseudofunctor, G: Pseudofunctor) -> bool:
    return F.same_maps(G)


def _certify(F: Pseudofunctor, what: str) -> Pseudofunctor:
    report = validate_pseudofunctor(F)
    if not report.ok:
        raise ConstructionError(f"{what} is not a valid morphism: {report.violations[:3]}")
    return F


def _certify_bigroupoid(B: FiniteBigroupoid, what: str) -> FiniteBigroupoid:
    report = validate_bigroupoid(B)
    if not report.ok:
        raise ConstructionError(f"{what} is not a valid bigroupoid: {report.violations[:3]}")
    return B


def _compose(*morphisms: Pseudofunctor) -> Pseudofunctor:
    """Composite of morphisms, the last one applied first."""
    out = morphisms[-1]
    for G in reversed(morphisms[:-1]):
        out = compose_pseudofunctors(G, out)
    return out


# ---------------------------------------------------------------- squares and results


@dataclass
class LiftingSquare:
    """top : A -> B, left : A -> D, right : B -> C, bottom : D -> C."""

    top: Pseudofunctor
    left: Pseudofunctor
    right: Pseudofunctor
    bottom: Pseudofunctor

    def __post_init__(self):
        if not (
            self.top.source == self.left.source
            and self.top.target == self.right.source
            and self.left.target == self.bottom.source
            and self.right.target == self.bottom.target
        ):
            raise StructuralError("square corners do not match")
        if not _compose(self.right, self.top).same_maps(_compose(self.bottom, self.left)):
            raise StructuralError("square does not commute")

    def solved_by(self, L: Pseudofunctor) -> bool:
        return _compose(L, self.left).same_maps(self.top) and _compose(self.right, L).same_maps(self.bottom)


@dataclass
class Factorization:
    middle: FiniteBigroupoid
    first: Pseudofunctor
    second: Pseudofunctor
    first_class: Classification
    second_class: Classification
    retraction: Pseudofunctor | None = None


@dataclass
class PathObjectResult:
    PB: FiniteBigroupoid
    R: Pseudofunctor
    S: Pseudofunctor
    T: Pseudofunctor
    product: FiniteBigroupoid
    ST: Pseudofunctor
    diagonal: Pseudofunctor


# ---------------------------------------------------------------- cofibration / trivial fibration


def factor_cof_trivfib(F: Pseudofunctor) -> Factorization:
    """F = H G with G a cofibration and H a strict trivial fibration."""
    A, C = F.source, F.target
    zero = [("A", a) for a in A.zero_cells] + [("C", c) for c in C.zero_cells]
    under = {X: (F.f0(X[1]) if X[0] == "A" else X[1]) for X in zero}
    hom, Hloc, Gloc = {}, {}, {}
    for X in zero:
        for Y in zero:
            target = C.hom[(under[X], under[Y])]
            if X[0] == "A" and Y[0] == "A":
                g, h = gpd.gpd_factor(F.local[(X[1], Y[1])], "cof_trivfib")
                mid = g.target
            else:
                g, h, mid = None, identity_functor(target), target

            def tag(v, X=X, Y=Y):
                return (X, Y, v)

            M = relabel_groupoid(mid, tag, tag)
            hom[(X, Y)] = M
            Hloc[(X, Y)] = GroupoidFunctor(
                M, target, {tag(o): h.fo(o) for o in mid.objects}, {tag(a): h.fa(a) for a in mid.arrows}, check=False
            )
            if g is not None:
                Gloc[(X[1], Y[1])] = GroupoidFunctor(
                    g.source, M, {x: tag(y) for x, y in g.object_map.items()},
                    {a: tag(b) for a, b in g.arrow_map.items()}, check=False,
                )
    h1, h2 = {}, {}
    for L in Hloc.values():
        h1.update(L.object_map)
        h2.update(L.arrow_map)
    sec = {k: gpd.section(L) for k, L in Hloc.items()}
    comp = {}
    for X in zero:
        for Y in zero:
            for Z in zero:
                src = ProductGroupoid(hom[(Y, Z)], hom[(X, Y)])
                S = sec[(X, Z)]
                comp[(X, Y, Z)] = GroupoidFunctor(
                    src, hom[(X, Z)],
                    {(g, f): S.fo(C.comp1(h1[g], h1[f])) for g, f in src.objects},
                    {(b, a): S.fa(C.hcomp(h2[b], h2[a])) for b, a in src.arrows},
                    check=False,
                )
    unit = {X: sec[(X, X)].fo(C.one(under[X])) for X in zero}
    inv = {}
    for (X, Y), M in hom.items():
        S = sec[(Y, X)]
        inv[(X, Y)] = GroupoidFunctor(
            M, hom[(Y, X)], {f: S.fo(C.star1(h1[f])) for f in M.objects},
            {a: S.fa(C.star2(h2[a])) for a in M.arrows}, check=False,
        )
    pre = FiniteBigroupoid(zero, hom, comp, unit, inv, {}, {}, {}, {}, {}, check=False)

    def lift(src, tgt, cell):
        return gpd.lift_arrow(Hloc[pre.cell1[src]], src, tgt, cell)

    c1 = pre.comp1
    assoc = {
        (h, g, f): lift(c1(c1(h, g), f), c1(h, c1(g, f)), C.a(h1[h], h1[g], h1[f])) for h, g, f in pre.chains(3)
    }
    lunit, runit, counit, unit2 = {}, {}, {}, {}
    for f, (X, Y) in pre.cell1.items():
        lunit[f] = lift(c1(unit[Y], f), f, C.l(h1[f]))
        runit[f] = lift(c1(f, unit[X]), f, C.r(h1[f]))
        fs = pre.star1(f)
        counit[f] = lift(c1(fs, f), unit[X], C.e(h1[f]))
        unit2[f] = lift(unit[Y], c1(f, fs), C.i(h1[f]))
    middle = FiniteBigroupoid(zero, hom, comp, unit, inv, assoc, lunit, runit, counit, unit2)
    _certify_bigroupoid(middle, "factorization middle")
    H = _certify(strict_pseudofunctor(middle, C, under, Hloc), "second factor")

    # comparison cells of the first factor, transported along the local trivial fibrations
    G0 = {a: ("A", a) for a in A.zero_cells}
    phi_comp, phi_unit, phi_inv = {}, {}, {}
    for a, b, c in itertools.product(A.zero_cells, repeat=3):
        Xa, Xb, Xc = G0[a], G0[b], G0[c]
        Fl = Hloc[(Xa, Xc)]
        Ac, Mc = A.comp[(a, b, c)], middle.comp[(Xa, Xb, Xc)]
        GG = product_functor(Gloc[(b, c)], Gloc[(a, b)], source=Ac.source, target=Mc.source)
        top = compose_functors(Mc, GG)
        bottom = compose_functors(Gloc[(a, c)], Ac)
        alpha = NatIso(compose_functors(Fl, top), compose_functors(Fl, bottom),
                       {x: F.phi_comp[x] for x in Ac.source.objects})
        phi_comp.update(gpd.transport_post(Fl, top, bottom, alpha).components)
    for a in A.zero_cells:
        Xa = G0[a]
        Fl, M = Hloc[(Xa, Xa)], middle.hom[(Xa, Xa)]
        top = constant_functor(ONE, M, middle.one(Xa))
        bottom = constant_functor(ONE, M, Gloc[(a, a)].fo(A.one(a)))
        alpha = NatIso(compose_functors(Fl, top), compose_functors(Fl, bottom), {"*": F.phi_unit[a]})
        phi_unit[a] = gpd.transport_post(Fl, top, bottom, alpha)["*"]
    for a, b in itertools.product(A.zero_cells, repeat=2):
        Xa, Xb = G0[a], G0[b]
        Fl = Hloc[(Xb, Xa)]
        top = compose_functors(middle.inv[(Xa, Xb)], Gloc[(a, b)])
        bottom = compose_functors(Gloc[(b, a)], A.inv[(a, b)])
        alpha = NatIso(compose_functors(Fl, top), compose_functors(Fl, bottom),
                       {f: F.phi_inv[f] for f in A.hom[(a, b)].objects})
        phi_inv.update(gpd.transport_post(Fl, top, bottom, alpha).components)
    G = _certify(Pseudofunctor(A, middle, G0, Gloc, phi_comp, phi_unit, phi_inv), "first factor")
    if not _compose(H, G).same_maps(F):
        raise ConstructionError("factorization does not recompose")
    gc, hc = classify(G), classify(H)
    if not (gc.is_cofibration and hc.is_trivial_fibration and H.is_strict()):
        raise ConstructionError("factorization flags failed")
    return Factorization(middle, G, H, gc, hc)


def lift_cof_trivfib(sq: LiftingSquare) -> Pseudofunctor:
    """Diagonal for a cofibration (left) against a trivial fibration (right)."""
    K, G, F, H = sq.left, sq.right, sq.top, sq.bottom
    if not is_cofibration(K):
        raise ClassError("left leg is not a cofibration")
    if not classify(G).is_trivial_fibration:
        raise ClassError("right leg is not a trivial fibration")
    A, D, B = K.source, K.target, G.source
    pre = {K.f0(a): a for a in A.zero_cells}
    L0 = {}
    for d in D.zero_cells:
        if d in pre:
            L0[d] = F.f0(pre[d])
        else:
            L0[d] = least(b for b in B.zero_cells if G.f0(b) == H.f0(d))
    local = {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        right = G.local[(L0[d1], L0[d2])]
        bottom = H.local[(d1, d2)]
        if d1 in pre and d2 in pre:
            key = (pre[d1], pre[d2])
            top, left = F.local[key], K.local[key]
        else:
            empty = FiniteGroupoid((), {}, {}, {}, {}, check=False)
            top = GroupoidFunctor(empty, right.source, {}, {}, check=False)
            left = GroupoidFunctor(empty, bottom.source, {}, {}, check=False)
        local[(d1, d2)] = gpd.gpd_lift(gpd.GpdSquare(top, left, right, bottom), "cof_vs_trivfib")
    l1 = {}
    for L in local.values():
        l1.update(L.object_map)
    T = G.target

    def lift(src, tgt, cell):
        return gpd.lift_arrow(G.local[B.cell1[src]], src, tgt, cell)

    phi_comp = {}
    for g, f in D.chains(2):
        src, tgt = B.comp1(l1[g], l1[f]), l1[D.comp1(g, f)]
        phi_comp[(g, f)] = lift(src, tgt, T.vcomp(H.phi_comp[(g, f)], T.inv2(G.phi_comp[(l1[g], l1[f])])))
    phi_unit = {
        d: lift(B.one(L0[d]), l1[D.one(d)], T.vcomp(H.phi_unit[d], T.inv2(G.phi_unit[L0[d]])))
        for d in D.zero_cells
    }
    phi_inv = {
        f: lift(B.star1(l1[f]), l1[D.star1(f)], T.vcomp(H.phi_inv[f], T.inv2(G.phi_inv[l1[f]])))
        for f in D.cell1
    }
    L = _certify(Pseudofunctor(D, B, L0, local, phi_comp, phi_unit, phi_inv), "diagonal")
    if not sq.solved_by(L):
        raise ConstructionError("diagonal does not make both triangles commute")
    return L


# ---------------------------------------------------------------- pullbacks of fibrations


class PullbackResult:
    """Pullback A of the fibration F : B -> C along G : D -> C, with the strict
    projection P : A -> D and R : A -> B satisfying F R = G P."""

    def __init__(self, A, P, R, F, G):
        self.A, self.P, self.R, self.F, self.G = A, P, R, F, G

    def mediate(self, S: Pseudofunctor, T: Pseudofunctor) -> Pseudofunctor:
        """The morphism M : X -> A with P M = S and R M = T, for a cone G S = F T."""
        if S.source != T.source:
            raise ConeError("cone legs have different sources")
        if not _compose(self.F, T).same_maps(_compose(self.G, S)):
            raise ConeError("cone does not commute")
        if self.A is self.G.source:
            M = S
        else:
            M = self._mediate(S, T)
        if not (_compose(self.P, M).same_maps(S) and _compose(self.R, M).same_maps(T)):
            raise ConstructionError("mediator does not project onto the cone")
        return M

    def _mediate(self, S, T):
        A, R, X = self.A, self.R, S.source
        B, D = self.F.source, self.G.source
        zero = {x: (S.f0(x), T.f0(x)) for x in X.zero_cells}
        local = {}
        for (x, y), L in X.hom.items():
            target = A.hom[(zero[x], zero[y])]
            local[(x, y)] = GroupoidFunctor(
                L, target, {f: (S.f1(f), T.f1(f)) for f in L.objects},
                {a: (S.f2(a), T.f2(a)) for a in L.arrows},
            )
        m1 = {}
        for L in local.values():
            m1.update(L.object_map)

        def pair(d_cell, b_cell, what):
            if (d_cell, b_cell) not in A.arrows2:
                raise ConstructionError(f"mediator {what} is not a 2-cell of the pullback")
            return (d_cell, b_cell)

        phi_comp = {
            (g, f): pair(S.phi_comp[(g, f)],
                         B.vcomp(T.phi_comp[(g, f)], B.inv2(R.phi_comp[(m1[g], m1[f])])), "comparison")
            for g, f in X.chains(2)
        }
        phi_unit = {
            x: pair(S.phi_unit[x], B.vcomp(T.phi_unit[x], B.inv2(R.phi_unit[zero[x]])), "unit")
            for x in X.zero_cells
        }
        phi_inv = {
            f: pair(S.phi_inv[f], B.vcomp(T.phi_inv[f], B.inv2(R.phi_inv[m1[f]])), "inverse")
            for f in X.cell1
        }
        del D
        return _certify(Pseudofunctor(X, A, zero, local, phi_comp, phi_unit, phi_inv), "mediator")

    def count_mediators(self, S: Pseudofunctor, T: Pseudofunctor) -> int:
        """Number of morphism data X -> A projecting onto (S, T), by exhaustive enumeration."""
        A, P, R, X = self.A, self.P, self.R, S.source
        D, B = P.target, R.target
        zero_choices = [
            [a for a in A.zero_cells if P.f0(a) == S.f0(x) and R.f0(a) == T.f0(x)] for x in X.zero_cells
        ]
        total = 0
        for zs in itertools.product(*zero_choices):
            zero = dict(zip(X.zero_cells, zs))
            ones = X.one_cells()
            one_choices = []
            for f in ones:
                x, y = X.cell1[f]
                one_choices.append(
                    [q for q in A.hom[(zero[x], zero[y])].objects if P.f1(q) == S.f1(f) and R.f1(q) == T.f1(f)]
                )
            for qs in itertools.product(*one_choices):
                m1 = dict(zip(ones, qs))
                count = 1
                for a, (f, f2) in X.arrows2.items():
                    count *= sum(
                        1 for c in A.hom[A.cell1[m1[f]]].hom(m1[f], m1[f2])
                        if P.f2(c) == S.f2(a) and R.f2(c) == T.f2(a)
                    )

                def slot(src, tgt, s_cell, t_cell, p_phi, r_phi):
                    return sum(
                        1 for c in A.hom[A.cell1[src]].hom(src, tgt)
                        if D.vcomp(P.f2(c), p_phi) == s_cell and B.vcomp(R.f2(c), r_phi) == t_cell
                    )

                for g, f in X.chains(2):
                    count *= slot(A.comp1(m1[g], m1[f]), m1[X.comp1(g, f)], S.phi_comp[(g, f)],
                                  T.phi_comp[(g, f)], P.phi_comp[(m1[g], m1[f])], R.phi_comp[(m1[g], m1[f])])
                for x in X.zero_cells:
                    count *= slot(A.one(zero[x]), m1[X.one(x)], S.phi_unit[x], T.phi_unit[x],
                                  P.phi_unit[zero[x]], R.phi_unit[zero[x]])
                for f in X.cell1:
                    count *= slot(A.star1(m1[f]), m1[X.star1(f)], S.phi_inv[f], T.phi_inv[f],
                                  P.phi_inv[m1[f]], R.phi_inv[m1[f]])
                total += count
        return total


def pullback_fibration(F: Pseudofunctor, G: Pseudofunctor, certify: bool = True) -> PullbackResult:
    """Pullback of a fibration F : B -> C along G : D -> C.

    With certify=False the full axiom sweep of the result is skipped; callers
    that do this must validate whatever they build from it."""
    if F.target != G.target:
        raise StructuralError("pullback of morphisms with different targets")
    if not is_fibration(F):
        raise ClassError("morphism to pull back is not a fibration")
    B, C, D = F.source, F.target, G.source
    if B == C and F.same_maps(identity_pseudofunctor(B)):
        return PullbackResult(D, identity_pseudofunctor(D), G, F, G)
    zero = [(d, b) for d in D.zero_cells for b in B.zero_cells if G.f0(d) == F.f0(b)]
    hom, proj_d, proj_b = {}, {}, {}
    for X in zero:
        for Y in zero:
            P, p, r = gpd.groupoid_pullback(G.local[(X[0], Y[0])], F.local[(X[1], Y[1])])
            hom[(X, Y)], proj_d[(X, Y)], proj_b[(X, Y)] = P, p, r
    vc, inv2, hc, id2 = B.vcomp, B.inv2, B.hcomp, B.id2
    cvc, cinv = C.vcomp, C.inv2

    comp, rho_comp = {}, {}
    for X, Y, Z in itertools.product(zero, repeat=3):
        src = ProductGroupoid(hom[(Y, Z)], hom[(X, Y)])
        PP = product_functor(proj_d[(Y, Z)], proj_d[(X, Y)], source=src, target=D.comp[(X[0], Y[0], Z[0])].source)
        RR = product_functor(proj_b[(Y, Z)], proj_b[(X, Y)], source=src, target=B.comp[(X[1], Y[1], Z[1])].source)
        first = compose_functors(D.comp[(X[0], Y[0], Z[0])], PP)
        lifted = compose_functors(B.comp[(X[1], Y[1], Z[1])], RR)
        Gl, Fl = G.local[(X[0], Z[0])], F.local[(X[1], Z[1])]
        cover = compose_functors(Gl, first)
        beta = {}
        for q2, q1 in src.objects:
            (x2, y2), (x1, y1) = q2, q1
            beta[(q2, q1)] = cvc(F.phi_comp[(y2, y1)], cinv(G.phi_comp[(x2, x1)]))
        F2, alpha = gpd.fibration_lift_up_to_iso(lifted, cover, Fl, NatIso(cover, compose_functors(Fl, lifted), beta))
        comp[(X, Y, Z)] = GroupoidFunctor(
            src, hom[(X, Z)],
            {q: (first.fo(q), F2.fo(q)) for q in src.objects},
            {a: (first.fa(a), F2.fa(a)) for a in src.arrows},
        )
        for q, c in alpha.components.items():
            rho_comp[(q[0], q[1])] = inv2(c)
    unit, rho_unit = {}, {}
    for X in zero:
        d, b = X
        M = B.hom[(b, b)]
        lifted = constant_functor(ONE, M, B.one(b))
        cover = constant_functor(ONE, C.hom[(G.f0(d), G.f0(d))], G.f1(D.one(d)))
        beta = NatIso(cover, compose_functors(F.local[(b, b)], lifted),
                      {"*": cvc(F.phi_unit[b], cinv(G.phi_unit[d]))})
        F2, alpha = gpd.fibration_lift_up_to_iso(lifted, cover, F.local[(b, b)], beta)
        unit[X] = (D.one(d), F2.fo("*"))
        rho_unit[X] = inv2(alpha["*"])
    inv, rho_inv = {}, {}
    for X, Y in itertools.product(zero, repeat=2):
        P = hom[(X, Y)]
        lifted = compose_functors(B.inv[(X[1], Y[1])], proj_b[(X, Y)])
        first = compose_functors(D.inv[(X[0], Y[0])], proj_d[(X, Y)])
        Fl = F.local[(Y[1], X[1])]
        cover = compose_functors(G.local[(Y[0], X[0])], first)
        beta = NatIso(cover, compose_functors(Fl, lifted),
                      {q: cvc(F.phi_inv[q[1]], cinv(G.phi_inv[q[0]])) for q in P.objects})
        F2, alpha = gpd.fibration_lift_up_to_iso(lifted, cover, Fl, beta)
        inv[(X, Y)] = GroupoidFunctor(
            P, hom[(Y, X)], {q: (first.fo(q), F2.fo(q)) for q in P.objects},
            {a: (first.fa(a), F2.fa(a)) for a in P.arrows},
        )
        for q, c in alpha.components.items():
            rho_inv[q] = inv2(c)
    pre = FiniteBigroupoid(zero, hom, comp, unit, inv, {}, {}, {}, {}, {}, check=False)
    c1, s1 = pre.comp1, pre.star1
    owner = pre.cell1

    def rho(g, f):
        return rho_comp[(g, f)]

    def one_of(q, end):
        return rho_unit[owner[q][end]]

    assoc = {}
    for q3, q2, q1 in pre.chains(3):
        y3, y2, y1 = q3[1], q2[1], q1[1]
        ra = B.vchain(
            rho(q3, c1(q2, q1)),
            hc(id2(y3), rho(q2, q1)),
            B.a(y3, y2, y1),
            inv2(hc(rho(q3, q2), id2(y1))),
            inv2(rho(c1(q3, q2), q1)),
        )
        assoc[(q3, q2, q1)] = (D.a(q3[0], q2[0], q1[0]), ra)
    lunit, runit, counit, unit2 = {}, {}, {}, {}
    for q in pre.cell1:
        x, y = q
        X, Y = owner[q]
        lunit[q] = (D.l(x), B.vchain(B.l(y), inv2(hc(one_of(q, 1), id2(y))), inv2(rho(unit[Y], q))))
        runit[q] = (D.r(x), B.vchain(B.r(y), inv2(hc(id2(y), one_of(q, 0))), inv2(rho(q, unit[X]))))
        qs = s1(q)
        counit[q] = (D.e(x), B.vchain(one_of(q, 0), B.e(y), inv2(hc(rho_inv[q], id2(y))), inv2(rho(qs, q))))
        unit2[q] = (D.i(x), B.vchain(rho(q, qs), hc(id2(y), rho_inv[q]), B.i(y), inv2(one_of(q, 1))))
    try:
        A = FiniteBigroupoid(zero, hom, comp, unit, inv, assoc, lunit, runit, counit, unit2)
    except StructuralError as exc:
        raise ConstructionError(f"pullback structure cells are ill-typed: {exc}") from None
    if certify:
        _certify_bigroupoid(A, "pullback")
    P = _certify(strict_pseudofunctor(A, D, {X: X[0] for X in zero}, proj_d), "pullback projection")
    R = _certify(
        Pseudofunctor(A, B, {X: X[1] for X in zero}, proj_b, rho_comp, rho_unit, rho_inv), "pullback projection"
    )
    if not _compose(F, R).same_maps(_compose(G, P)):
        raise ConstructionError("pullback square does not commute")
    return PullbackResult(A, P, R, F, G)


# ---------------------------------------------------------------- path objects


def _path_templates():
    g = Graph(
        ["A0", "A1", "A2", "B0", "B1", "B2"],
        {"f0": ("A0", "B0"), "f1": ("A1", "B1"), "f2": ("A2", "B2"),
         "a1": ("A0", "A1"), "a2": ("A1", "A2"), "b1": ("B0", "B1"), "b2": ("B1", "B2")},
    )
    f0, f1, f2, a1, a2, b1, b2 = (Gen(n) for n in ("f0", "f1", "f2", "a1", "a2", "b1", "b2"))
    phi1 = Lit("phi1", Comp(f1, a1), Comp(b1, f0))
    phi2 = Lit("phi2", Comp(f2, a2), Comp(b2, f1))
    composite = paste(
        [HComp(phi2, Id(a1)), HComp(Id(b2), phi1)], g, src=Comp(f2, Comp(a2, a1)), tgt=Comp(Comp(b2, b1), f0)
    )
    unit = paste([], g, src=Comp(f0, Unit("A0")), tgt=Comp(Unit("B0"), f0))
    diag = paste([], g, src=Comp(Unit("B0"), f0), tgt=Comp(f0, Unit("A0")))
    sa, sb = Star(a1), Star(b1)
    inverse = paste(
        [
            HComp(Inv(Counit(b1)), Id(Comp(f0, sa))),
            HComp(Id(sb), HComp(Inv(phi1), Id(sa))),
            HComp(Id(sb), HComp(Id(f1), Inv(Unit2(a1)))),
        ],
        g, src=Comp(f0, sa), tgt=Comp(sb, f1),
    )
    return g, composite, unit, diag, inverse


_PATH = None


def path_object(B: FiniteBigroupoid) -> PathObjectResult:
    """Factor the diagonal of B as R : B -> PB followed by <S, T> : PB -> B x B."""
    global _PATH
    if _PATH is None:
        _PATH = _path_templates()
    _, t_comp, t_unit, t_diag, t_inv = _PATH
    zero = B.one_cells()
    vc, hc, id2 = B.vcomp, B.hcomp, B.id2
    hom = {}
    for f, g in itertools.product(zero, repeat=2):
        (A0, A1), (C0, C1) = B.cell1[f], B.cell1[g]
        objs = [
            (a, b, f, phi, g)
            for a in B.hom[(A0, C0)].objects
            for b in B.hom[(A1, C1)].objects
            for phi in B.hom[(A0, C1)].hom(B.comp1(g, a), B.comp1(b, f))
        ]
        arrows, identity, inverse = {}, {}, {}
        for x in objs:
            a, b, _, phi, _ = x
            for y in objs:
                a2, b2, _, phi2, _ = y
                for al in B.hom[B.cell1[a]].hom(a, a2):
                    lhs = vc(phi2, hc(id2(g), al))
                    for be in B.hom[B.cell1[b]].hom(b, b2):
                        if lhs == vc(hc(be, id2(f)), phi):
                            arrows[(x, al, be)] = (x, y)
            identity[x] = (x, id2(a), id2(b))
        for (x, al, be), (_, y) in arrows.items():
            inverse[(x, al, be)] = (y, B.inv2(al), B.inv2(be))
        compose = {}
        by_src = {}
        for arr, (s, t) in arrows.items():
            by_src.setdefault(s, []).append(arr)
        for first, (s, t) in arrows.items():
            for second in by_src.get(t, ()):
                compose[(second, first)] = (s, vc(second[1], first[1]), vc(second[2], first[2]))
        hom[(f, g)] = FiniteGroupoid(objs, arrows, identity, compose, inverse, check=False)

    def nodes_for(*cells):
        return {name: c for name, c in cells}

    comp = {}
    for X, Y, Z in itertools.product(zero, repeat=3):
        src = ProductGroupoid(hom[(Y, Z)], hom[(X, Y)])
        om = {}
        for y, x in src.objects:
            a1, b1, f0, phi1, f1 = x
            a2, b2, _, phi2, f2 = y
            ev = Evaluator(
                B,
                {"A0": B.src1(f0), "A1": B.src1(f1), "A2": B.src1(f2),
                 "B0": B.tgt1(f0), "B1": B.tgt1(f1), "B2": B.tgt1(f2)},
                {"f0": f0, "f1": f1, "f2": f2, "a1": a1, "a2": a2, "b1": b1, "b2": b2},
                {"phi1": phi1, "phi2": phi2},
            )
            om[(y, x)] = (B.comp1(a2, a1), B.comp1(b2, b1), f0, ev.two(t_comp), f2)
        am = {}
        target = hom[(X, Z)]
        for second, first in src.arrows:
            (y, al2, be2), (x, al1, be1) = second, first
            cell = (om[(y, x)], hc(al2, al1), hc(be2, be1))
            if cell not in target.arrows:
                raise ConstructionError("horizontal composite of path 2-cells is ill-typed")
            am[(second, first)] = cell
        comp[(X, Y, Z)] = GroupoidFunctor(src, target, om, am)

    def ends(f):
        return {"A0": B.src1(f), "B0": B.tgt1(f)}

    unit = {}
    for f in zero:
        A0, B0 = B.cell1[f]
        ev = Evaluator(B, ends(f), {"f0": f})
        unit[f] = (B.one(A0), B.one(B0), f, ev.two(t_unit), f)
    inv = {}
    for (f, g), M in hom.items():
        om = {}
        for x in M.objects:
            a, b, _, phi, _ = x
            ev = Evaluator(
                B,
                {"A0": B.src1(f), "B0": B.tgt1(f), "A1": B.src1(g), "B1": B.tgt1(g)},
                {"f0": f, "f1": g, "a1": a, "b1": b},
                {"phi1": phi},
            )
            om[x] = (B.star1(a), B.star1(b), g, ev.two(t_inv), f)
        target = hom[(g, f)]
        am = {}
        for arr in M.arrows:
            x, al, be = arr
            cell = (om[x], B.star2(al), B.star2(be))
            if cell not in target.arrows:
                raise ConstructionError("inverse of a path 2-cell is ill-typed")
            am[arr] = cell
        inv[(f, g)] = GroupoidFunctor(M, target, om, am)
    pre = FiniteBigroupoid(zero, hom, comp, unit, inv, {}, {}, {}, {}, {}, check=False)
    c1 = pre.comp1

    def pair(src1, a_cell, b_cell):
        cell = (src1, a_cell, b_cell)
        if cell not in pre.arrows2:
            raise ConstructionError("structural cell of the path object is ill-typed")
        return cell

    assoc = {
        (z, y, x): pair(c1(c1(z, y), x), B.a(z[0], y[0], x[0]), B.a(z[1], y[1], x[1])) for z, y, x in pre.chains(3)
    }
    lunit, runit, counit, unit2 = {}, {}, {}, {}
    for x, (X, Y) in pre.cell1.items():
        lunit[x] = pair(c1(unit[Y], x), B.l(x[0]), B.l(x[1]))
        runit[x] = pair(c1(x, unit[X]), B.r(x[0]), B.r(x[1]))
        counit[x] = pair(c1(pre.star1(x), x), B.e(x[0]), B.e(x[1]))
        unit2[x] = pair(unit[Y], B.i(x[0]), B.i(x[1]))
    PB = FiniteBigroupoid(zero, hom, comp, unit, inv, assoc, lunit, runit, counit, unit2)
    _certify_bigroupoid(PB, "path object")

    local_r = {}
    for (A0, A1), G in B.hom.items():
        oneA, oneB = B.one(A0), B.one(A1)
        om, am = {}, {}
        for f in G.objects:
            ev = Evaluator(B, {"A0": A0, "B0": A1}, {"f0": f})
            om[f] = (f, f, oneA, ev.two(t_diag), oneB)
        for a, (f, f2) in G.arrows.items():
            am[a] = (om[f], a, a)
        local_r[(A0, A1)] = GroupoidFunctor(G, PB.hom[(oneA, oneB)], om, am)
    try:
        R = strict_pseudofunctor(B, PB, {A: B.one(A) for A in B.zero_cells}, local_r)
    except StructuralError as exc:
        raise ConstructionError(f"path-object unit map is not strict: {exc}") from None

    def projection(index, end):
        local = {}
        for (f, g), M in PB.hom.items():
            target = B.hom[(B.cell1[f][end], B.cell1[g][end])]
            local[(f, g)] = GroupoidFunctor(
                M, target, {x: x[index] for x in M.objects}, {a: a[1 + index] for a in M.arrows}
            )
        return strict_pseudofunctor(PB, B, {f: B.cell1[f][end] for f in zero}, local)

    S, T = projection(0, 0), projection(1, 1)
    product, _, delta = product_and_diagonal(B, B)
    ST = pairing(S, T, product)
    for name, F in (("R", R), ("S", S), ("T", T), ("<S,T>", ST)):
        _certify(F, f"path-object map {name}")
    if not _compose(ST, R).same_maps(delta):
        raise ConstructionError("path object does not factor the diagonal")
    return PathObjectResult(PB, R, S, T, product, ST, delta)


# ---------------------------------------------------------------- trivial cofibration / fibration


def split_trivcofib(K: Pseudofunctor):
    """K = H G with G surjective on 0-cells and H a strict local-isomorphism inclusion."""
    c = classify(K)
    if not c.is_trivial_cofibration:
        raise ClassError("morphism is not a trivial cofibration")
    B = K.target
    image = {K.f0(a) for a in K.source.zero_cells}
    sub = full_sub_bigroupoid(B, image)
    G = Pseudofunctor(K.source, sub, K.zero_map, K.local, K.phi_comp, K.phi_unit, K.phi_inv)
    H = inclusion(sub, B)
    if not _compose(H, G).same_maps(K):
        raise ConstructionError("splitting does not recompose")
    return _certify(G, "splitting"), _certify(H, "splitting")


def _surjective_case_lift(F, K, G, H) -> Pseudofunctor:
    """Diagonal when K : A -> D is a trivial cofibration bijective on 0-cells."""
    A, D, B = K.source, K.target, G.source
    pre = {K.f0(a): a for a in A.zero_cells}
    L0 = {d: F.f0(pre[d]) for d in D.zero_cells}
    local = {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        key = (pre[d1], pre[d2])
        sq = gpd.GpdSquare(F.local[key], K.local[key], G.local[(L0[d1], L0[d2])], H.local[(d1, d2)])
        local[(d1, d2)] = gpd.gpd_lift(sq, "trivcof_vs_fib")
    l2 = {}
    for L in local.values():
        l2.update(L.arrow_map)
    vc, inv2 = B.vcomp, B.inv2
    phi_comp = {}
    for d1, d2, d3 in itertools.product(D.zero_cells, repeat=3):
        a1, a2, a3 = pre[d1], pre[d2], pre[d3]
        Dc, Bc, Ac = D.comp[(d1, d2, d3)], B.comp[(L0[d1], L0[d2], L0[d3])], A.comp[(a1, a2, a3)]
        KK = product_functor(K.local[(a2, a3)], K.local[(a1, a2)], source=Ac.source, target=Dc.source)
        LL = product_functor(local[(d2, d3)], local[(d1, d2)], source=Dc.source, target=Bc.source)
        top = compose_functors(Bc, LL)
        bottom = compose_functors(local[(d1, d3)], Dc)
        alpha = {(g, f): vc(inv2(l2[K.phi_comp[(g, f)]]), F.phi_comp[(g, f)]) for g, f in Ac.source.objects}
        beta = gpd.transport_pre(KK, top, bottom,
                                 NatIso(compose_functors(top, KK), compose_functors(bottom, KK), alpha))
        phi_comp.update(beta.components)
    phi_unit = {d: vc(inv2(l2[K.phi_unit[pre[d]]]), F.phi_unit[pre[d]]) for d in D.zero_cells}
    phi_inv = {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        a1, a2 = pre[d1], pre[d2]
        Kl = K.local[(a1, a2)]
        top = compose_functors(B.inv[(L0[d1], L0[d2])], local[(d1, d2)])
        bottom = compose_functors(local[(d2, d1)], D.inv[(d1, d2)])
        alpha = {f: vc(inv2(l2[K.phi_inv[f]]), F.phi_inv[f]) for f in Kl.source.objects}
        beta = gpd.transport_pre(Kl, top, bottom,
                                 NatIso(compose_functors(top, Kl), compose_functors(bottom, Kl), alpha))
        phi_inv.update(beta.components)
    L = _certify(Pseudofunctor(D, B, L0, local, phi_comp, phi_unit, phi_inv), "surjective-case diagonal")
    if not (_compose(L, K).same_maps(F) and _compose(G, L).same_maps(H)):
        raise ConstructionError("surjective-case diagonal does not solve the square")
    return L


class _Conjugation:
    """Terms for z |-> post(j) . (z . pre(i)) over a small template graph, where
    a 0-cell in the image keeps its identity bracket as a unit."""

    def __init__(self, kind):
        self.kind = kind
        self._cache = {}

    def graph(self, pattern):
        n = len(pattern)
        nodes = [f"c{i}" for i in range(n)] + [f"k{i}" for i in range(n) if not pattern[i]]
        edges = {f"x{i}": (f"c{i}", f"c{i + 1}") for i in range(n - 1)}
        for i in range(n):
            if not pattern[i]:
                edges[f"p{i}"] = (f"c{i}", f"k{i}") if self.kind == "p" else (f"k{i}", f"c{i}")
        return Graph(nodes, edges)

    def far(self, pattern, i):
        return f"c{i}" if pattern[i] else f"k{i}"

    def bracket(self, pattern, i):
        return Unit(f"c{i}") if pattern[i] else Gen(f"p{i}")

    def conj(self, z, pattern, i, j):
        """p_j . (z . p_i*) for kind 'p', q_j* . (z . q_i) for kind 'q'; identity on image pairs."""
        if pattern[i] and pattern[j]:
            return z
        bi, bj = self.bracket(pattern, i), self.bracket(pattern, j)
        if self.kind == "p":
            return Comp(bj, Comp(z, Star(bi)))
        return Comp(Star(bj), Comp(z, bi))

    def unconj(self, w, pattern, i, j):
        """p_j* . (w . p_i), the reverse conjugation used for kind 'p'."""
        if pattern[i] and pattern[j]:
            return w
        bi, bj = self.bracket(pattern, i), self.bracket(pattern, j)
        return Comp(Star(bj), Comp(w, bi))

    def witness(self, name, pattern):
        key = (name, pattern)
        got = self._cache.get(key)
        if got is not None:
            return got
        g = self.graph(pattern)
        if name == "comp":
            x0, x1 = Gen("x0"), Gen("x1")
            u = Comp(self.conj(x1, pattern, 1, 2), self.conj(x0, pattern, 0, 1))
            v = self.conj(Comp(x1, x0), pattern, 0, 2)
        elif name == "unit":
            u = Unit(self.far(pattern, 0))
            v = self.conj(Unit("c0"), pattern, 0, 0)
        elif name == "inv":
            x0 = Gen("x0")
            u = Star(self.conj(x0, pattern, 0, 1))
            v = self.conj(Star(x0), pattern, 1, 0)
        elif name == "round":
            x0 = Gen("x0")
            u = x0
            v = self.unconj(self.conj(x0, pattern, 0, 1), pattern, 0, 1)
        else:
            raise ValueError(name)
        w = canonical_2cell(u, v, g)
        if w is None:
            raise ConstructionError("conjugation cells are not canonical")
        self._cache[key] = w.term
        return w.term


_P_CONJ = _Conjugation("p")
_Q_CONJ = _Conjugation("q")


def _local_iso_case_lift(F, K, G) -> Pseudofunctor:
    """Diagonal L : D -> B with L K = F and G L = id, for K : A -> D a strict
    local-isomorphism trivial cofibration and G : B -> D a strict fibration."""
    A, D, B = K.source, K.target, G.source
    pre = {K.f0(a): a for a in A.zero_cells}
    img = {d: d in pre for d in D.zero_cells}

    # stage 1: a left inverse of K
    T0, p = {}, {}
    for d in D.zero_cells:
        if img[d]:
            T0[d], p[d] = pre[d], D.one(d)
            continue
        best = None
        for a in A.zero_cells:
            for q in D.hom[(d, K.f0(a))].objects:
                cand = (cell_key(a), cell_key(q))
                if best is None or cand < best[0]:
                    best = (cand, a, q)
        if best is None:
            raise ConstructionError(f"0-cell {d!r} has no 1-cell into the image")
        T0[d], p[d] = best[1], best[2]
    KT = {d: K.f0(T0[d]) for d in D.zero_cells}
    hc, id2, c1, s1 = D.hcomp, D.id2, D.comp1, D.star1
    Kinv = {}
    for key, L in K.local.items():
        Kinv[(K.f0(key[0]), K.f0(key[1]))] = gpd.inverse_functor(L)

    def P_one(z, d1, d2):
        if img[d1] and img[d2]:
            return z
        return c1(p[d2], c1(z, s1(p[d1])))

    def P_two(al, d1, d2):
        if img[d1] and img[d2]:
            return al
        return hc(id2(p[d2]), hc(al, id2(s1(p[d1]))))

    def d_eval(pattern, cells, xs):
        nodes, edges = {}, {}
        for i, d in enumerate(cells):
            nodes[f"c{i}"] = d
            if not pattern[i]:
                nodes[f"k{i}"] = KT[d]
                edges[f"p{i}"] = p[d]
        for i, x in enumerate(xs):
            edges[f"x{i}"] = x
        return Evaluator(D, nodes, edges)

    tlocal = {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        M = D.hom[(d1, d2)]
        Ki = Kinv[(KT[d1], KT[d2])]
        tlocal[(d1, d2)] = GroupoidFunctor(
            M, A.hom[(T0[d1], T0[d2])],
            {z: Ki.fo(P_one(z, d1, d2)) for z in M.objects},
            {al: Ki.fa(P_two(al, d1, d2)) for al in M.arrows},
        )
    tau_comp, tau_unit, tau_inv = {}, {}, {}
    for y, x in D.chains(2):
        d0, d1 = D.cell1[x]
        d2 = D.tgt1(y)
        pat = (img[d0], img[d1], img[d2])
        cell = d_eval(pat, (d0, d1, d2), (x, y)).two(_P_CONJ.witness("comp", pat))
        tau_comp[(y, x)] = Kinv[(KT[d0], KT[d2])].fa(cell)
    for d in D.zero_cells:
        pat = (img[d],)
        cell = d_eval(pat, (d,), ()).two(_P_CONJ.witness("unit", pat))
        tau_unit[d] = Kinv[(KT[d], KT[d])].fa(cell)
    for x, (d0, d1) in D.cell1.items():
        pat = (img[d0], img[d1])
        cell = d_eval(pat, (d0, d1), (x,)).two(_P_CONJ.witness("inv", pat))
        tau_inv[x] = Kinv[(KT[d1], KT[d0])].fa(cell)
    Tinv = _certify(Pseudofunctor(D, A, T0, tlocal, tau_comp, tau_unit, tau_inv), "left inverse")
    if not _compose(Tinv, K).same_maps(identity_pseudofunctor(A)):
        raise ConstructionError("left inverse does not split the inclusion")
    L1 = _compose(F, Tinv)

    # stage 2: correct the 0-cells so that G L2 = id on 0-cells
    L1_0 = {d: L1.f0(d) for d in D.zero_cells}
    L2_0, q = {}, {}
    for d in D.zero_cells:
        if img[d]:
            L2_0[d], q[d] = L1_0[d], B.one(L1_0[d])
            continue
        best = None
        for X in B.zero_cells:
            if G.f0(X) != d:
                continue
            for w in B.hom[(X, L1_0[d])].objects:
                if G.f1(w) == p[d]:
                    cand = (cell_key(X), cell_key(w))
                    if best is None or cand < best[0]:
                        best = (cand, X, w)
        if best is None:
            raise ConstructionError(f"no fibration lift of the chosen 1-cell at {d!r}")
        L2_0[d], q[d] = best[1], best[2]
    bhc, bid2, bc1, bs1 = B.hcomp, B.id2, B.comp1, B.star1

    def Q_one(z, d1, d2):
        if img[d1] and img[d2]:
            return z
        return bc1(bs1(q[d2]), bc1(z, q[d1]))

    def Q_two(al, d1, d2):
        if img[d1] and img[d2]:
            return al
        return bhc(bid2(bs1(q[d2])), bhc(al, bid2(q[d1])))

    def b_eval(pattern, cells, xs):
        nodes, edges = {}, {}
        for i, d in enumerate(cells):
            nodes[f"c{i}"] = L1_0[d]
            if not pattern[i]:
                nodes[f"k{i}"] = L2_0[d]
                edges[f"p{i}"] = q[d]
        for i, x in enumerate(xs):
            edges[f"x{i}"] = x
        return Evaluator(B, nodes, edges)

    l2local = {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        L = L1.local[(d1, d2)]
        l2local[(d1, d2)] = GroupoidFunctor(
            L.source, B.hom[(L2_0[d1], L2_0[d2])],
            {z: Q_one(w, d1, d2) for z, w in L.object_map.items()},
            {al: Q_two(b, d1, d2) for al, b in L.arrow_map.items()},
        )
    lam2_comp, lam2_unit, lam2_inv = {}, {}, {}
    for g, f in D.chains(2):
        d0, d1 = D.cell1[f]
        d2 = D.tgt1(g)
        pat = (img[d0], img[d1], img[d2])
        y = b_eval(pat, (d0, d1, d2), (L1.f1(f), L1.f1(g))).two(_Q_CONJ.witness("comp", pat))
        lam2_comp[(g, f)] = B.vcomp(Q_two(L1.phi_comp[(g, f)], d0, d2), y)
    for d in D.zero_cells:
        pat = (img[d],)
        y = b_eval(pat, (d,), ()).two(_Q_CONJ.witness("unit", pat))
        lam2_unit[d] = B.vcomp(Q_two(L1.phi_unit[d], d, d), y)
    for f, (d0, d1) in D.cell1.items():
        pat = (img[d0], img[d1])
        y = b_eval(pat, (d0, d1), (L1.f1(f),)).two(_Q_CONJ.witness("inv", pat))
        lam2_inv[f] = B.vcomp(Q_two(L1.phi_inv[f], d1, d0), y)
    L2 = _certify(Pseudofunctor(D, B, L2_0, l2local, lam2_comp, lam2_unit, lam2_inv), "0-cell correction")
    if not _compose(L2, K).same_maps(F):
        raise ConstructionError("0-cell correction broke the upper triangle")

    # stage 3: correct the local functors so that G L = id
    llocal, alpha = {}, {}
    for d1, d2 in itertools.product(D.zero_cells, repeat=2):
        L = l2local[(d1, d2)]
        M = D.hom[(d1, d2)]
        if img[d1] and img[d2]:
            llocal[(d1, d2)] = L
            alpha.update({z: B.id2(L.fo(z)) for z in M.objects})
            continue
        pat = (img[d1], img[d2])
        term = _P_CONJ.witness("round", pat)
        z = {x: d_eval(pat, (d1, d2), (x,)).two(term) for x in M.objects}
        Gl = G.local[(L2_0[d1], L2_0[d2])]
        ident = identity_functor(M)
        beta = NatIso(ident, compose_functors(Gl, L), z)
        F3, al = gpd.fibration_lift_up_to_iso(L, ident, Gl, beta)
        llocal[(d1, d2)] = F3
        alpha.update(al.components)
    l3 = {}
    for L in llocal.values():
        l3.update(L.object_map)
    inv2 = B.inv2
    phi_comp = {
        (g, f): B.vchain(inv2(alpha[D.comp1(g, f)]), lam2_comp[(g, f)], bhc(alpha[g], alpha[f]))
        for g, f in D.chains(2)
    }
    phi_unit = {d: B.vcomp(inv2(alpha[D.one(d)]), lam2_unit[d]) for d in D.zero_cells}
    phi_inv = {f: B.vchain(inv2(alpha[D.star1(f)]), lam2_inv[f], B.star2(alpha[f])) for f in D.cell1}
    L = _certify(Pseudofunctor(D, B, L2_0, llocal, phi_comp, phi_unit, phi_inv), "local-iso diagonal")
    if not _compose(L, K).same_maps(F):
        raise ConstructionError("local-iso diagonal broke the upper triangle")
    if not _compose(G, L).same_maps(identity_pseudofunctor(D)):
        raise ConstructionError("local-iso diagonal is not a section of the fibration")
    return L


def lift_trivcof_fib(sq: LiftingSquare) -> Pseudofunctor:
    """Diagonal for a trivial cofibration (left) against a fibration (right)."""
    K, G, F, H = sq.left, sq.right, sq.top, sq.bottom
    if not classify(K).is_trivial_cofibration:
        raise ClassError("left leg is not a trivial cofibration")
    if not is_fibration(G):
        raise ClassError("right leg is not a fibration")
    # intermediate pullback; the returned diagonal is validated below
    pb = pullback_fibration(G, H, certify=False)
    M0 = pb.mediate(K, F)
    S1, T1 = split_trivcofib(K)
    M1 = _surjective_case_lift(M0, S1, pb.P, T1)
    M = _local_iso_case_lift(M1, T1, pb.P)
    L = _certify(_compose(pb.R, M), "diagonal")
    if not sq.solved_by(L):
        raise ConstructionError("diagonal does not make both triangles commute")
    return L


def factor_trivcof_fib(F: Pseudofunctor) -> Factorization:
    """F = H G with G a trivial cofibration (with retraction P, P G = id) and H a fibration."""
    A, B = F.source, F.target
    po = path_object(B)
    pb = pullback_fibration(po.S, F)
    G = pb.mediate(identity_pseudofunctor(A), _compose(po.R, F))
    H = _certify(_compose(po.T, pb.R), "second factor")
    if not _compose(pb.P, G).same_maps(identity_pseudofunctor(A)):
        raise ConstructionError("retraction fails")
    if not _compose(H, G).same_maps(F):
        raise ConstructionError("factorization does not recompose")
    gc, hc = classify(G), classify(H)
    if not (gc.is_trivial_cofibration and hc.is_fibration):
        raise ConstructionError("factorization flags failed")
    return Factorization(pb.A, G, H, gc, hc, retraction=pb.P)
