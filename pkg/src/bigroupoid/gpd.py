"""The canonical model structure on finite groupoids, and the transport lemmas
used as building blocks by the bigroupoid constructions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    ConstructionError,
    FiniteGroupoid,
    GroupoidFunctor,
    NatIso,
    PreconditionError,
    StructuralError,
    cell_key,
    compose_functors,
    least,
    ordered,
)


@dataclass(frozen=True)
class GpdClassification:
    is_fibration: bool
    is_cofibration: bool
    is_weak_equivalence: bool

    @property
    def is_trivial_fibration(self) -> bool:
        return self.is_fibration and self.is_weak_equivalence

    @property
    def is_trivial_cofibration(self) -> bool:
        return self.is_cofibration and self.is_weak_equivalence


def same_maps(F: GroupoidFunctor, G: GroupoidFunctor) -> bool:
    return F.object_map == G.object_map and F.arrow_map == G.arrow_map


@dataclass
class GpdSquare:
    """top : A -> B, left : A -> D, right : B -> C, bottom : D -> C."""

    top: GroupoidFunctor
    left: GroupoidFunctor
    right: GroupoidFunctor
    bottom: GroupoidFunctor

    def __post_init__(self):
        if not (
            self.top.source == self.left.source
            and self.top.target == self.right.source
            and self.left.target == self.bottom.source
            and self.right.target == self.bottom.target
        ):
            raise StructuralError("square corners do not match")
        if not same_maps(compose_functors(self.right, self.top), compose_functors(self.bottom, self.left)):
            raise StructuralError("square does not commute")


# ---------------------------------------------------------------- properties


def is_injective_on_objects(F: GroupoidFunctor) -> bool:
    return len(set(F.object_map.values())) == len(F.object_map)


def is_surjective_on_objects(F: GroupoidFunctor) -> bool:
    return set(F.object_map.values()) == set(F.target.objects)


def is_full(F: GroupoidFunctor) -> bool:
    S, T = F.source, F.target
    for x in S.objects:
        for y in S.objects:
            if len({F.fa(a) for a in S.hom(x, y)}) != len(T.hom(F.fo(x), F.fo(y))):
                return False
    return True


def is_faithful(F: GroupoidFunctor) -> bool:
    S = F.source
    for x in S.objects:
        for y in S.objects:
            arrows = S.hom(x, y)
            if len({F.fa(a) for a in arrows}) != len(arrows):
                return False
    return True


def is_fully_faithful(F: GroupoidFunctor) -> bool:
    S, T = F.source, F.target
    for x in S.objects:
        for y in S.objects:
            arrows = S.hom(x, y)
            images = {F.fa(a) for a in arrows}
            if len(images) != len(arrows) or len(images) != len(T.hom(F.fo(x), F.fo(y))):
                return False
    return True


def is_essentially_surjective(F: GroupoidFunctor) -> bool:
    T = F.target
    reached = set()
    for y in set(F.object_map.values()):
        reached.update(t for (s, t) in T.arrows.values() if s == y)
    return reached == set(T.objects)


def is_equivalence(F: GroupoidFunctor) -> bool:
    return is_fully_faithful(F) and is_essentially_surjective(F)


def is_isofibration(F: GroupoidFunctor) -> bool:
    S, T = F.source, F.target
    into = {}
    for a, (s, t) in S.arrows.items():
        into.setdefault(t, set()).add(F.fa(a))
    for x in S.objects:
        y = F.fo(x)
        lifted = into.get(x, set())
        for b, (s, t) in T.arrows.items():
            if t == y and b not in lifted:
                return False
    return True


def is_isomorphism(F: GroupoidFunctor) -> bool:
    return (
        len(set(F.object_map.values())) == len(F.object_map) == len(F.target.objects)
        and len(set(F.arrow_map.values())) == len(F.arrow_map) == len(F.target.arrows)
    )


def gpd_classify(F: GroupoidFunctor) -> GpdClassification:
    return GpdClassification(
        is_fibration=is_isofibration(F),
        is_cofibration=is_injective_on_objects(F),
        is_weak_equivalence=is_equivalence(F),
    )


# ---------------------------------------------------------------- small helpers


def lift_arrow(F: GroupoidFunctor, x, y, c):
    """The unique arrow x -> y sent to c by a fully faithful F."""
    found = [a for a in F.source.hom(x, y) if F.fa(a) == c]
    if len(found) != 1:
        raise ConstructionError(f"no unique arrow {x!r} -> {y!r} over {c!r}")
    return found[0]


def inverse_functor(F: GroupoidFunctor) -> GroupoidFunctor:
    if not is_isomorphism(F):
        raise PreconditionError("functor is not an isomorphism")
    return GroupoidFunctor(
        F.target,
        F.source,
        {y: x for x, y in F.object_map.items()},
        {b: a for a, b in F.arrow_map.items()},
        check=False,
    )


def section(F: GroupoidFunctor) -> GroupoidFunctor:
    """Section of a surjective-on-objects fully faithful F, choosing least preimages."""
    pre = {}
    for x in ordered(F.source.objects):
        pre.setdefault(F.fo(x), x)
    if set(pre) != set(F.target.objects):
        raise PreconditionError("functor is not surjective on objects")
    T = F.target
    arrow_map = {b: lift_arrow(F, pre[s], pre[t], b) for b, (s, t) in T.arrows.items()}
    return GroupoidFunctor(T, F.source, pre, arrow_map, check=False)


def groupoid_pullback(G: GroupoidFunctor, F: GroupoidFunctor):
    """Pullback of G : D -> C and F : B -> C; returns (P, proj to D, proj to B)."""
    if G.target != F.target:
        raise StructuralError("pullback of functors with different targets")
    D, B = G.source, F.source
    objects = [(d, b) for d in D.objects for b in B.objects if G.fo(d) == F.fo(b)]
    objs = set(objects)
    arrows = {}
    for da, (ds, dt) in D.arrows.items():
        ga = G.fa(da)
        for ba, (bs, bt) in B.arrows.items():
            if F.fa(ba) == ga and (ds, bs) in objs:
                arrows[(da, ba)] = ((ds, bs), (dt, bt))
    by_src = {}
    for a, (s, t) in arrows.items():
        by_src.setdefault(s, []).append(a)
    compose = {}
    for f, (s, t) in arrows.items():
        for g in by_src.get(t, ()):
            compose[(g, f)] = (D.comp(g[0], f[0]), B.comp(g[1], f[1]))
    P = FiniteGroupoid(
        objects,
        arrows,
        {(d, b): (D.id(d), B.id(b)) for d, b in objects},
        compose,
        {a: (D.inv(a[0]), B.inv(a[1])) for a in arrows},
        check=False,
    )
    p = GroupoidFunctor(P, D, {x: x[0] for x in objects}, {a: a[0] for a in arrows}, check=False)
    r = GroupoidFunctor(P, B, {x: x[1] for x in objects}, {a: a[1] for a in arrows}, check=False)
    return P, p, r


def pseudo_inverse(F: GroupoidFunctor):
    """For an equivalence F : X -> Y, a functor G : Y -> X with chosen
    isos eps[y] : y -> F(G y).  Objects in the image use an identity."""
    if not is_equivalence(F):
        raise PreconditionError("functor is not an equivalence")
    X, Y = F.source, F.target
    image = {}
    for x in ordered(X.objects):
        image.setdefault(F.fo(x), x)
    G0, eps = {}, {}
    for y in Y.objects:
        if y in image:
            G0[y], eps[y] = image[y], Y.id(y)
            continue
        best = None
        for x in X.objects:
            for e in Y.hom(y, F.fo(x)):
                cand = (cell_key(x), cell_key(e))
                if best is None or cand < best[0]:
                    best = (cand, x, e)
        G0[y], eps[y] = best[1], best[2]
    arrow_map = {}
    for d, (s, t) in Y.arrows.items():
        target = Y.comp(eps[t], Y.comp(d, Y.inv(eps[s])))
        arrow_map[d] = lift_arrow(F, G0[s], G0[t], target)
    G = GroupoidFunctor(Y, X, G0, arrow_map, check=False)
    return G, eps


# ---------------------------------------------------------------- factorization and lifting


def gpd_factor(F: GroupoidFunctor, which: str):
    """Factor F = H G.  which is 'cof_trivfib' or 'trivcof_fib'."""
    A, C = F.source, F.target
    if which == "cof_trivfib":
        objects = [("dom", a) for a in A.objects] + [("cod", c) for c in C.objects]

        def under(x):
            return F.fo(x[1]) if x[0] == "dom" else x[1]

        arrows = {}
        for x in objects:
            for y in objects:
                for c in C.hom(under(x), under(y)):
                    arrows[(x, y, c)] = (x, y)
        by_src = {}
        for a in arrows:
            by_src.setdefault(a[0], []).append(a)
        compose = {}
        for f in arrows:
            for g in by_src.get(f[1], ()):
                compose[(g, f)] = (f[0], g[1], C.comp(g[2], f[2]))
        M = FiniteGroupoid(
            objects,
            arrows,
            {x: (x, x, C.id(under(x))) for x in objects},
            compose,
            {a: (a[1], a[0], C.inv(a[2])) for a in arrows},
            check=False,
        )
        G = GroupoidFunctor(
            A,
            M,
            {a: ("dom", a) for a in A.objects},
            {f: (("dom", s), ("dom", t), F.fa(f)) for f, (s, t) in A.arrows.items()},
            check=False,
        )
        H = GroupoidFunctor(M, C, {x: under(x) for x in objects}, {a: a[2] for a in arrows}, check=False)
    elif which == "trivcof_fib":
        objects = [(a, C.tgt(u), u) for a in A.objects for c in C.objects for u in C.hom(F.fo(a), c)]
        arrows = {}
        for x in objects:
            a, c, u = x
            for al in (al for b in A.objects for al in A.hom(a, b)):
                a2 = A.tgt(al)
                for d in (d for c2 in C.objects for d in C.hom(c, c2)):
                    u2 = C.comp(d, C.comp(u, C.inv(F.fa(al))))
                    arrows[(x, al, d)] = (x, (a2, C.tgt(d), u2))
        by_src = {}
        for f, (s, t) in arrows.items():
            by_src.setdefault(s, []).append(f)
        compose = {}
        for f, (s, t) in arrows.items():
            for g in by_src.get(t, ()):
                compose[(g, f)] = (s, A.comp(g[1], f[1]), C.comp(g[2], f[2]))
        M = FiniteGroupoid(
            objects,
            arrows,
            {x: (x, A.id(x[0]), C.id(x[1])) for x in objects},
            compose,
            {f: (arrows[f][1], A.inv(f[1]), C.inv(f[2])) for f in arrows},
            check=False,
        )

        def g0(a):
            return (a, F.fo(a), C.id(F.fo(a)))

        G = GroupoidFunctor(
            A, M, {a: g0(a) for a in A.objects}, {al: (g0(A.src(al)), al, F.fa(al)) for al in A.arrows}, check=False
        )
        H = GroupoidFunctor(M, C, {x: x[1] for x in objects}, {f: f[2] for f in arrows}, check=False)
    else:
        raise ValueError(f"unknown factorization {which!r}")
    if not same_maps(compose_functors(H, G), F):
        raise ConstructionError("local factorization does not recompose")
    return G, H


def gpd_lift(sq: GpdSquare, which: str) -> GroupoidFunctor:
    """Diagonal D -> B for a square with left : A -> D and right : B -> C."""
    top, left, right, bottom = sq.top, sq.left, sq.right, sq.bottom
    lc, rc = gpd_classify(left), gpd_classify(right)
    D, B = left.target, right.source
    preimage = {y: x for x, y in left.object_map.items()}
    if which == "cof_vs_trivfib":
        if not lc.is_cofibration or not rc.is_trivial_fibration:
            raise PreconditionError("square is not a cofibration against a trivial fibration")
        obj = {}
        for d in D.objects:
            if d in preimage:
                obj[d] = top.fo(preimage[d])
            else:
                obj[d] = least(b for b in B.objects if right.fo(b) == bottom.fo(d))
        arrows = {dl: lift_arrow(right, obj[s], obj[t], bottom.fa(dl)) for dl, (s, t) in D.arrows.items()}
        L = GroupoidFunctor(D, B, obj, arrows, check=False)
    elif which == "trivcof_vs_fib":
        if not lc.is_trivial_cofibration or not rc.is_fibration:
            raise PreconditionError("square is not a trivial cofibration against a fibration")
        A = left.source
        base, u, v, obj = {}, {}, {}, {}
        for d in D.objects:
            if d in preimage:
                a = preimage[d]
                base[d], u[d] = a, D.id(d)
                obj[d], v[d] = top.fo(a), B.id(top.fo(a))
                continue
            best = None
            for a in A.objects:
                for e in D.hom(left.fo(a), d):
                    cand = (cell_key(a), cell_key(e))
                    if best is None or cand < best[0]:
                        best = (cand, a, e)
            a, e = best[1], best[2]
            base[d], u[d] = a, e
            # lift bottom(e)^-1 : bottom(d) -> right(top a) to w : b -> top(a)
            target = top.fo(a)
            need = right.target.inv(bottom.fa(e))
            cands = [w for w in B.arrows if B.tgt(w) == target and right.fa(w) == need]
            if not cands:
                raise ConstructionError("isofibration lift missing")
            w = least(cands)
            obj[d], v[d] = B.src(w), B.inv(w)
        arrows = {}
        for dl, (s, t) in D.arrows.items():
            inner = D.comp(D.inv(u[t]), D.comp(dl, u[s]))
            al = lift_arrow(left, base[s], base[t], inner)
            arrows[dl] = B.comp(v[t], B.comp(top.fa(al), B.inv(v[s])))
        L = GroupoidFunctor(D, B, obj, arrows, check=False)
    else:
        raise ValueError(f"unknown lifting problem {which!r}")
    if not same_maps(compose_functors(L, left), top) or not same_maps(compose_functors(right, L), bottom):
        raise ConstructionError("local diagonal does not make both triangles commute")
    return L


# ---------------------------------------------------------------- transport


def transport_post(F: GroupoidFunctor, H: GroupoidFunctor, K: GroupoidFunctor, alpha: NatIso) -> NatIso:
    """The natural iso beta : H => K with F beta = alpha, for F an equivalence."""
    G, eps = pseudo_inverse(F)
    B = F.source
    eta = {x: lift_arrow(F, x, G.fo(F.fo(x)), eps[F.fo(x)]) for x in B.objects}
    beta = {}
    for a in H.source.objects:
        ha, ka = H.fo(a), K.fo(a)
        beta[a] = B.comp(B.inv(eta[ka]), B.comp(G.fa(alpha[a]), eta[ha]))
    out = NatIso(H, K, beta)
    if any(F.fa(beta[a]) != alpha[a] for a in beta):
        raise ConstructionError("transported iso does not map to the given one")
    return out


def transport_pre(G: GroupoidFunctor, H: GroupoidFunctor, K: GroupoidFunctor, alpha: NatIso) -> NatIso:
    """The natural iso beta : H => K with beta G = alpha, for G an equivalence."""
    F, eta = pseudo_inverse(G)
    C = H.target
    beta = {}
    for b in H.source.objects:
        fb = F.fo(b)
        beta[b] = C.comp(C.inv(K.fa(eta[b])), C.comp(alpha[fb], H.fa(eta[b])))
    out = NatIso(H, K, beta)
    if any(beta[G.fo(a)] != alpha[a] for a in G.source.objects):
        raise ConstructionError("transported iso does not restrict to the given one")
    return out


def fibration_lift_up_to_iso(F: GroupoidFunctor, H: GroupoidFunctor, G: GroupoidFunctor, beta: NatIso):
    """Given beta : H => G F with G an isofibration, return (F', alpha : F' => F)
    with G F' = H and G alpha = beta."""
    if not is_isofibration(G):
        raise PreconditionError("functor is not an isofibration")
    A, B = F.source, F.target
    C = G.target
    obj, alpha = {}, {}
    into = {}
    for w, (s, t) in B.arrows.items():
        into.setdefault(t, []).append(w)
    for a in A.objects:
        fa, b = F.fo(a), beta[a]
        if C.is_identity(b):
            obj[a], alpha[a] = fa, B.id(fa)
            continue
        cands = [w for w in into.get(fa, ()) if G.fa(w) == b]
        if not cands:
            raise ConstructionError("isofibration lift missing")
        w = least(cands)
        obj[a], alpha[a] = B.src(w), w
    arrows = {f: B.comp(B.inv(alpha[t]), B.comp(F.fa(f), alpha[s])) for f, (s, t) in A.arrows.items()}
    F2 = GroupoidFunctor(A, B, obj, arrows, check=False)
    al = NatIso(F2, F, alpha)
    if not same_maps(compose_functors(G, F2), H):
        raise ConstructionError("lifted functor does not cover the given one")
    return F2, al


def natural_isos(H: GroupoidFunctor, K: GroupoidFunctor, cap: int = 8) -> list:
    """Every natural isomorphism H => K, by exhaustive search (target size capped)."""
    C = H.target
    if len(C.arrows) > cap:
        raise PreconditionError(f"target groupoid has more than {cap} arrows")
    objs = list(H.source.objects)
    choices = [C.hom(H.fo(x), K.fo(x)) for x in objs]
    out = []
    for combo in itertools.product(*choices):
        comps = dict(zip(objs, combo))
        N = NatIso(H, K, comps, check=False)
        if not N.violations():
            out.append(N)
    return out


def whisker_right(alpha: NatIso, F: GroupoidFunctor) -> dict:
    """Components of alpha F."""
    return {x: alpha[F.fo(x)] for x in F.source.objects}
