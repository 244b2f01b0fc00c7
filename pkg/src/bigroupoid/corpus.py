"""A desk-scale corpus: bigroupoids with at most 3 0-cells and hom-groupoids of
at most 6 arrows, and morphisms between them."""
from __future__ import annotations

import random
from functools import lru_cache

from .core import (
    FiniteBigroupoid,
    GroupoidFunctor,
    Pseudofunctor,
    bang,
    compose_pseudofunctors,
    full_sub_bigroupoid,
    identity_pseudofunctor,
    inclusion,
    pairing,
    product_and_diagonal,
    projection,
    strict_pseudofunctor,
    terminal_bigroupoid,
)
from .fixtures import (
    codiscrete_bigroupoid,
    coproduct,
    cyclic_group,
    delooping,
    group_morphisms,
    random_theta,
    random_twist_data,
    twist_bigroupoid,
    twist_comparison,
    twist_pseudofunctor,
    z2_cocycle_fixture,
)


def codiscrete_map(S: FiniteBigroupoid, T: FiniteBigroupoid, fn: dict) -> Pseudofunctor:
    """Strict morphism between codiscrete bigroupoids induced by a map of 0-cells."""
    local = {}
    for (x, y), G in S.hom.items():
        u, v = fn[x], fn[y]
        local[(x, y)] = GroupoidFunctor(G, T.hom[(u, v)], {(x, y): (u, v)}, {("=", (x, y)): ("=", (u, v))})
    return strict_pseudofunctor(S, T, fn, local)


@lru_cache(maxsize=None)
def bigroupoids() -> dict:
    z2 = z2_cocycle_fixture()
    kappa, nu, mu = random_twist_data(z2, random.Random(7))
    twisted = twist_bigroupoid(z2, kappa, nu, mu)
    d2 = delooping(cyclic_group(2))
    out = {
        "z2": z2,
        "z2_twisted": twisted,
        "d2": d2,
        "d3": delooping(cyclic_group(3, "g")),
        "cd1": codiscrete_bigroupoid(["u"]),
        "cd2": codiscrete_bigroupoid(["x", "y"]),
        "cd3": codiscrete_bigroupoid(["p", "q", "r"]),
        "terminal": terminal_bigroupoid(),
    }
    out["cd2+cd1"] = coproduct(out["cd2"], out["cd1"])
    out["d2xd2"] = product_and_diagonal(d2, d2)[0]
    out["_twist"] = (kappa, nu, mu)
    return out


def bigroupoid_names() -> list:
    return [k for k in bigroupoids() if not k.startswith("_")]


@lru_cache(maxsize=None)
def morphisms() -> dict:
    """Named morphisms between corpus bigroupoids."""
    B = bigroupoids()
    z2, tw, d2, d3 = B["z2"], B["z2_twisted"], B["d2"], B["d3"]
    cd1, cd2, cd3, T = B["cd1"], B["cd2"], B["cd3"], B["terminal"]
    out = {}
    for name in bigroupoid_names():
        out[f"id_{name}"] = identity_pseudofunctor(B[name])
        out[f"bang_{name}"] = bang(B[name], T)
    P = B["d2xd2"]
    I = identity_pseudofunctor(d2)
    out["diag_d2"] = pairing(I, I, P)
    out["proj1_d2xd2"] = projection(P, d2, 0)
    out["proj2_d2xd2"] = projection(P, d2, 1)
    out["twist_z2"] = twist_comparison(tw, z2, *B["_twist"])
    ident = {"1": "1", "f": "f"}
    out["z2_to_d2"] = group_morphisms(z2, d2, ident, lambda a: 0, limit=1)[0]
    out["d2_to_z2_trivial"] = group_morphisms(d2, z2, {"1": "1", "f": "1"}, lambda a: 0, limit=1)[0]
    out["z2_to_z2_trivial"] = group_morphisms(z2, z2, {"1": "1", "f": "1"}, lambda a: 0, limit=1)[0]
    out["d3_to_d2_trivial"] = group_morphisms(d3, d2, {"1": "1", "g": "1", "g2": "1"}, lambda a: 0, limit=1)[0]
    out["d2_to_d2_alt"] = group_morphisms(d2, d2, ident, lambda a: 0, limit=2)[-1]
    out["cd3_to_cd2"] = codiscrete_map(cd3, cd2, {"p": "x", "q": "x", "r": "y"})
    out["cd2_to_cd3"] = codiscrete_map(cd2, cd3, {"x": "p", "y": "r"})
    out["cd1_to_cd2"] = codiscrete_map(cd1, cd2, {"u": "y"})
    out["cd2_to_cd1"] = codiscrete_map(cd2, cd1, {"x": "u", "y": "u"})
    sub = full_sub_bigroupoid(cd3, ["p", "q"])
    out["sub_pq_cd3"] = inclusion(sub, cd3)
    fold = {"x": "u", "y": "u", "u": "u"}
    out["fold_cd2+cd1"] = codiscrete_like_fold(B["cd2+cd1"], cd1, fold)
    out["z2_to_d2_to_z2"] = compose_pseudofunctors(out["d2_to_z2_trivial"], out["z2_to_d2"])
    out["twist_z2_to_d2"] = compose_pseudofunctors(out["z2_to_d2"], out["twist_z2"])
    return out


def codiscrete_like_fold(S: FiniteBigroupoid, T: FiniteBigroupoid, fn: dict) -> Pseudofunctor:
    """Strict morphism from a locally discrete bigroupoid onto a codiscrete one."""
    local = {}
    for (x, y), G in S.hom.items():
        u, v = fn[x], fn[y]
        H = T.hom[(u, v)]
        local[(x, y)] = GroupoidFunctor(
            G, H, {f: (u, v) for f in G.objects}, {a: ("=", (u, v)) for a in G.arrows}
        )
    return strict_pseudofunctor(S, T, fn, local)


def morphism_names() -> list:
    return list(morphisms())


def random_morphism(rng: random.Random, names=None) -> Pseudofunctor:
    """A corpus morphism conjugated by random automorphisms of its 1-cell images."""
    table = morphisms()
    name = rng.choice(sorted(names or table))
    F = table[name]
    return twist_pseudofunctor(F, random_theta(F, rng))


def composable_pairs() -> list:
    """Pairs (first, second) of corpus morphism names with first.target == second.source."""
    table = morphisms()
    out = []
    for a, F in table.items():
        for b, G in table.items():
            if F.target is G.source:
                out.append((a, b))
    return out
