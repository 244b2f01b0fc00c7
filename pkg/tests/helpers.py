"""Shared generators for the test suite."""
from __future__ import annotations

import itertools
import random

from bigroupoid.core import (
    compose_pseudofunctors,
    identity_pseudofunctor,
    pairing,
    product_pseudofunctor,
    product_and_diagonal,
    projection,
    strict_pseudofunctor,
    GroupoidFunctor,
)
from bigroupoid.corpus import bigroupoids, morphisms
from bigroupoid.model import LiftingSquare
from bigroupoid.terms import Comp, Evaluator, Gen, Graph, Star, Unit

# bigroupoids whose path objects are too large for bulk runs
SLOW = ("d2xd2", "cd3")


def is_quick(F) -> bool:
    B = bigroupoids()
    return not any(F.source is B[n] or F.target is B[n] for n in SLOW)


def quick_names() -> list:
    return sorted(n for n, F in morphisms().items() if is_quick(F))


def compose(*fs):
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = compose_pseudofunctors(g, out)
    return out


# ---------------------------------------------------------------- random terms


def letter_term(letter):
    e, s = letter
    return Gen(e) if s > 0 else Star(Gen(e))


def random_path(rng: random.Random, graph: Graph, start, n: int):
    """Letters (in composition order, leftmost applied last) of a random walk from start."""
    walk, node = [], start
    for _ in range(n):
        moves = [((e, 1), t) for e, (s, t) in graph.edges.items() if s == node]
        moves += [((e, -1), s) for e, (s, t) in graph.edges.items() if t == node]
        if not moves:
            break
        letter, node = rng.choice(sorted(moves, key=repr))
        walk.append(letter)
    return list(reversed(walk)), node


def inverse_word(letters):
    return [(e, -s) for e, s in reversed(letters)]


def _ends(graph, letters, start):
    """Node reached after applying letters (rightmost first) from start."""
    node = start
    for e, s in reversed(letters):
        a, b = graph.edges[e]
        node = b if s > 0 else a
    return node


def pad_with_cancellations(rng, graph, letters, start, k):
    letters = list(letters)
    for _ in range(k):
        i = rng.randrange(len(letters) + 1)
        node = _ends(graph, letters[i:], start)
        extra, _ = random_path(rng, graph, node, 1)
        if extra:
            letters[i:i] = inverse_word(extra) + extra
            # extra is applied first, its inverse right after: a detour out and back
    return letters


def build_term(rng, graph, letters, start, depth=0):
    """A random term whose letters strictify to `letters`, from `start`."""
    if not letters:
        return Unit(start)
    r = rng.random()
    if len(letters) == 1:
        t = letter_term(letters[0])
        if r < 0.15:
            t = Star(Star(t))
    elif r < 0.15 and depth < 4:
        end = _ends(graph, letters, start)
        t = Star(build_term(rng, graph, inverse_word(letters), end, depth + 1))
    else:
        i = rng.randrange(1, len(letters))
        mid = _ends(graph, letters[i:], start)
        t = Comp(build_term(rng, graph, letters[:i], mid, depth + 1), build_term(rng, graph, letters[i:], start, depth + 1))
    r = rng.random()
    if r < 0.08:
        t = Comp(t, Unit(start))
    elif r < 0.16:
        t = Comp(Unit(_ends(graph, letters, start)), t)
    return t


TERM_GRAPH = Graph(["A", "B"], {"f": ("A", "B"), "g": ("B", "A"), "h": ("A", "A")})


def random_parallel_pair(rng, graph=TERM_GRAPH, max_len=4):
    start = rng.choice(sorted(graph.nodes))
    word, _ = random_path(rng, graph, start, rng.randrange(0, max_len + 1))
    u = build_term(rng, graph, pad_with_cancellations(rng, graph, word, start, rng.randrange(0, 3)), start)
    v = build_term(rng, graph, pad_with_cancellations(rng, graph, word, start, rng.randrange(0, 3)), start)
    return u, v


def all_assignments(B, graph: Graph):
    """Every evaluator realising graph in B."""
    nodes = sorted(graph.nodes)
    edges = sorted(graph.edges)
    for zs in itertools.product(B.zero_cells, repeat=len(nodes)):
        nmap = dict(zip(nodes, zs))
        choices = [B.hom[(nmap[graph.edges[e][0]], nmap[graph.edges[e][1]])].objects for e in edges]
        for cs in itertools.product(*choices):
            yield Evaluator(B, nmap, dict(zip(edges, cs)))


# ---------------------------------------------------------------- squares and retracts


def round_trip_square(F1, F2, factor):
    """Square with a known diagonal: F1 = H1 G1 and F2 = H2 G2 give L = G2 H1."""
    f1, f2 = factor(F1), factor(F2)
    sq = LiftingSquare(
        top=compose(f2.first, F1),
        left=f1.first,
        right=f2.second,
        bottom=compose(F2, f1.second),
    )
    return sq, compose(f2.first, f1.second)


def constant_at(A, X, x0):
    """Strict constant morphism onto a 0-cell of a locally discrete X with 1 . 1 = 1."""
    one = X.one(x0)
    ident = X.id2(one)
    G = X.hom[(x0, x0)]
    local = {
        k: GroupoidFunctor(H, G, {f: one for f in H.objects}, {a: ident for a in H.arrows})
        for k, H in A.hom.items()
    }
    return strict_pseudofunctor(A, X, {a: x0 for a in A.zero_cells}, local)


def retract_diagram(F, X):
    """F : A -> B as a retract of F x id_X, with sections <id, const>."""
    A, B = F.source, F.target
    x0 = X.zero_cells[0]
    AX, _, _ = product_and_diagonal(A, X)
    BX, _, _ = product_and_diagonal(B, X)
    iA = pairing(identity_pseudofunctor(A), constant_at(A, X, x0), AX)
    iB = pairing(identity_pseudofunctor(B), constant_at(B, X, x0), BX)
    rA, rB = projection(AX, A, 0), projection(BX, B, 0)
    FX = product_pseudofunctor(F, identity_pseudofunctor(X), AX, BX)
    return iA, rA, iB, rB, FX
