import itertools
import random

import pytest
from hypothesis import given, strategies as st

from helpers import TERM_GRAPH, all_assignments, build_term, pad_with_cancellations, random_path
from bigroupoid import gpd
from bigroupoid.core import GroupoidFunctor, PreconditionError, StructuralError
from bigroupoid.corpus import bigroupoids, morphisms
from bigroupoid.fixtures import cyclic_group, z2_cocycle_fixture, zero_cocycle_fixture
from bigroupoid.terms import (
    Assoc,
    Comp,
    Counit,
    Evaluator,
    EndpointError,
    Gen,
    Graph,
    Id,
    Mapped,
    MappedCell,
    Phi,
    StarComp,
    Star,
    Unit,
    canonical_2cell,
    canonical_2cell_alt,
    decide_formal,
    eval_1cell,
    has_canonical_2cell,
    infer_graph,
    hcomp,
    is_R_fixed,
    length,
    minimal_form,
    normalize,
    normalize_alt,
    parse_term,
    reduce_right_comb,
    reduction_positions,
    rewrite_R,
    strictify,
    to_string,
    vchain,
)

f, g, h, k = Gen("f"), Gen("g"), Gen("h"), Gen("k")
LINE = Graph(["a", "b", "c", "d", "e"], {"f": ("a", "b"), "g": ("b", "c"), "h": ("c", "d"), "k": ("d", "e")})
LOOP = Graph(["a"], {"f": ("a", "a"), "g": ("a", "a")})
Z2 = z2_cocycle_fixture()
STRICT = zero_cocycle_fixture(cyclic_group(2), 2)

random_terms = st.randoms(use_true_random=False).map(
    lambda rng: build_term(
        rng, TERM_GRAPH,
        pad_with_cancellations(rng, TERM_GRAPH, random_path(rng, TERM_GRAPH, "A", rng.randrange(5))[0], "A", 2),
        "A",
    )
)


# ---------------------------------------------------------------- strictification


def test_strictify_examples():
    assert strictify(Comp(Star(f), f), LINE) == ()
    assert strictify(Star(Comp(g, f)), LINE) == (("f", -1), ("g", -1))
    assert strictify(Star(Unit("a")), LINE) == ()


def stack_word(letters):
    out = []
    for e, s in letters:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return tuple(out)


def test_strictify_against_brute_force_on_short_words():
    letters = [("f", 1), ("f", -1), ("g", 1), ("g", -1)]
    for n in range(1, 5):
        for word in itertools.product(letters, repeat=n):
            atoms = [Gen(e) if s > 0 else Star(Gen(e)) for e, s in word]
            # two bracketings and a starred form, all against the same oracle
            left = atoms[0]
            for x in atoms[1:]:
                left = Comp(left, x)
            right = atoms[-1]
            for x in reversed(atoms[:-1]):
                right = Comp(x, right)
            assert strictify(left) == strictify(right) == stack_word(word)
            inverse = tuple((e, -s) for e, s in reversed(stack_word(word)))
            assert strictify(Star(left)) == inverse


def test_has_canonical_2cell():
    assert has_canonical_2cell(Comp(Star(f), f), Unit("a"), LINE)
    assert has_canonical_2cell(Comp(Comp(h, g), f), Comp(h, Comp(g, f)), LINE)
    assert not has_canonical_2cell(f, g, LOOP)
    with pytest.raises(EndpointError):
        has_canonical_2cell(f, g, LINE)


# ---------------------------------------------------------------- R and normalization


def test_rewrite_R_examples():
    r, w = rewrite_R(Star(Unit("a")), LINE)
    assert r == Unit("a") and LINE.ends(w.term) == (Star(Unit("a")), Unit("a"))
    r, w = rewrite_R(Star(Star(f)), LINE)
    assert r == f and LINE.ends(w.term) == (Star(Star(f)), f)
    r, w = rewrite_R(Star(Comp(g, f)), LINE)
    assert r == Comp(Star(f), Star(g))
    assert LINE.ends(w.term) == (Star(Comp(g, f)), r)


@given(random_terms)
def test_R_is_idempotent_and_preserves_strictification(u):
    r, w = rewrite_R(u, TERM_GRAPH)
    assert is_R_fixed(r)
    assert rewrite_R(r, TERM_GRAPH)[0] == r
    assert strictify(r) == strictify(u)
    assert TERM_GRAPH.ends(w.term) == (u, r)


def test_normalize_examples():
    u = Comp(Star(f), Comp(f, Star(f)))
    m1, w1, trace = normalize(u, LINE)
    m2, w2 = normalize_alt(u, LINE)
    assert m1 == m2 == Star(f)
    assert trace == [3, 1]
    for ev in all_assignments(Z2, LINE):
        assert ev.two(w1.term) == ev.two(w2.term)
    assert length(Star(Comp(Star(f), Star(Unit("a"))))) == 1
    assert length(Comp(Star(f), Star(Comp(Star(f), Unit("a"))))) == 2
    m, w, trace = normalize(Unit("a"), LINE)
    assert m == Unit("a") and trace == [0] and w.term == Id(Unit("a"))


def test_normalize_rejects_unreduced_input():
    with pytest.raises(PreconditionError):
        normalize(Star(Comp(g, f)), LINE)


@given(random_terms)
def test_minimal_form_is_the_reduced_word(u):
    m = minimal_form(u, TERM_GRAPH)
    assert length(m) == len(strictify(u))
    assert strictify(m) == strictify(u)
    assert reduction_positions(_atoms(m)) == []


def _atoms(m):
    if isinstance(m, Unit):
        return []
    if isinstance(m, Comp):
        return _atoms(m.left) + _atoms(m.right)
    return [m]


@given(st.lists(st.sampled_from([f, Star(f), g, Star(g)]), min_size=9, max_size=12))
def test_diamond_on_longer_words(word):
    pos = reduction_positions(word)
    for i, j in itertools.combinations(pos, 2):
        wi, _ = reduce_right_comb(word, i, LOOP)
        wj, _ = reduce_right_comb(word, j, LOOP)
        if wi == wj:
            continue
        left = {tuple(reduce_right_comb(wi, x, LOOP)[0]) for x in reduction_positions(wi)}
        right = {tuple(reduce_right_comb(wj, x, LOOP)[0]) for x in reduction_positions(wj)}
        assert left & right


# ---------------------------------------------------------------- canonical 2-cells


def test_canonical_2cell_examples():
    w = canonical_2cell(Comp(Star(f), f), Unit("a"), LINE)
    for ev in all_assignments(Z2, LINE):
        assert ev.two(w.term) == ev.two(Counit(f))
    assert canonical_2cell(f, g, LOOP) is None
    w = canonical_2cell(Comp(Comp(h, g), f), Comp(h, Comp(g, f)), LINE)
    for ev in all_assignments(Z2, LINE):
        assert ev.two(w.term) == ev.two(Assoc(h, g, f))


@given(random_terms, random_terms)
def test_canonical_witnesses_are_sound_and_independent(u, v):
    if TERM_GRAPH.one_ends(u) != TERM_GRAPH.one_ends(v):
        return
    w = canonical_2cell(u, v, TERM_GRAPH)
    if strictify(u) != strictify(v):
        assert w is None and canonical_2cell_alt(u, v, TERM_GRAPH) is None
        return
    w2 = canonical_2cell_alt(u, v, TERM_GRAPH)
    for B in (Z2, STRICT):
        for ev in all_assignments(B, TERM_GRAPH):
            cell = ev.two(w.term)
            assert B.arrows2[cell] == (ev.one(u), ev.one(v))
            assert cell == ev.two(w2.term)


# ---------------------------------------------------------------- evaluation


def test_eval_one_cells_agree_with_the_group():
    mul, inv = Z2.group.mul, Z2.group.inv
    term = Comp(k, Comp(Star(h), Comp(g, Star(f))))
    for xs in itertools.product(["1", "f"], repeat=4):
        edges = dict(zip("fghk", xs))
        expected = mul[(edges["k"], mul[(inv(edges["h"]), mul[(edges["g"], inv(edges["f"]))])])]
        assert eval_1cell(Z2, ({"*": "*"}, edges), term) == expected
    assert eval_1cell(Z2, ({"a": "*"}, {}), Unit("a")) == "1"


def test_eval_structural_cells():
    ev = Evaluator(Z2, {"a": "*"}, {"f": "f", "g": "f"})
    assert ev.two(Id(f)) == "f:0"
    assert ev.two(Counit(f)) == Z2.e("f")
    assert ev.two(Assoc(g, f, f)) == Z2.a("f", "f", "f") == "f:1"
    assert ev.one(Comp(g, f)) == "1"
    # b is the unique cell making the star-of-composite square commute
    cell = ev.two(StarComp(f, g))
    assert Z2.arrows2[cell] == (Z2.star1(Z2.comp1("f", "f")), Z2.comp1(Z2.star1("f"), Z2.star1("f")))


def test_unassigned_edge_is_structural():
    with pytest.raises(StructuralError):
        Evaluator(Z2, {"a": "*"}, {}).one(f)


@pytest.mark.parametrize("name", ["z2", "z2_twisted", "d3", "cd3", "cd2+cd1"])
def test_whisker_functors_are_equivalences(name):
    B = bigroupoids()[name]
    for fcell, (A, Bc) in B.cell1.items():
        for C in B.zero_cells:
            src, tgt = B.hom[(Bc, C)], B.hom[(A, C)]
            post = GroupoidFunctor(
                src, tgt, {x: B.comp1(x, fcell) for x in src.objects},
                {a: B.hcomp(a, B.id2(fcell)) for a in src.arrows},
            )
            assert gpd.is_equivalence(post)
            src, tgt = B.hom[(C, A)], B.hom[(C, Bc)]
            pre = GroupoidFunctor(
                src, tgt, {x: B.comp1(fcell, x) for x in src.objects},
                {a: B.hcomp(B.id2(fcell), a) for a in src.arrows},
            )
            assert gpd.is_equivalence(pre)


# ---------------------------------------------------------------- decide_formal


def pentagon_legs(k, h, g, f):
    lhs = vchain(hcomp(Id(k), Assoc(h, g, f)), Assoc(k, Comp(h, g), f), hcomp(Assoc(k, h, g), Id(f)))
    rhs = vchain(Assoc(k, h, Comp(g, f)), Assoc(Comp(k, h), g, f))
    return lhs, rhs


def hexagon_legs(h, g, f):
    Fh, Fg, Ff = (Gen(Mapped(x)) for x in (h, g, f))
    lhs = vchain(MappedCell(Assoc(h, g, f)), Phi("comp", (Comp(h, g), f)), hcomp(Phi("comp", (h, g)), Id(Ff)))
    rhs = vchain(Phi("comp", (h, Comp(g, f))), hcomp(Id(Fh), Phi("comp", (g, f))), Assoc(Fh, Fg, Ff))
    return lhs, rhs


def test_decide_formal_examples():
    assert decide_formal(*pentagon_legs(k, h, g, f), LINE)
    assert not decide_formal(Counit(f), Id(Unit("a")), LINE)
    assert decide_formal(*hexagon_legs(h, g, f), LINE, morphism_mode=True)
    with pytest.raises(StructuralError):
        decide_formal(*hexagon_legs(h, g, f), LINE)


@pytest.mark.parametrize("name", ["twist_z2", "z2_to_d2", "id_z2_twisted"])
def test_phi_hexagon_evaluates_equal_along_a_morphism(name):
    F = morphisms()[name]
    S = F.source
    lhs, rhs = hexagon_legs(h, g, f)
    for xs in itertools.product(S.cell1, repeat=3):
        ev = Evaluator(F.target, morphism=F, source_nodes={n: "*" for n in "abcd"},
                       source_edges=dict(zip("fgh", xs)))
        assert ev.two(lhs) == ev.two(rhs)


# ---------------------------------------------------------------- syntax


def test_parse_examples():
    assert parse_term("(f . (f* . 1_A))") == Comp(f, Comp(Star(f), Unit("A")))
    assert parse_term("f**") == Star(Star(f))


@given(random_terms)
def test_parse_print_round_trip(u):
    assert parse_term(to_string(u)) == u


def test_frozen_witness_rendering():
    w = canonical_2cell(Comp(Star(f), f), Unit("a"), LINE)
    assert to_string(w.term) == "e[f]"
    r, _ = rewrite_R(Star(Comp(g, f)), LINE)
    assert to_string(r) == "(f* . g*)"


def test_random_pairs_cover_long_terms():
    rng = random.Random(1)
    lengths = [length(build_term(rng, TERM_GRAPH, random_path(rng, TERM_GRAPH, "A", 4)[0], "A")) for _ in range(50)]
    assert max(lengths) >= 4


def test_infer_graph():
    g = infer_graph(parse_term("h"))
    assert g.edges == {"h": ("src(h)", "tgt(h)")}
    g = infer_graph(parse_term("(g . f)"), parse_term("1_A"), parallel=True)
    assert g.edges == {"f": ("A", "src(g)"), "g": ("src(g)", "A")}
    assert list(infer_graph(parse_term("1_A")).nodes) == ["A"]
    with pytest.raises(EndpointError):
        infer_graph(parse_term("(1_A . 1_B)"))
