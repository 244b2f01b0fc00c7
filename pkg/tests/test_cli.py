import contextlib
import io
import json

import pytest
from hypothesis import given, strategies as st

from helpers import TERM_GRAPH, build_term, random_path, round_trip_square
from bigroupoid import cli
from bigroupoid.core import FiniteBigroupoid, identity_pseudofunctor
from bigroupoid.corpus import bigroupoids, morphisms
from bigroupoid.fixtures import z2_cocycle_fixture
from bigroupoid.model import factor_cof_trivfib, factor_trivcof_fib
from bigroupoid.terms import parse_term, to_string

M = morphisms()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(cli.dumps(obj) if not isinstance(obj, str) else obj, encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def broken_fixture():
    B = z2_cocycle_fixture()
    bad = {**B.assoc, ("f", "1", "f"): "1:1"}
    return FiniteBigroupoid(B.zero_cells, B.hom, B.comp, B.unit, B.inv, bad, B.lunit, B.runit, B.counit, B.unit2)


# ---------------------------------------------------------------- documented examples


def test_validate_cocycle_fixture(tmp_path, capsys):
    path = write(tmp_path, "fixture.b", z2_cocycle_fixture())
    code, out, _ = run(capsys, "validate", path)
    assert code == 0
    assert out == "KIND: bigroupoid\nSTATUS: ok\nVIOLATIONS: 0\n"


def test_reduce_example(capsys):
    code, out, _ = run(capsys, "reduce", "(f . (f* . 1_A))")
    assert code == 0
    assert out == (
        "TERM: (f . (f* . 1_A))\n"
        "STRICT: 1\n"
        "R_FORM: (f . f*)\n"
        "MINIMAL: 1_A\n"
        "LENGTH: 0\n"
        "STEPS: 1\n"
    )


def test_coherence_example(capsys):
    code, out, _ = run(capsys, "coherence", "(f* . f)", "1_A")
    assert code == 0
    assert out == "SOURCE: (f* . f)\nTARGET: 1_A\nWITNESS: e[f]\n"


def test_coherence_without_witness(capsys):
    code, out, _ = run(capsys, "coherence", "f", "g")
    assert code == 1
    assert out.startswith("WITNESS: NONE\n")


# ---------------------------------------------------------------- exit codes


def test_invalid_bigroupoid_exits_one(tmp_path, capsys):
    path = write(tmp_path, "bad.b", broken_fixture())
    code, out, _ = run(capsys, "validate", path)
    assert code == 1
    assert "STATUS: invalid\n" in out and "VIOLATION: pentagon" in out


def test_verbose_lists_every_violation(tmp_path, capsys):
    path = write(tmp_path, "bad.b", broken_fixture())
    _, out, _ = run(capsys, "validate", path)
    _, loud, _ = run(capsys, "--verbose", "validate", path)
    count = int(next(l for l in loud.splitlines() if l.startswith("VIOLATIONS:")).split()[1])
    assert loud.count("VIOLATION: ") == count
    assert out.count("VIOLATION: ") == min(count, 20)


@pytest.mark.parametrize("argv,where", [
    (["validate", "missing.json"], "missing.json"),
    (["reduce", "(f . "], "term"),
    (["reduce", "(1_A . 1_B)"], "term"),
])
def test_errors_exit_two(capsys, argv, where):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error: ") and where in err


def test_usage_error_exits_two(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "factor", "x.json")[0] == 2


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.update(format_version=2), "format_version"),
    (lambda d: d.update(kind="widget"), "kind"),
    (lambda d: d.pop("payload"), "payload"),
    (lambda d: d["payload"].update(zero_cells=[]), "payload"),
])
def test_bad_documents_name_the_location(tmp_path, capsys, mutate, where):
    doc = cli.to_document(z2_cocycle_fixture())
    mutate(doc)
    path = write(tmp_path, "doc.json", json.dumps(doc))
    code, _, err = run(capsys, "validate", path)
    assert code == 2 and where in err


def test_malformed_json_reports_line_and_column(tmp_path, capsys):
    path = write(tmp_path, "doc.json", '{"format_version": 1,\n  "kind": }')
    code, _, err = run(capsys, "validate", path)
    assert code == 2 and "line 2 column" in err


def test_wrong_kind_for_command(tmp_path, capsys):
    path = write(tmp_path, "b.json", z2_cocycle_fixture())
    code, _, err = run(capsys, "classify", path)
    assert code == 2 and "expected a pseudofunctor" in err


# ---------------------------------------------------------------- model commands


def test_classify(tmp_path, capsys):
    code, out, _ = run(capsys, "classify", write(tmp_path, "F.json", M["z2_to_d2"]))
    assert code == 0
    assert out == (
        "FIBRATION: true\nCOFIBRATION: true\nWEAK_EQUIVALENCE: false\n"
        "TRIVIAL_FIBRATION: false\nTRIVIAL_COFIBRATION: false\n"
    )


@pytest.mark.parametrize("wfs,sizes", [("cof-trivfib", "3 10 12"), ("trivcof-fib", "2 4 4")])
def test_factor(tmp_path, capsys, wfs, sizes):
    code, out, _ = run(capsys, "factor", "--wfs", wfs, write(tmp_path, "F.json", M["cd1_to_cd2"]))
    assert code == 0
    lines = dict(l.split(": ", 1) for l in out.splitlines())
    assert lines["MIDDLE_SIZES"] == sizes and lines["RECOMPOSES"] == "true"
    if wfs == "cof-trivfib":
        assert lines["FIRST_COFIBRATION"] == lines["SECOND_TRIVIAL_FIBRATION"] == "true"
    else:
        assert lines["FIRST_TRIVIAL_COFIBRATION"] == lines["SECOND_FIBRATION"] == "true"
        assert lines["RETRACTION_SPLITS"] == "true"


def test_factor_emit_matches_library(tmp_path, capsys):
    F = M["z2_to_d2"]
    code, out, _ = run(capsys, "factor", "--wfs", "cof-trivfib", "--emit", "second", write(tmp_path, "F.json", F))
    assert code == 0
    assert cli.loads(out).same_maps(factor_cof_trivfib(F).second)


@pytest.mark.parametrize("wfs,factor", [("cof-trivfib", factor_cof_trivfib), ("trivcof-fib", factor_trivcof_fib)])
def test_lift(tmp_path, capsys, wfs, factor):
    sq, _ = round_trip_square(M["z2_to_d2"], M["d2_to_z2_trivial"], factor)
    path = write(tmp_path, "sq.json", sq)
    code, out, _ = run(capsys, "lift", "--wfs", wfs, path)
    assert code == 0
    assert out == "LIFT: found\nUPPER_TRIANGLE: true\nLOWER_TRIANGLE: true\n"
    code, out, _ = run(capsys, "lift", "--wfs", wfs, "--emit", path)
    assert sq.solved_by(cli.loads(out))


def test_lift_class_violation_exits_one(tmp_path, capsys):
    K = M["cd2_to_cd1"]
    I = identity_pseudofunctor(K.target)
    path = write(tmp_path, "sq.json", cli.model.LiftingSquare(K, K, I, I))
    code, out, _ = run(capsys, "lift", "--wfs", "cof-trivfib", path)
    assert code == 1 and out.startswith("LIFT: none\nREASON: ")


def test_path_object(tmp_path, capsys):
    code, out, _ = run(capsys, "path-object", write(tmp_path, "B.json", bigroupoids()["d2"]))
    assert code == 0
    assert out == (
        "PATH_SIZES: 2 8 8\nVALID: true\nFACTORS_DIAGONAL: true\n"
        "R_WEAK_EQUIVALENCE: true\nST_FIBRATION: true\n"
    )


def test_pullback(tmp_path, capsys):
    F = write(tmp_path, "F.json", M["cd2_to_cd1"])
    code, out, _ = run(capsys, "pullback", F, F)
    assert code == 0
    assert out == "PULLBACK_SIZES: 4 16 16\nCOMMUTES: true\nP_STRICT: true\nP_FIBRATION: true\n"
    bad = write(tmp_path, "G.json", M["cd1_to_cd2"])
    code, out, _ = run(capsys, "pullback", bad, bad)
    assert code == 1 and out.startswith("PULLBACK: none\n")


def test_eval(tmp_path, capsys):
    B = write(tmp_path, "B.json", z2_cocycle_fixture())
    assign = tmp_path / "map.json"
    assign.write_text(json.dumps({"nodes": {"A": "*"}, "edges": {"f": "f"}}))
    code, out, _ = run(capsys, "eval", B, "--assign", str(assign), "(f . f*)")
    assert code == 0
    assert out == 'TERM: (f . f*)\nVALUE: "1"\n'
    code, _, err = run(capsys, "eval", B, "--assign", str(assign), "g")
    assert code == 2 and "term" in err


# ---------------------------------------------------------------- serialization


def emitted_documents():
    F = M["z2_to_d2"]
    fac = factor_trivcof_fib(F)
    sq, _ = round_trip_square(F, M["d2_to_z2_trivial"], factor_cof_trivfib)
    return [z2_cocycle_fixture(), F, fac.middle, fac.first, fac.retraction, sq, parse_term("((f . g*) . 1_A)")]


@pytest.mark.parametrize("index", range(7))
def test_documents_round_trip(index):
    obj = emitted_documents()[index]
    text = cli.dumps(obj)
    back = cli.loads(text)
    assert cli.dumps(back) == text
    assert cli.to_document_kind(back) == cli.to_document_kind(obj)


def test_corpus_round_trips():
    for name, F in morphisms().items():
        back = cli.loads(cli.dumps(F))
        assert back.same_maps(F) and back.source.data() == F.source.data(), name


def test_reports_are_deterministic(tmp_path, capsys):
    path = write(tmp_path, "F.json", M["cd1_to_cd2"])
    first = run(capsys, "factor", "--wfs", "cof-trivfib", "--emit", "middle", path)
    second = run(capsys, "factor", "--wfs", "cof-trivfib", "--emit", "middle", path)
    assert first == second


@given(st.randoms(use_true_random=False))
def test_reduce_reports_are_stable(rng):
    letters, _ = random_path(rng, TERM_GRAPH, "A", rng.randint(0, 5))
    text = to_string(build_term(rng, TERM_GRAPH, letters, "A"))
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli.main(["reduce", text])
        outs.append((code, buf.getvalue()))
    assert outs[0] == outs[1] and outs[0][0] == 0
    assert parse_term(outs[0][1].splitlines()[0].split(": ", 1)[1]) == parse_term(text)
