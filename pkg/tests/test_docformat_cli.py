"""Document format round-trips and the command-line surface."""

import json
import subprocess
import sys

import pytest

from invgpd import docformat
from invgpd.cli import bundled_document, main
from invgpd.core import validate_groupoid
from invgpd.errors import MalformedDocument

INVALID_DOC = """
groupoid broken
  objects 0 1
  morphism phi : 0 -> 1
  inverse phi = phi
"""

AMBIGUOUS_DOC = """
groupoid amb
  objects x
  morphism a : x -> x
  morphism b : x -> x
"""

SPARSE_DOC = """
# a two-element vertex group given sparsely
groupoid z2
  objects x
  morphism t : x -> x
  inverse t = t
  compose t . t = id(x)
"""


def test_bundled_documents_load_and_validate():
    doc = bundled_document()
    assert doc.diagnostics() == {}
    for name in ("Icheck", "nabla", "S1", "SI", "one!", "zero!", "Iflat"):
        assert name in doc.involutives
    for name in ("u", "i", "Si", "iprime", "fold"):
        assert name in doc.functors
    assert "no-fixed-point-lift" in doc.squares


def test_bundled_shapes_match_programmatic_registry():
    from invgpd.core import find_isomorphism
    from invgpd.equivariant import REGISTRY
    from invgpd.search import iter_functors

    doc = bundled_document()
    pairs = {
        "Icheck": "Icheck", "nabla": "nabla", "S1": "S1", "SI": "SI", "one!": "1!",
    }
    for doc_name, reg_name in pairs.items():
        X = doc.involutives[doc_name]
        Y = REGISTRY.shape(reg_name)
        hits = list(iter_functors(X.base, Y.base, bijective=True,
                                  equiv=(X.involution, Y.involution)))
        assert hits, f"{doc_name} differs from registry {reg_name}"


def test_invalid_inverse_loads_and_fails_validation():
    doc = docformat.loads(INVALID_DOC)
    problems = validate_groupoid(doc.groupoids["broken"])
    assert problems and any("inverse" in p for p in problems)


def test_ambiguous_composition_is_rejected():
    with pytest.raises(MalformedDocument):
        docformat.loads(AMBIGUOUS_DOC)


def test_sparse_composition_completion():
    doc = docformat.loads(SPARSE_DOC)
    G = doc.groupoids["z2"]
    assert validate_groupoid(G) == []
    assert G.n_morphisms == 2
    assert G.comp("t", "t") == "id(x)"


def test_document_roundtrip():
    doc = bundled_document()
    text = docformat.dumps(doc)
    doc2 = docformat.loads(text)
    assert set(doc2.groupoids) == set(doc.groupoids)
    assert set(doc2.involutives) == set(doc.involutives)
    assert set(doc2.functors) == set(doc.functors)
    assert set(doc2.squares) == set(doc.squares)
    for name, G in doc.groupoids.items():
        H = doc2.groupoids[name]
        assert G.objects == H.objects
        assert G.morphisms == H.morphisms
        assert G.compose == H.compose
        assert G.inverse == H.inverse
    for name, X in doc.involutives.items():
        Y = doc2.involutives[name]
        assert X.involution.obj_map == Y.involution.obj_map
        assert X.involution.mor_map == Y.involution.mor_map


def run_cli(*argv) -> tuple[int, str]:
    proc = subprocess.run(
        [sys.executable, "-m", "invgpd.cli", *argv],
        capture_output=True, text=True,
    )
    return proc.returncode, proc.stdout


def test_cli_classify_bundled_iprime():
    code, out = run_cli("classify", "iprime", "--structure", "projective", "--format", "json")
    assert code == 0
    rec = json.loads(out)[0]
    assert rec["witness"]["trivial_cofibration"] is False
    code, out = run_cli("classify", "iprime", "--structure", "injective", "--format", "json")
    rec = json.loads(out)[0]
    assert rec["witness"]["trivial_cofibration"] is True


def test_cli_lift_no_filler_exits_1_with_witness():
    code, out = run_cli("lift", "no-fixed-point-lift", "--format", "json")
    assert code == 1
    rec = json.loads(out)[0]
    assert rec["verdict"] == "FAIL"
    assert "witness" in rec


def test_cli_malformed_input_exit_2():
    code, _ = run_cli("classify", "no-such-name", "--structure", "gpd")
    assert code == 2


def test_cli_budget_exceeded_exit_3():
    code, _ = run_cli("universe", "--base", "3", "--budget", "10")
    assert code == 3


def test_cli_reproduce_paper_passes():
    code, out = run_cli("reproduce-paper", "--base", "2", "--format", "json")
    assert code == 0
    recs = json.loads(out)
    checks = [r["check"] for r in recs]
    assert checks == [
        "funext-counterexample",
        "projective-univalence-failure",
        "injective-univalence",
        "universal-map-injective-fibrancy",
    ]
    assert all(r["verdict"] == "PASS" for r in recs)


def test_cli_json_stable_under_reruns():
    a = run_cli("universe", "--base", "2", "--closure", "--seed", "5", "--format", "json")
    b = run_cli("universe", "--base", "2", "--closure", "--seed", "5", "--format", "json")
    assert a == b
    c = run_cli("funext-check", "--format", "json")
    d = run_cli("funext-check", "--format", "json")
    assert c == d


def test_cli_validate_reports_diagnostics(tmp_path):
    bad = tmp_path / "bad.gpd"
    bad.write_text(INVALID_DOC, encoding="utf-8")
    code, out = run_cli("validate", str(bad), "--format", "json")
    assert code == 1
    rec = json.loads(out)[0]
    assert rec["verdict"] == "FAIL"


def test_cli_user_file_resolution(tmp_path):
    extra = tmp_path / "extra.gpd"
    extra.write_text(
        "groupoid two\n  objects a b\n\n"
        "involutive two!\n  base two\n\n"
        "functor diag2 : two! -> two!\n  object a -> a\n  object b -> b\n",
        encoding="utf-8",
    )
    code, out = run_cli("classify", "diag2", "--structure", "gpd",
                        "--file", str(extra), "--format", "json")
    assert code == 0
    rec = json.loads(out)[0]
    assert rec["witness"]["discrete_fibration"] is True


def test_cli_in_process_decompose_and_factorize():
    assert main(["decompose", "iprime", "--structure", "injective"]) == 0
    assert main(["factorize", "Icheck_to_point", "--structure", "injective"]) == 0
    assert main(["pi", "--g", "S1_to_point", "--f", "fold"]) == 0
    assert main(["path", "--f", "Icheck_to_point"]) == 0
