import json
from pathlib import Path

import pytest

from pmc.cli import main

ROOT = Path(__file__).resolve().parents[1]
SIGS = ROOT / "signatures"
DIAG = SIGS / "diagrams"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_row_mass(capsys):
    code, out, _ = run(capsys, "eval", "--sig", SIGS / "kernels.json", DIAG / "mass.pmc", "--json")
    assert code == 0
    assert json.loads(out)["morphism"] == [[1.0], [0.5]]


def test_eval_unit_scalar(capsys):
    code, out, _ = run(capsys, "eval", "--sig", SIGS / "kernels.json", "--expr", "id[]", "--json")
    assert code == 0 and json.loads(out) == {"backend": "finstoch", "dom": [], "cod": [], "morphism": [[1.0]]}


def test_eval_type_error(capsys):
    code, _, err = run(capsys, "eval", "--sig", SIGS / "kernels.json", DIAG / "ill_typed.pmc")
    assert code == 1 and "type mismatch" in err


def test_eval_syntax_error_reports_span(capsys):
    code, _, err = run(capsys, "eval", "--sig", SIGS / "kernels.json", "--expr", "f ; ; f")
    assert code == 1 and "bytes 4..5" in err


def test_eval_missing_payload(capsys):
    code, _, err = run(capsys, "eval", "--backend", "par", "--sig", SIGS / "kernels.json", "--expr", "f")
    assert code == 2


def test_eval_unit_unsupported(capsys):
    code, _, _ = run(capsys, "eval", "--sig", SIGS / "kernels.json", "--expr", "del[X] ; unit[X]")
    assert code == 2


def test_order_example_pair(capsys):
    base = ["order", "--backend", "rel", "--sig", SIGS / "relations.json", DIAG / "R.pmc", DIAG / "S.pmc", "--json"]
    code, out, _ = run(capsys, *base)
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = run(capsys, *base, "--relation", "restriction")
    assert code == 3 and not json.loads(out)["holds"]


def test_order_reflexive_true_effect(capsys):
    code, out, _ = run(capsys, "order", "--sig", SIGS / "kernels.json", "--expr", "f", "--expr", "f", "--json")
    assert code == 0 and json.loads(out)["witness"] == [[1.0]] * 4


def test_order_not_parallel(capsys):
    code, _, _ = run(capsys, "order", "--sig", SIGS / "kernels.json", "--expr", "f", "--expr", "prior")
    assert code == 1


def test_validity(capsys):
    code, out, _ = run(capsys, "validity", "--sig", SIGS / "validity.json", DIAG / "sigma.pmc", DIAG / "p.pmc", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["holds"] and not doc["degenerate"]
    assert doc["prior_validity"] == pytest.approx(0.6)
    assert doc["posterior_validity"] == pytest.approx(2 / 3)


def test_conditional(capsys):
    code, out, _ = run(capsys, "conditional", "--sig", SIGS / "kernels.json", DIAG / "joint.pmc", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["marginal"]["morphism"][0] == pytest.approx([0.4, 0.6])
    assert doc["conditional"]["morphism"] == [[0.5, 0.5], [0.5, 0.5]]


def test_bayes_identity(capsys):
    code, out, _ = run(capsys, "bayes", "--sig", SIGS / "kernels.json", "--expr", "id[X]", "--expr", "prior", "--json")
    assert code == 0 and json.loads(out)["inverse"] == [[1.0, 0.0], [0.0, 1.0]]


def test_laws_usage_errors(capsys):
    assert run(capsys, "laws", "--trials", "0")[0] == 1
    assert run(capsys, "laws", "--suites", "nope")[0] == 1
    assert run(capsys, "laws", "--suites", "rel-appendix")[0] == 1
    assert run(capsys, "laws", "--tol", "-1")[0] == 1
    assert run(capsys, "laws", "--unknown-flag")[0] == 1


def test_laws_writes_reports(capsys, tmp_path):
    code, out, _ = run(capsys, "laws", "--backend", "rel", "--suites", "rel-appendix,balanced",
                       "--trials", "20", "--out", tmp_path)
    assert code == 0
    assert {p.name for p in tmp_path.iterdir()} == {"rel-appendix-rel.json", "balanced-rel.json"}
    assert json.loads((tmp_path / "balanced-rel.json").read_text())["passed"]


def test_laws_json_single_document(capsys):
    code, out, _ = run(capsys, "laws", "--suites", "means,validity", "--trials", "10", "--json")
    doc = json.loads(out)
    assert code == 0 and [r["suite"] for r in doc["reports"]] == ["means", "validity"]


def test_laws_signature_fixed_cases(capsys):
    code, out, _ = run(capsys, "laws", "--backend", "rel", "--sig", SIGS / "relations.json",
                       "--suites", "enrichment", "--trials", "5", "--json")
    checks = json.loads(out)["reports"][0]["checks"]
    assert code == 0 and checks["reflexive[R]"] == 1


def test_seed_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PMC_SEED", "42")
    code, out, _ = run(capsys, "laws", "--suites", "means", "--trials", "3", "--seed", "1", "--json")
    assert json.loads(out)["seed"] == 42
    monkeypatch.setenv("PMC_SEED", "x")
    assert run(capsys, "laws", "--suites", "means", "--trials", "3")[0] == 1


def test_gen_sig_roundtrip(capsys, tmp_path):
    path = tmp_path / "rand.json"
    assert run(capsys, "gen-sig", "--objects", "A=2,B=3", "--generators", "3", "--out", path)[0] == 0
    for backend in ("finstoch", "par", "rel"):
        code, out, _ = run(capsys, "eval", "--backend", backend, "--sig", path, "--expr", "g1", "--json")
        assert code == 0


def test_missing_files(capsys):
    assert run(capsys, "eval", "--sig", "/nonexistent.json", "--expr", "f")[0] == 1
    assert run(capsys, "eval", "--sig", SIGS / "kernels.json", "/nonexistent.pmc")[0] == 1
    assert run(capsys, "eval", "--expr", "f")[0] == 1
