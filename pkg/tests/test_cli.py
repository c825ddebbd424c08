import json
import subprocess
import sys

import pytest

from qcatfib.cli import main
from qcatfib.core import is_isomorphic
from qcatfib.corpus import simplex
from qcatfib.serialize import load


def run(argv, tmp_path, name="out.json"):
    """Run the CLI with a structured report written to a file; return (code, report)."""
    out = tmp_path / name
    code = main(argv + ["--format", "structured", "-o", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc


def without_timing(doc):
    if isinstance(doc, dict):
        return {k: without_timing(v) for k, v in doc.items() if k != "timing"}
    if isinstance(doc, list):
        return [without_timing(v) for v in doc]
    return doc


# ---------------------------------------------------------------------------
# check


def test_check_left_on_slice_projection(tmp_path):
    code, doc = run(["check", "--kind", "left", "slice_projection"], tmp_path)
    assert code == 0
    assert doc["verdict"]["status"] == "Holds" and doc["verdict"]["squares"] > 0


def test_check_kan_on_edge_over_point(tmp_path):
    code, doc = run(["check", "--kind", "kan", "simplex1_over_point"], tmp_path)
    assert code == 1
    w = doc["verdict"]["witness"]
    assert w["witness"] == "LiftingProblem"
    assert "Lambda^2_0" in json.dumps(w["fields"])


def test_replay_reproduces_failure(tmp_path):
    code, _ = run(["check", "--kind", "kan", "simplex1_over_point"], tmp_path, "report.json")
    assert code == 1
    assert main(["check", "--replay", str(tmp_path / "report.json")]) == 1


def test_replay_of_cocartesian_witness(tmp_path):
    code, _ = run(["check", "--kind", "cocartesian", "groth_endpoints"], tmp_path, "r.json")
    assert code == 1
    assert main(["check", "--replay", str(tmp_path / "r.json")]) == 1


def test_replay_rejects_tampered_witness(tmp_path):
    run(["check", "--kind", "left", "simplex1_over_point"], tmp_path, "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    # a Holds report carries no witness
    doc["verdict"]["witness"] = None
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    assert main(["check", "--replay", str(tmp_path / "bad.json")]) == 3


def test_check_flat_and_pattern(tmp_path):
    assert run(["check", "--kind", "flat", "flatness_counterexample"], tmp_path)[0] == 1
    assert run(["check", "--kind", "pattern", "identity_simplex2_pattern"], tmp_path)[0] == 0


@pytest.mark.parametrize("kind", ["left", "right", "kan", "inner", "iso", "cocartesian", "cartesian"])
def test_identity_passes_every_kind(kind, tmp_path):
    assert run(["check", "--kind", kind, "id_simplex2"], tmp_path)[0] == 0


def test_reports_are_deterministic(tmp_path):
    a = run(["check", "--kind", "inner", "flatness_counterexample"], tmp_path, "a.json")[1]
    b = run(["check", "--kind", "inner", "flatness_counterexample"], tmp_path, "b.json")[1]
    assert without_timing(a) == without_timing(b)
    a = run(["check", "--kind", "kan", "simplex1_over_point"], tmp_path, "c.json")[1]
    b = run(["check", "--kind", "kan", "simplex1_over_point"], tmp_path, "d.json")[1]
    assert without_timing(a) == without_timing(b)


def test_reports_independent_of_hash_seed(tmp_path):
    outs = []
    for seed in ("1", "2"):
        out = tmp_path / f"h{seed}.json"
        subprocess.run([sys.executable, "-m", "qcatfib", "check", "--kind", "cocartesian",
                        "groth_endpoints", "--format", "structured", "-o", str(out)],
                       env={"PYTHONHASHSEED": seed, "PATH": ""}, check=False)
        outs.append(without_timing(json.loads(out.read_text())))
    assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# audit


def test_audit_theorem_on_prop_span(tmp_path):
    code, doc = run(["audit", "--theorem", "6.2", "prop_6_5_span"], tmp_path)
    assert code == 0
    assert doc["status"] == "Holds"
    assert all(item["status"] == "Holds" for item in doc["items"])


def test_audit_corollary_builds_z(tmp_path):
    code, doc = run(["audit", "--theorem", "6.2.1", "prop_6_5_span"], tmp_path)
    assert code == 0
    assert doc["construction"]["cocartesian"]["status"] == "Holds"


# ---------------------------------------------------------------------------
# construct


def test_construct_twisted_arrow(tmp_path):
    out = tmp_path / "tw.json"
    assert main(["construct", "twisted-arrow", "simplex1", "-o", str(out)]) == 0
    b = load(out)
    X = b.maps["projection"].source if "projection" in b.maps else next(iter(b.complexes.values()))
    assert X.counts == (3, 2)


def test_construct_join(tmp_path):
    out = tmp_path / "j.json"
    assert main(["construct", "join", "simplex1", "simplex0", "-o", str(out)]) == 0
    b = load(out)
    assert any(is_isomorphic(X, simplex(2)) for X in b.complexes.values())


def test_construct_slice_under(tmp_path):
    out = tmp_path / "s.json"
    assert main(["construct", "slice-under", "simplex1", "--at", "0", "-o", str(out)]) == 0
    b = load(out)
    f = next(iter(b.maps.values()))
    assert is_isomorphic(f.source, simplex(1))


def test_construct_random_poset_nerve_uses_seed(tmp_path):
    texts = []
    for seed in (1, 1, 7):
        out = tmp_path / f"r{len(texts)}.json"
        assert main(["construct", "random-poset-nerve", "--seed", str(seed), "--size", "4",
                     "-o", str(out)]) == 0
        texts.append(out.read_text())
    assert texts[0] == texts[1]


# ---------------------------------------------------------------------------
# input errors


def test_validate_good_and_bad(tmp_path, capsys):
    assert main(["validate", "simplex2"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"grades": [["a"],\n ["e"]], "faces": {"e": ["a", "q"]}}')
    assert main(["validate", str(bad)]) == 3
    err = capsys.readouterr().err
    assert f"{bad}:2:" in err and "unknown simplex" in err


def test_missing_file_is_input_error():
    assert main(["check", "--kind", "left", "/nonexistent/file.json"]) == 3


def test_bound_must_be_at_least_two(monkeypatch):
    assert main(["check", "--kind", "left", "--bound", "1", "simplex1_over_point"]) == 3
    monkeypatch.setenv("QCATFIB_BOUND", "1")
    assert main(["check", "--kind", "left", "simplex1_over_point"]) == 3
    monkeypatch.setenv("QCATFIB_BOUND", "4")
    assert main(["check", "--kind", "left", "slice_projection"]) == 0


def test_budget_must_be_positive():
    assert main(["check", "--kind", "flat", "--budget-collapse", "0", "flatness_counterexample"]) == 3


def test_installed_entry_point():
    r = subprocess.run([sys.executable, "-m", "qcatfib", "check", "--kind", "left", "slice_projection"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Holds" in r.stdout
