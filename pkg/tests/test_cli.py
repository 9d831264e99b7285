import json
import os
import subprocess
import sys

import pytest

from homrecomb.cli import EXIT_AUDIT, EXIT_ERROR, EXIT_OK, main
from homrecomb.scenario import (
    ScenarioError,
    fixture_dir,
    fixture_paths,
    load_scenario,
    parse_scenario,
    run,
    run_scenario,
    verify,
)

FIX = fixture_dir()
CORRUPTED = os.path.join(FIX, "corrupted", "corrupted_dga.scn")
HEAD = "homrecomb-scenario 1\n"


def fixture(name):
    return os.path.join(FIX, name)


def report_json(text):
    return json.loads(text.split("--- json ---\n", 1)[1])


def test_corpus_is_large_enough():
    assert len(fixture_paths()) >= 20


def test_selective_q6_report():
    rep = run(fixture("selective_q6.scn"))
    kinds = {q["char"]: q["kind"] for q in rep.data["queries"]}
    assert kinds[2] == kinds[3] == "vanishes"
    assert kinds[0] == kinds[5] == "nonvanishes-iff-original"
    for q in rep.data["queries"]:
        if q["kind"] == "vanishes":
            assert q["rule_chain"] and q["cascade"] == "all-vanish"
    assert rep.ok


def test_run_writes_report_to_disk(tmp_path):
    out = tmp_path / "q6.txt"
    rep = run(fixture("selective_q6.scn"), output=str(out))
    assert out.read_text() == rep.render()


def test_empty_query_has_no_verdicts(capsys):
    assert main(["run", fixture("empty_query.scn")]) == EXIT_OK
    data = report_json(capsys.readouterr().out)
    assert data["queries"] == []


@pytest.mark.parametrize("path", fixture_paths(), ids=os.path.basename)
def test_every_fixture_verifies(path):
    rep = verify(path)
    assert rep.audits and rep.ok, [a for a in rep.audits if not a.passed]
    assert "queries" not in rep.data


def test_corrupted_dga_names_the_audit(capsys):
    assert main(["verify", CORRUPTED]) == EXIT_AUDIT
    out = capsys.readouterr().out
    assert "audit dga-d-squared" in out and "FAIL" in out


def test_missing_file_is_an_error(capsys, tmp_path):
    assert main(["run", str(tmp_path / "nope.scn")]) == EXIT_ERROR
    bad = tmp_path / "bad.scn"
    bad.write_text(HEAD + "[files]\ndga = missing.dga\n")
    assert main(["verify", str(bad)]) == EXIT_ERROR
    assert "cannot read dga file" in capsys.readouterr().err


def test_malformed_cycle_index_reports_line(tmp_path, capsys):
    sc = tmp_path / "bad.scn"
    sc.write_text(HEAD + "[fiber]\ncomplexity = 1\n[cycles]\nV1\n[query]\n"
                  "moves = hurwitz 7 left\n")
    assert main(["run", str(sc)]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert "line 7" in err and "position 7" in err


@pytest.mark.parametrize("text, where", [
    ("homrecomb-scenario 2\n", "line 1"),
    (HEAD + "[fibre]\n", "line 2"),
    (HEAD + "[fiber]\ncomplexity = many\n", "line 3"),
    (HEAD + "[fiber]\nsh = 4:vanishes\n", "line 3"),
    (HEAD + "[cycles]\nV1\nV1\n", "line 4"),
    (HEAD + "[cycles]\nV1 sideways\n", "line 3"),
    (HEAD + "[query]\nchars = 0 6\n", "line 3"),
    (HEAD + "[query]\nmoves = hurwitz one left\n", "line 3"),
    (HEAD + "[recombine]\nrho = 2\nu = moore\nq = 6\nn = 3\n", "line 5"),
])
def test_parse_errors_carry_line_numbers(text, where):
    with pytest.raises(ScenarioError, match=where):
        parse_scenario(text)


def test_precondition_error_names_the_object(tmp_path):
    sc = tmp_path / "nodisc.scn"
    sc.write_text(HEAD + "[fiber]\ncomplexity = 1\n[cycles]\nV1\nV2 no-co-disc\n"
                  "[recombine]\nrho = 2\nu = moore\nq = 6\nn = 5\n")
    with pytest.raises(ScenarioError) as exc:
        run(str(sc))
    assert exc.value.obj == "V2" and "line 6" in str(exc.value)


def test_reports_are_byte_identical(tmp_path):
    paths = fixture_paths()
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["run", *paths, "-o", str(a)]) == EXIT_OK
    assert main(["run", *paths, "-o", str(b), "-j", "3"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_char_override_and_audit_toggle(capsys):
    assert main(["run", fixture("selective_q6.scn"), "--chars", "3", "--no-audit"]) == EXIT_OK
    data = report_json(capsys.readouterr().out)
    assert [q["char"] for q in data["queries"]] == [3]
    assert data["queries"][0]["cascade"] is None and data["audits"] == []


def test_truncation_override_reaches_the_dga():
    sc = load_scenario(fixture("with_dga.scn"))
    sc.P = 4
    rep = run_scenario(sc)
    assert rep.data["dga"]["P"] == 4


def test_rho_list_queries():
    rep = run(fixture("moore_q35_rho_list.scn"))
    got = {(q["char"], q["rho"]): q["kind"] for q in rep.data["queries"]}
    assert got[(5, 1)] == "nonvanishes-iff-original"
    assert got[(5, 3)] == got[(7, 4)] == "vanishes"
    assert got[(2, 3)] == "nonvanishes-iff-original"


def test_module_wrappers(capsys, tmp_path):
    assert main(["moore", "6", "--chars", "2,5"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["2"]["h_tilde"] == "{1:1, 2:1}" and out["5"]["oracle_agrees"]
    assert main(["frobenius", fixture("f3_times_dual.alg")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "9"
    assert main(["countable", "--primes", "2,3", "--char", "3"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["countable"] is True
    assert main(["weights", "--brieskorn", "2", "2", "3", "5"]) == EXIT_OK
    capsys.readouterr()
    assert main(["hull", fixture("three_thimbles.tbl"), "--n", "3"]) == EXIT_OK
    assert "verdict" in capsys.readouterr().out
    assert main(["dga", fixture("broken_leibniz.dga")]) == EXIT_AUDIT
    capsys.readouterr()
    assert main(["homology", fixture("rp2.cx"), "--chars", "2,3"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["char 2"] == "{0:1, 1:1, 2:1}" and out["char 3"] == "{0:1}"
    m = tmp_path / "m.txt"
    m.write_text("2 2 Z\n0 0 2\n1 1 3\n")
    assert main(["snf", str(m)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["invariant_factors"] == [1, 6]
    assert main(["rank", str(m), "--ring", "F3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1"


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "homrecomb", "run", fixture("selective_q6.scn")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "vanishes" in proc.stdout
