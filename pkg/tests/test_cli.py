import json
from pathlib import Path

import pytest

from homoglab.cli import run

FIX = Path(__file__).resolve().parents[1] / "fixtures"


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_monoid_analyze_json(capsys):
    code, out, _ = call(capsys, "--json", "monoid", "analyze", str(FIX / "R0134.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["simple"] and rep["idempotents"] == ["0", "1", "4"]
    assert rep["su_rank"] == 2 and rep["chain"] == ["1", "0"]


def test_json_flag_after_verb(capsys):
    code, out, _ = call(capsys, "monoid", "analyze", str(FIX / "R012.json"), "--json")
    assert code == 0 and json.loads(out)["su_rank"] == 1


def test_monoid_check_violation(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"elements": ["0", "1"], "plus": [[0, 1], [1, 0]]}))
    code, out, _ = call(capsys, "--json", "monoid", "check", str(bad))
    assert code == 1 and not json.loads(out)["valid"]


def test_values_shorthand(tmp_path, capsys):
    f = tmp_path / "v.json"
    f.write_text(json.dumps({"values": [0, 1, 2]}))
    code, out, _ = call(capsys, "--json", "monoid", "check", str(f))
    assert code == 0 and json.loads(out)["elements"] == ["0", "1", "2"]


@pytest.fixture(scope="module")
def space_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("sp") / "space.json"
    assert run(["urysohn", "build", "--monoid", str(FIX / "R012.json"), "-n", "20", "-k", "2", "-o", str(out)]) == 0
    return out


def test_indep_with_oracle(space_file, capsys):
    code, out, _ = call(capsys, "--json", "indep", "--space", str(space_file), "--a", "0", "--b", "0", "--oracle")
    rep = json.loads(out)
    assert code == 0 and rep["divides"] and rep["agree"]


def test_indep_bad_index(space_file, capsys):
    code, _, err = call(capsys, "indep", "--space", str(space_file), "--a", "99", "--b", "0")
    assert code == 2 and err


def test_extend_two_type(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"targets": [{"a": [0], "b": [4]}, {"a": [9], "b": [13]}]}))
    code, out, _ = call(capsys, "--json", "extend", "solve", "--family", "crosscut", "--cells", "3,3,3",
                        "--problem", str(p), "--expect", "unsat")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "UNSAT" and rep["trace"]


def test_extend_chain_replayed(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"targets": [{"a": [0, 1], "b": [4]}, {"a": [9, 10], "b": [13, 2]}]}))
    code, out, _ = call(capsys, "--json", "extend", "solve", "--family", "crosscut", "--cells", "3,3,3",
                        "--problem", str(p), "--expect", "sat")
    rep = json.loads(out)
    if rep["verdict"] == "SAT":
        assert code == 0 and rep["replayed"]
    else:
        assert code == 1 and rep["failedStep"] >= 1


@pytest.mark.parametrize("name", ["crosscut", "bipede", "omegapede", "remark41", "remark46"])
def test_example_verify(name, capsys):
    code, out, _ = call(capsys, "--json", "example", "verify", name)
    rep = json.loads(out)
    assert code == 0 and rep["reproduced"]
    assert rep.get("fixtureMatch", True)


def test_homog_expect(capsys):
    code, out, _ = call(capsys, "homog", "check", "--structure", str(FIX / "remark41.json"), "-k", "3",
                        "--expect", "nonhomogeneous")
    assert code == 0 and "not homogeneous" in out
    code, _, _ = call(capsys, "homog", "check", "--structure", str(FIX / "remark41.json"), "-k", "3",
                      "--expect", "homogeneous")
    assert code == 1


def test_homog_k_too_large(capsys):
    code, _, _ = call(capsys, "homog", "check", "--structure", str(FIX / "remark41.json"), "-k", "50")
    assert code == 2


def test_equiv_discover(capsys):
    code, out, _ = call(capsys, "--json", "equiv", "discover", "--structure", str(FIX / "crosscut333.json"))
    rep = json.loads(out)
    assert code == 0 and len(rep["relations"]) == 3


def test_bogus_verb(capsys):
    code, _, _ = call(capsys, "frobnicate")
    assert code == 2


def test_missing_file(capsys):
    code, _, err = call(capsys, "monoid", "analyze", "/nonexistent.json")
    assert code == 2 and err


def test_bad_seed(monkeypatch, capsys):
    monkeypatch.setenv("HOMOGLAB_SEED", "abc")
    code, _, err = call(capsys, "monoid", "analyze", str(FIX / "R012.json"))
    assert code == 2 and "HOMOGLAB_SEED" in err


def test_output_is_deterministic(capsys):
    _, a, _ = call(capsys, "--json", "example", "verify", "omegapede")
    _, b, _ = call(capsys, "--json", "example", "verify", "omegapede")
    assert a == b
