import io
import json

import pytest

from ciflin.cli import run
from ciflin.dsl import parse_model

from conftest import GOLDEN, TRAINGATE

MODEL = str(TRAINGATE)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv, golden", [
    (["sts", MODEL, "--prune", "--format", "json"], "traingate.sts.json"),
    (["lits", MODEL, "--format", "json"], "traingate.lits.json"),
    (["linearize", MODEL], "traingate.linear.cif"),
])
def test_golden_outputs(argv, golden):
    code, out, _ = cli(*argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_sts_state_count():
    code, out, _ = cli("sts", MODEL, "--prune", "--format", "json")
    assert json.loads(out)["stateCount"] == 16


def test_sts_dot_has_dashed_environment_edges():
    code, out, _ = cli("sts", MODEL, "--format", "dot")
    assert code == 0 and out.startswith("digraph sts {")
    assert "style=dashed" in out


def test_linearize_output_is_valid_input(tmp_path):
    _, out, _ = cli("linearize", MODEL)
    m = parse_model(out)
    (a,) = m.automata
    assert len(a.edges) == 12 and a.locations == ("X",)
    assert a.sync == frozenset({"rq", "go", "out"})
    path = tmp_path / "lin.cif"
    path.write_text(out)
    code, echoed, _ = cli("parse", str(path))
    assert code == 0 and echoed == out


def test_linearize_json_and_dot():
    _, out, _ = cli("linearize", MODEL, "--format", "json", "--simplify")
    d = json.loads(out)
    assert d["location"] == "X" and len(d["edges"]) == 12
    assert [p["automaton"] for p in d["pointers"]] == ["Train0", "Train1", "Gate"]
    _, dot, _ = cli("linearize", MODEL, "--format", "dot")
    assert dot.count("X -> X") == 12


def test_parse_echoes_normalized_model():
    code, out, _ = cli("parse", MODEL)
    assert code == 0
    assert parse_model(out) == parse_model(TRAINGATE.read_text())


def test_explicit_formats():
    code, out, _ = cli("explicit", MODEL, "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["initial"]) == 4
    assert d["stateCount"] == len(d["states"])
    code, out, _ = cli("explicit", MODEL, "--format", "dot")
    assert out.startswith("digraph explicit")


def test_size_command(tmp_path):
    from ciflin.dsl import print_model
    from ciflin.generate import random_size_model
    path = tmp_path / "m.cif"
    path.write_text(print_model(random_size_model(1)))
    code, out, _ = cli("size", str(path), "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["match"] and d["action"] == "a"


def test_verify_model():
    code, out, _ = cli("verify", MODEL, "--seed", "0")
    assert code == 0
    assert out.count("[PASS]") == 3


def test_verify_fault_and_replay(tmp_path):
    path = tmp_path / "out.json"
    code, _, _ = cli("verify", MODEL, "--inject-fault", "lits", "--format", "json", "-o", str(path))
    assert code == 1
    report = json.loads(path.read_text())
    assert not report["passed"]
    code, out, _ = cli("verify", MODEL, "--replay", str(path), "--inject-fault", "lits")
    assert code == 1 and out.startswith("REPRODUCED")
    code, out, _ = cli("verify", MODEL, "--replay", str(path))
    assert code == 0 and out.startswith("NOT REPRODUCED")


def test_verify_random_models():
    code, out, _ = cli("verify", "--random", "3", "--seed", "7", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert [m["name"] for m in d["models"]] == ["random-seed-7", "random-seed-8", "random-seed-9"]


@pytest.mark.parametrize("argv", [
    ["lits", MODEL, "--format", "svg"],
    ["verify", MODEL, "--format", "dot"],
    ["frobnicate", MODEL],
    ["parse", "/nonexistent/model.cif"],
    ["size", MODEL],
    ["size", MODEL, "--action", "rq"],
    ["verify"],
])
def test_usage_errors(argv):
    code, _, err = cli(*argv)
    assert code == 2 and err.startswith("cif-lin:")


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cif"
    bad.write_text("automaton {")
    code, _, err = cli("parse", str(bad))
    assert code == 2 and "1:11" in err


def test_budget_exit_code():
    assert cli("explicit", MODEL, "--max-states", "10")[0] == 3
    assert cli("sts", MODEL, "--max-states", "3")[0] == 3
    assert cli("verify", MODEL, "--max-states", "5")[0] == 3


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("CIFLIN_FORMAT", "json")
    code, out, _ = cli("sts", MODEL)
    assert json.loads(out)["stateCount"] == 16
    code, out, _ = cli("sts", MODEL, "--format", "text")
    assert out.startswith("states: 16")
    monkeypatch.setenv("CIFLIN_PRUNE", "false")
    _, out, _ = cli("sts", MODEL)
    assert json.loads(out)["stateCount"] > 16
    monkeypatch.setenv("CIFLIN_PRUNE", "maybe")
    assert cli("sts", MODEL)[0] == 2


def test_output_file(tmp_path):
    path = tmp_path / "lits.txt"
    code, out, _ = cli("lits", MODEL, "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("sync: {go, out, rq}")


def test_deterministic_output():
    for argv in (["linearize", MODEL, "-f", "json"], ["sts", MODEL, "-f", "dot"], ["explicit", MODEL]):
        assert cli(*argv)[1] == cli(*argv)[1]
