import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qilent.analysis import Interpreter
from qilent.cli import main

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
S2 = 1 / np.sqrt(2)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def prog(name):
    return PROGRAMS / f"{name}.qil"


def entries(out):
    return np.array([[complex(*z) for z in row] for row in json.loads(out)["entries"]])


# analyze ---------------------------------------------------------------------

def test_analyze_ghz_text(capsys):
    code, out, _ = run(capsys, "analyze", prog("ghz"), "--domain", "c", "--init", "zeros")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "{({0,1,2},<XXX,ZIZ,IZZ>)}"
    assert lines[1].split() == ["q0", "q1", "q2"]
    assert ["".join(ln.split("]")[0].split()) for ln in lines[2:]] == ["[XXX", "[ZIZ", "[IZZ"]


def test_analyze_exm1_json(capsys):
    code, out, _ = run(capsys, "analyze", prog("exm1"), "--domain", "e", "--init", "zeros", "--format", "json")
    assert code == 0
    result = json.loads(out)["result"]
    assert [(b["qubits"], b["rows"]) for b in result["blocks"]] == [([0], ["Z"]), ([1], ["Z"]), ([2], ["Z"])]
    code, out, _ = run(capsys, "analyze", prog("exm1"), "--domain", "c", "--init", "zeros", "--format", "json")
    blocks = json.loads(out)["result"]["blocks"]
    assert [(b["qubits"], b["kind"]) for b in blocks] == [([0], "stabilizer"), ([1, 2], "opaque")]


def test_analyze_from_json_start(capsys):
    code, out, _ = run(capsys, "analyze", prog("exm0"), "--domain", "c", "--init", PROGRAMS / "exm0_init.json")
    assert code == 0
    assert out.splitlines()[0] == "{({0},#), ({1},<Z>), ({2,3},#)}"


def test_analyze_trace(capsys):
    args = ("analyze", prog("nonmono"), "--domain", "c", "--init", PROGRAMS / "nonmono_beta.json")
    code, out, _ = run(capsys, *args, "--trace", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["trace"]) == 5
    assert data["trace"][-1]["assignment"] == data["result"]
    code, out, _ = run(capsys, *args, "--trace")
    assert out.startswith("0.CX(q0,q1): ")


def test_analyze_defaults_to_extended_domain_from_top(capsys):
    _, out, _ = run(capsys, "analyze", prog("ghz"), "--format", "json")
    data = json.loads(out)
    assert data["domain"] == "e"
    _, strict, _ = run(capsys, "analyze", prog("ghz"), "--format", "json", "--strict-paper")
    assert strict == out


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.qil"
    bad.write_text("qubits 2;\nCX(q0,q5)")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2 and "2:7" in err
    assert run(capsys, "simulate", bad)[0] == 2
    assert run(capsys, "check", bad)[0] == 2


def test_bad_start_files(capsys, tmp_path):
    assert run(capsys, "analyze", prog("ghz"), "--init", tmp_path / "missing.json")[0] == 2
    wrong = tmp_path / "w.json"
    wrong.write_text((PROGRAMS / "exm0_init.json").read_text())
    assert run(capsys, "analyze", prog("ghz"), "--init", wrong)[0] == 2


def test_fixpoint_bound_exit_code(capsys, tmp_path, monkeypatch):
    loop = tmp_path / "loop.qil"
    loop.write_text("qubits 2; while q0 do H(q1) od")
    monkeypatch.setenv("QILENT_MAX_ITERS", "1")
    code, _, err = run(capsys, "analyze", loop, "--domain", "c", "--init", "zeros")
    assert code == 1 and "analysis error" in err


# simulate --------------------------------------------------------------------

def test_simulate_sep0(capsys):
    code, out, _ = run(capsys, "simulate", prog("sep0"))
    plus00 = np.kron([S2, S2], [1, 0, 0, 0])
    assert code == 0
    assert np.linalg.norm(entries(out) - np.outer(plus00, plus00)) <= 1e-9
    data = json.loads(out)
    assert data["residual_trace"] == 0 and data["truncated_loops"] == 0


def test_simulate_ghz_ensemble(capsys):
    code, out, _ = run(capsys, "simulate", prog("ghz"), "--mode", "ensemble")
    (branch,) = json.loads(out)["branches"]
    amps = np.array([complex(*z) for z in branch["amplitudes"]])
    assert code == 0 and branch["weight"] == 1
    assert np.allclose(np.abs(amps), [S2, 0, 0, 0, 0, 0, 0, S2])


def test_simulate_skip_leaves_the_state(capsys, tmp_path):
    src = tmp_path / "skip.qil"
    src.write_text("qubits 2; skip")
    state = tmp_path / "s.json"
    state.write_text(json.dumps({"amplitudes": [0.6, 0, [0, 0.8], 0]}))
    code, out, _ = run(capsys, "simulate", src, "--state", state)
    v = np.array([0.6, 0, 0.8j, 0])
    assert code == 0 and np.allclose(entries(out), np.outer(v, v.conj()))
    code, out, _ = run(capsys, "simulate", src, "--state", state, "--mode", "ensemble")
    (branch,) = json.loads(out)["branches"]
    assert np.allclose([complex(*z) for z in branch["amplitudes"]], v)


def test_simulate_truncation_warning(capsys, tmp_path):
    loop = tmp_path / "loop.qil"
    loop.write_text("qubits 2; while q0 do H(q1) od")
    code, out, err = run(capsys, "simulate", loop, "--max-iter", "5")
    data = json.loads(out)
    assert code == 0 and data["residual_trace"] == 1 and data["truncated_loops"] == 1
    assert "warning" in data and "warning" in err


def test_simulate_size_limit(capsys, tmp_path):
    big = tmp_path / "big.qil"
    big.write_text("qubits 11; H(q10)")
    assert run(capsys, "simulate", big)[0] == 3
    huge = tmp_path / "huge.qil"
    huge.write_text("qubits 17; H(q16)")
    assert run(capsys, "simulate", huge, "--mode", "ensemble")[0] == 3


def test_simulate_large_state_prints_diagonal(capsys, tmp_path):
    src = tmp_path / "seven.qil"
    src.write_text("qubits 7; X(q6)")
    data = json.loads(run(capsys, "simulate", src)[1])
    assert "entries" not in data and data["diagonal"][1] == 1


def test_bad_amplitudes(capsys, tmp_path):
    state = tmp_path / "s.json"
    state.write_text("[1, 0]")
    assert run(capsys, "simulate", prog("ghz"), "--state", state)[0] == 2
    state.write_text("[0, 0, 0, 0, 0, 0, 0, 0]")
    assert run(capsys, "simulate", prog("ghz"), "--state", state)[0] == 2


# check -----------------------------------------------------------------------

@pytest.mark.parametrize("name, domain", [("exm0", "c"), ("nsep", "e"), ("nonmono", "both")])
def test_check_golden_programs(capsys, name, domain):
    code, out, _ = run(capsys, "check", prog(name), "--domain", domain, "--cases", 30)
    report = json.loads(out)
    assert code == 0 and report["hard_failures"] == 0
    assert set(report) == {"cases", "verified", "inconclusive", "hard_failures", "counterexamples"}


def test_check_random_corpus(capsys):
    code, out, _ = run(capsys, "check", "-", "--cases", 500, "--seed", 7, "--domain", "both")
    report = json.loads(out)
    assert code == 0 and report["cases"] == 1000 and report["hard_failures"] == 0


def test_check_rejects_bad_sizes(capsys):
    assert run(capsys, "check", "-", "--qubits", 7)[0] == 2


def test_check_failure_writes_dump(capsys, tmp_path, monkeypatch):
    monkeypatch.setattr(Interpreter, "t_gate", lambda self, i, a: a)
    dump = tmp_path / "cx.json"
    code, out, err = run(capsys, "check", "-", "--qubits", 2, "--cases", 50, "--domain", "c", "--dump", dump)
    assert code == 1 and str(dump) in err
    assert json.loads(dump.read_text())[0]["program"].startswith("qubits 2;")
    assert json.loads(out)["dump"] == str(dump)


# process level ---------------------------------------------------------------

def test_invocations_are_byte_identical():
    cmds = [
        ["analyze", str(prog("exm1")), "--format", "json", "--trace"],
        ["simulate", str(prog("exm1")), "--mode", "ensemble"],
        ["check", "-", "--cases", "20", "--seed", "3"],
    ]
    for cmd in cmds:
        a, b = (subprocess.run([sys.executable, "-m", "qilent", *cmd], capture_output=True) for _ in range(2))
        assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_usage_errors_from_argparse():
    r = subprocess.run([sys.executable, "-m", "qilent", "analyze", "x.qil", "--domain", "z"], capture_output=True)
    assert r.returncode == 2
