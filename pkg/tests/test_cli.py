import json
import subprocess
import sys
from pathlib import Path

import pytest

from topomaps.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_compile_surjection_and_apply(tmp_path, capsys):
    op = tmp_path / "abs.csv"
    code, out, _ = run(capsys, "compile", "--kind", "surjection", "--fn", DATA / "abs5.json", "--out", op)
    assert code == 0
    lines = out.splitlines()
    assert lines[:3] == ["kind surjection", "dimension 5", "components M=3 N=2"]
    assert float(lines[3].split()[1]) <= 1e-12
    assert op.read_text().startswith("dims,5,5\n")
    assert (tmp_path / "abs.csv.basis.json").exists()
    code, out, _ = run(capsys, "apply", "--op", op, "--input", DATA / "abs_pm1.json")
    assert code == 0
    assert "set {1}" in out.splitlines()
    assert out.splitlines()[-1].startswith("garbage-norm ")


def test_identity_bijection_file(tmp_path, capsys):
    op = tmp_path / "id.csv"
    assert run(capsys, "compile", "--kind", "bijection", "--fn", DATA / "identity3.json", "--out", op)[0] == 0
    assert op.read_text().splitlines() == [
        "dims,3,3",
        "0,0,1,0",
        "1,1,1,0",
        "2,2,1,0",
    ]


def test_empty_set_gives_empty_output(tmp_path, capsys):
    op = tmp_path / "abs.csv"
    run(capsys, "compile", "--kind", "surjection", "--fn", DATA / "abs5.json", "--out", op)
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"space": ["-2", "-1", "0", "1", "2"], "members": []}))
    code, out, _ = run(capsys, "apply", "--op", op, "--input", empty)
    assert code == 0 and "set {}" in out.splitlines()


def test_kind_mismatch_names_property(tmp_path, capsys):
    code, _, err = run(capsys, "compile", "--kind", "surjection", "--fn", DATA / "injection2to3.json",
                       "--out", tmp_path / "x.csv")
    assert code == 2
    assert "not surjective" in err and "y1" in err
    assert len(err.strip().splitlines()) == 1


def test_tsum_circuit(tmp_path, capsys):
    c = tmp_path / "tsum.gates"
    code, out, _ = run(capsys, "compile", "--kind", "qubit-binary", "--fn", DATA / "tsum3.json", "--out", c)
    assert code == 0
    assert "qubits 21" in out.splitlines() and "ancilla-1 6" in out.splitlines()
    code, out, _ = run(capsys, "apply", "--op", c, "--input", DATA / "grid3_one.json", "--input", DATA / "grid3_two.json")
    assert code == 0 and out.splitlines()[-1] == "set {2}"
    code, out, _ = run(capsys, "verify", "--op", c)
    assert code == 0 and out.splitlines() == ["reversibility-cases 10000 failures 0", "ok"]


def test_unary_circuit_with_fuzzy_input(tmp_path, capsys):
    c = tmp_path / "m.gates"
    assert run(capsys, "compile", "--kind", "qubit-unary", "--fn", DATA / "merge4.json", "--out", c)[0] == 0
    fn = json.loads((DATA / "merge4.json").read_text())
    s = tmp_path / "fuzzy.json"
    s.write_text(json.dumps({"space": fn["domain"], "members": [], "membership": [0.5, 0.5, 0, 0]}))
    code, out, _ = run(capsys, "apply", "--op", c, "--input", s)
    assert code == 0
    probs = {ln.split()[1]: float(ln.split()[2]) for ln in out.splitlines() if ln.startswith("prob ")}
    target = fn["codomain"][1]
    assert abs(probs[target] - (1 - 0.75 * 0.75)) < 1e-12
    code, out, _ = run(capsys, "verify", "--op", c)
    assert code == 0 and out.splitlines()[0] == "reversibility-cases 64 failures 0"


def test_unary_needs_pad(tmp_path, capsys):
    out = tmp_path / "abs.gates"
    code, _, err = run(capsys, "compile", "--kind", "qubit-unary", "--fn", DATA / "abs5.json", "--out", out)
    assert code == 2 and "pad" in err
    assert run(capsys, "compile", "--kind", "qubit-unary", "--pad", "--fn", DATA / "abs5.json", "--out", out)[0] == 0


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", "--fn", DATA / "abs5.json")
    assert code == 0
    lines = out.splitlines()
    assert "m_nr 0" in lines and "multiplicities 0=1 1=2 2=2" in lines
    _, out, _ = run(capsys, "stats", "--fn", DATA / "identity3.json")
    assert "n_b 3" in out.splitlines() and "n_n 0" in out.splitlines()
    _, out, _ = run(capsys, "stats", "--fn", DATA / "merge4.json")
    assert "qubits qubit-unary 6" in out.splitlines()


def test_demux(capsys):
    code, out, _ = run(capsys, "demux", "--bits", 2, "--k", 3)
    assert code == 0
    assert out.splitlines() == ["qubits 6", "cswap 3", "binary 11", "map 0001", "position 3"]
    assert run(capsys, "demux", "--bits", 2, "--k", 4)[0] == 2


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--layer", 2, 3, 4)
    assert code == 0
    lines = out.splitlines()
    assert "total-leading-order 576" in lines and "copy-ancillae 4" in lines
    code, out, _ = run(capsys, "estimate", "--inner", 3, 4)
    assert code == 0 and "qubits leading-order 288" in out
    assert sum(1 for ln in out.splitlines() if ln.startswith("stage ")) == 5


@pytest.mark.parametrize("argv", [[], ["compile"], ["estimate"], ["demux", "--bits", "x", "--k", "1"], ["nope"]])
def test_usage_errors_exit_1(argv, capsys):
    assert run(capsys, *argv)[0] == 1


def test_validation_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "stats", "--fn", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run(capsys, "stats", "--fn", bad)
    assert code == 2 and "not valid JSON" in err


def test_numeric_failure_exit_3(tmp_path, capsys):
    op = tmp_path / "id.csv"
    run(capsys, "compile", "--kind", "bijection", "--fn", DATA / "identity3.json", "--out", op)
    op.write_text(op.read_text().replace("2,2,1,0", "2,2,0.5,0"))
    code, out, err = run(capsys, "verify", "--op", op)
    assert code == 3 and "unitarity residual" in err


def test_input_space_mismatch(tmp_path, capsys):
    op = tmp_path / "abs.csv"
    run(capsys, "compile", "--kind", "surjection", "--fn", DATA / "abs5.json", "--out", op)
    assert run(capsys, "apply", "--op", op, "--input", DATA / "grid3_one.json")[0] == 2


@pytest.mark.parametrize("kind,fn,inputs", [
    ("surjection", "abs5.json", ["abs_pm1.json"]),
    ("arbitrary", "merge4.json", None),
    ("injection", "injection2to3.json", None),
    ("qubit-binary", "tsum3.json", ["grid3_one.json", "grid3_two.json"]),
])
def test_compile_export_reimport_apply_round_trip(tmp_path, capsys, kind, fn, inputs):
    if inputs is None:
        f = json.loads((DATA / fn).read_text())
        s = tmp_path / "set.json"
        s.write_text(json.dumps({"space": f["domain"], "members": f["domain"][:2]}))
        inputs = [s]
    else:
        inputs = [DATA / p for p in inputs]
    first = tmp_path / "first"
    run(capsys, "compile", "--kind", kind, "--fn", DATA / fn, "--out", first)
    fmt = "gates" if kind.startswith("qubit") else "csv"
    second = tmp_path / "second"
    assert run(capsys, "export", "--op", first, "--format", fmt, "--out", second)[0] == 0
    flags = [x for p in inputs for x in ("--input", p)]
    r1 = run(capsys, "apply", "--op", first, *flags)
    r2 = run(capsys, "apply", "--op", second, *flags)
    assert r1[0] == r2[0] == 0
    assert r1[1] == r2[1]
    assert first.read_text() == second.read_text()


def test_export_gates_rejects_operator(tmp_path, capsys):
    op = tmp_path / "abs.csv"
    run(capsys, "compile", "--kind", "surjection", "--fn", DATA / "abs5.json", "--out", op)
    assert run(capsys, "export", "--op", op, "--format", "gates")[0] == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "topomaps", "demux", "--bits", "1", "--k", "1"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "position 1" in p.stdout
