import json
import subprocess
import sys
from pathlib import Path

import pytest

from kdichotomy.cli import CliError, CommandConfig, main

DATA = Path(__file__).resolve().parents[1] / "src" / "kdichotomy" / "data"


def data(name):
    return str(DATA / f"{name}.aut")


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out.strip().splitlines()
    return code, [json.loads(line) for line in out]


@pytest.mark.parametrize("name, code", [("mult3", 0), ("pow2", 1), ("fig1", 3)])
def test_classify_exit_codes(capsys, name, code):
    assert main(["classify", data(name)]) == code


def test_classify_json(capsys):
    code, (doc,) = run_json(capsys, ["classify", data("pow2")])
    assert code == 1
    assert doc["schema"] == 1 and doc["command"] == "classify"
    assert doc["verdict"] == "KN_INTERDEFINABLE"


def test_f_on_fig1_cycle(capsys):
    code, rows = run_json(capsys, ["f", data("fig1_cycle"), "--n", "22", "4"])
    assert code == 0
    by_n = {r["n"]: r for r in rows}
    assert by_n[22]["F"] == 3
    assert all(r["schema"] == 1 for r in rows)


def test_decide_witness(capsys):
    formula = ("(exists p (and (> p 0) (exists N (forall n (implies (>= n N) "
               "(iff (in n X) (in (+ n p) X)))))))")
    code, (doc,) = run_json(capsys, ["decide", "--set", f"X={data('mult3')}", formula])
    assert code == 0
    assert doc["value"] is True and doc["witness"] == {"p": 3}


def test_enum_and_member(capsys):
    assert main(["enum", data("pow2"), "--upto", "40"]) == 0
    out = capsys.readouterr().out.split()
    assert [int(t) for t in out if t.isdigit()] == [1, 2, 4, 8, 16, 32]
    code, rows = run_json(capsys, ["member", data("mult3"), "9", "10"])
    assert code == 0
    assert json.dumps(rows).count("true") >= 1


def test_vka(capsys):
    assert main(["vka", "--k", "3", "--a", "1", "22"]) == 0
    assert capsys.readouterr().out.strip() == "22: 9"  # 211 in base 3 ends in two 1s


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.aut"
    bad.write_text("radix 2\nstates nope\n")
    assert main(["classify", str(bad)]) == 4
    assert "error" in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["classify", "/nonexistent/x.aut"]) == 4


def test_bad_formula(capsys):
    assert main(["decide", "(and"]) == 4


def test_config_validation():
    with pytest.raises(CliError):
        CommandConfig("serve")
    with pytest.raises(CliError):
        CommandConfig("enum", bound=0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kdichotomy.cli", "periodic", data("mult3")],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
