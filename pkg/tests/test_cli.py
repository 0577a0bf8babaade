import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from stackmodel.cli import prelude_text, run

CORPUS = Path(__file__).parent / "data" / "corpus.tt"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def prelude_file(tmp_path):
    p = tmp_path / "prelude.tt"
    p.write_text(prelude_text())
    return str(p)


def test_check_prelude_passes(prelude_file):
    code, out, _ = call("check", prelude_file)
    assert code == 0
    assert out.strip().endswith("declarations ok")


def test_check_reports_errors_with_exit_one():
    code, out, _ = call("--output", "json", "check", str(CORPUS), "--prelude")
    doc = json.loads(out)
    assert code == 1
    assert doc["status"] == "fail" and doc["schemaVersion"] == 1
    assert any(d["status"] == "error" for d in doc["declarations"])


def test_parse_error_is_exit_one(tmp_path):
    p = tmp_path / "bad.tt"
    p.write_text("x : (\n")
    assert call("check", str(p))[0] == 1


def test_missing_file_is_usage_error():
    code, _, err = call("check", "/nonexistent/file.tt")
    assert code == 2 and "usage error" in err


def test_eval_groupoid(prelude_file):
    code, out, _ = call("eval-groupoid", prelude_file, "--decl", "not", "--output", "json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass"
    assert doc["type"]["objects"] == 4


def test_eval_groupoid_unknown_decl(prelude_file):
    assert call("eval-groupoid", prelude_file, "--decl", "nope")[0] == 2


def test_univalence_table():
    code, out, _ = call("univalence", "--max-card", "3", "--output", "json")
    doc = json.loads(out)
    assert code == 0
    diag = {r["X"]: r["paths"] for r in doc["table"] if r["X"] == r["Y"]}
    assert diag == {0: 1, 1: 1, 2: 2, 3: 6}


def test_univalence_text():
    code, out, _ = call("univalence", "--max-card", "2")
    assert code == 0 and "status: pass" in out


@pytest.mark.parametrize("prestack,code", [("terminal", 0), ("const-codiscrete-2", 0),
                                           ("const-discrete-2", 1), ("deep-only", 1)])
def test_stack_check_exit_codes(prestack, code):
    assert call("stack-check", "--site", "cantor", "--depth", "2", "--prestack", prestack)[0] == code


def test_stack_check_unknown_prestack():
    assert call("stack-check", "--site", "cantor", "--prestack", "nope")[0] == 2


def test_unknown_site():
    assert call("force", "--site", "torus", "--formula", "T")[0] == 2


def test_force_forced_and_not():
    code, out, _ = call("--output", "json", "force", "--site", "cantor", "--open", "01",
                        "--formula", "alpha(1) = 1")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "Forced" and doc["certificateChecks"]
    code, out, _ = call("force", "--site", "cantor", "--formula", "Etrunc n. alpha(n) = 1",
                        "--output", "json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "NotForcedUpTo"
    assert doc["obstruction"][-1] == "000"


def test_force_bad_formula():
    assert call("force", "--site", "interval", "--formula", "within(")[0] == 2


def test_demo_mp():
    code, out, _ = call("demo-mp", "--depth", "4", "--output", "json")
    doc = json.loads(out)
    assert code == 0 and doc["conclusion"]["obstruction"] == "0000"


@pytest.mark.parametrize("argv", [["demo-mp", "--depth", "0"], ["demo-cc", "--n", "1"],
                                  ["univalence", "--max-card", "0"], ["frobnicate"], []])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_demo_cc_small():
    code, out, _ = call("demo-cc", "--n", "3", "--depth", "3")
    assert code == 0 and out.strip().endswith("status: pass")


def test_json_output_is_byte_identical():
    a = call("--output", "json", "demo-cc", "--n", "3", "--depth", "3", "--seed", "5")[1]
    b = call("demo-cc", "--n", "3", "--depth", "3", "--seed", "5", "--output", "json")[1]
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stackmodel", "demo-mp", "--depth", "2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "status: pass" in proc.stdout
