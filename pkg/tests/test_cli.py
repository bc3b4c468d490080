import json
import subprocess
import sys

import pytest

from kleinian_unitarity.cli import JobSpec, main, polynomial_from_args, run
from kleinian_unitarity.errors import InputError
from kleinian_unitarity.poly import X


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_decide_examples(capsys):
    code, out = run_json(capsys, "decide", "--coeffs", "0.25,0,-1")
    assert code == 0 and out["status"] == "Unitarizable"
    assert "trace" in out["evidence"] and out["sign_convention"]
    code, out = run_json(capsys, "decide", "--coeffs", "4,0,-1")
    assert code == 0 and out["status"] == "NotUnitarizable"
    assert all(out["evidence"]["certificate_checks"].values())


def test_classify_by_roots(capsys):
    code, out = run_json(capsys, "classify", "--roots", "1/2,-1/2", "--leading", "-1")
    assert code == 0
    assert out["modules"] and all("label" in m for m in out["modules"])


def test_witness_and_gram(capsys):
    code, out = run_json(capsys, "witness", "--coeffs", "4,0,-1")
    assert code == 0 and out["degree"] >= 0
    code, out = run_json(capsys, "gram", "--coeffs", "0.25,0,-1", "--degree", "3")
    assert code == 0 and out["gram"]["positive"]


def test_input_errors(capsys):
    assert main(["decide"]) == 2
    assert main(["decide", "--coeffs", "1,2", "--roots", "1"]) == 2
    assert main(["decide", "--coeffs", "5"]) == 2
    assert main(["decide", "--coeffs", "abc"]) == 2
    assert main(["decide", "--coeffs", "0.25,0,-1", "--degree", "0"]) == 2
    capsys.readouterr()


def test_polynomial_from_args():
    assert polynomial_from_args("4,0,-1", None, None) == 4 - X * X
    assert polynomial_from_args(None, "2,-2", "-1") == 4 - X * X
    with pytest.raises(InputError):
        polynomial_from_args(None, None, None)


def test_run_maps_failures_to_exit_codes():
    # the witness needs every root outside the unit strip
    code, data = run(JobSpec("witness", 0.25 - X * X))
    assert code == 2 and "error" in data


def test_report_is_byte_stable():
    cmd = [sys.executable, "-m", "kleinian_unitarity", "report", "--coeffs", "4,0,-1", "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    assert json.loads(a)["decide"]["status"] == "NotUnitarizable"
