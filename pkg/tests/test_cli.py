import json
import subprocess
import sys

import pytest

from equiforms.cli import main
from equiforms.serialize import loads
from equiforms.thom import build_thom


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_thom_json_round_trips(capsys):
    code, out, _ = run(capsys, "thom", "--dim", "2", "--flavor", "rel", "--format", "json")
    assert code == 0
    assert loads(out) == build_thom(2, "rel").payload
    assert json.loads(out)["meta"] == {"dim": 2, "flavor": "rel"}


def test_thom_text(capsys):
    code, out, _ = run(capsys, "thom", "--dim", "1")
    assert code == 0 and "dx1" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["thom", "--dim", "0"],
        ["thom", "--dim", "7"],
        ["thom", "--dim", "2", "--flavor", "x"],
        ["chern", "--symbol", "nope"],
        ["chern", "--symbol", "spin:1", "--rep", "sup"],
        ["chern", "--symbol", "spin:2", "--at", "lam=1"],
        ["chern", "--symbol", "bott", "--at", "theta"],
        ["rr", "--case", "spin", "--n", "3"],
        ["verify", "--suite", "bogus"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage error" in err


def test_chern_exact_and_numeric(capsys):
    code, out, _ = run(capsys, "chern", "--symbol", "bott", "--rep", "q", "--format", "json")
    assert code == 0 and json.loads(out)["meta"]["rep"] == "q"
    code, out, _ = run(capsys, "chern", "--symbol", "bott", "--t", "0.5", "--format", "text")
    assert code == 0 and out.strip()
    code, out, _ = run(capsys, "chern", "--symbol", "spin:1", "--rep", "rel", "--at", "lam=0.5", "x=1,0")
    data = json.loads(out)
    assert code == 0 and set(data) >= {"components", "eta", "params"}


def test_rr_exit_codes(capsys):
    code, out, _ = run(capsys, "rr", "--case", "spin", "--n", "1", "--samples", "2")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "rr", "--case", "spinc", "--n", "1", "--samples", "2", "--tol", "0")
    assert code == 1 and json.loads(out)["pass"] is False


def test_verify_symbolic_criterion_passes(capsys):
    code, out, err = run(capsys, "verify", "--suite", "symbolic", "--criterion", "1", "3")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows and all(r["pass"] for r in rows)
    assert {r["criterion"] for r in rows} == {1, 3}
    assert "checks passed" in err


def test_numeric_report_is_deterministic(capsys):
    argv = ["verify", "--suite", "numeric", "--criterion", "8", "9", "10", "--seed", "3"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0
    assert first[1] == second[1]


def test_tolerance_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("EQUIFORMS_TOL", "1e-300")
    code, out, _ = run(capsys, "verify", "--suite", "numeric", "--criterion", "8")
    assert code == 1
    assert all(json.loads(line)["tolerance"] == 1e-300 for line in out.splitlines())
    # an explicit --tol overrides the environment
    code, _, _ = run(capsys, "verify", "--suite", "numeric", "--criterion", "8", "--tol", "1e-6")
    assert code == 0


def test_flipped_vector_field_is_detected():
    script = (
        "import sys, equiforms.equivariant as e\n"
        "e.VECTOR_FIELD_SIGN = -1\n"
        "from equiforms.cli import main\n"
        "sys.exit(main(['verify', '--suite', 'symbolic', '--criterion', '3']))\n"
    )
    proc = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, timeout=600)
    assert proc.returncode == 1, proc.stderr
