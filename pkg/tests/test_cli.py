import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethecs import cli

GOLDEN = Path(__file__).parent / "golden"


def _run(capsysbinary, *argv):
    code = cli.main(list(argv))
    return code, capsysbinary.readouterr().out


def test_parse_number_forms():
    assert cli.parse_number("3/2") == Fraction(3, 2)
    assert cli.parse_number("1.5") == Fraction(3, 2)
    assert cli.parse_number("7") == 7
    assert cli.parse_number("0.4+1j") == 0.4 + 1j
    assert cli.parse_number("2i") == 2j
    assert cli.parse_number("inf") == float("inf")
    with pytest.raises(cli.ValidationError):
        cli.parse_number("abc")
    with pytest.raises(cli.ValidationError):
        cli.parse_int_list("1,1/2")


def test_emit_conventions():
    out = cli.parse_report(cli.emit_report({"q": Fraction(1, 3), "z": 1 + 2j, "solutions": []}))
    assert out == {"q": "1/3", "z": [1.0, 2.0], "solutions": []}
    doc = cli.parse_report(cli.emit_report({"solutions": []}, {"a": 1}))
    assert doc["solutions"] == [] and "version" in doc and len(doc["config_hash"]) == 16


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | st.text(max_size=5)
    | st.floats(-1e6, 1e6, allow_nan=False).map(lambda x: round(x, 6)),
    lambda c: st.lists(c, max_size=3) | st.dictionaries(st.text(max_size=4), c, max_size=3),
    max_leaves=10)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.text(max_size=4), json_values, max_size=4))
def test_emit_parse_roundtrip(doc):
    assert cli.parse_report(cli.emit_report(doc)) == cli._clean(doc)
    assert cli.emit_report(doc) == cli.emit_report(dict(reversed(list(doc.items()))))


def test_exit_codes(capsysbinary):
    assert _run(capsysbinary, "nonsense")[0] == cli.EXIT_USAGE
    assert _run(capsysbinary)[0] == cli.EXIT_USAGE
    assert _run(capsysbinary, "bethe", "nope")[0] == cli.EXIT_USAGE
    code, out = _run(capsysbinary, "bethe", "solve", "--L", "2", "--theta", "0")
    assert code == cli.EXIT_INVALID and "error" in json.loads(out)
    assert _run(capsysbinary, "jack", "eval", "--mu", "1,x")[0] == cli.EXIT_INVALID
    assert _run(capsysbinary, "freeze", "motif", "--N", "4", "--J", "1,2")[0] == cli.EXIT_INVALID
    assert _run(capsysbinary, "bethe", "solve", "--L", "2", "--bogus", "1")[0] == cli.EXIT_INVALID


def test_solver_failure_exit_code(monkeypatch, capsysbinary):
    def fail(p):
        raise cli.SolverFailure({"M": 1})
    monkeypatch.setattr(cli, "run_bethe_solve", fail)
    code, out = _run(capsysbinary, "bethe", "solve", "--L", "2", "--M", "1")
    assert code == cli.EXIT_SOLVER and json.loads(out)["partial"] == {"M": 1}


def test_jack_eval_polynomial(capsysbinary):
    code, out = _run(capsysbinary, "jack", "eval", "--mu", "1,0,1,2", "--beta", "1/1")
    assert code == 0
    assert json.loads(out)["polynomial"] == "(1)*z1*z3*z4^2 + (1/3)*z2*z3*z4^2 + (1/3)*z1*z2*z3*z4"


def test_bethe_solve_root_zero(capsysbinary):
    code, out = _run(capsysbinary, "bethe", "solve", "--L", "2", "--theta", "0,0", "--kappa", "1", "--M", "1")
    assert code == 0
    finite = [s for s in json.loads(out)["solutions"] if s["roots"]]
    assert len(finite) == 1 and np.allclose(finite[0]["roots"], [[0.0, 0.0]])


def test_repro_n7_roots(capsysbinary):
    code, out = _run(capsysbinary, "repro", "n7")
    (sol,) = json.loads(out)["solutions"]
    assert code == 0
    assert np.allclose(sol["roots"], [[1, -3**0.5 / 2], [1, 3**0.5 / 2]], atol=1e-10)


def test_csv_and_output_file(tmp_path, capsysbinary):
    path = tmp_path / "spec.csv"
    code, _ = _run(capsysbinary, "chain", "spectrum", "--L", "3", "--theta", "0,0.3,-0.2",
                   "--kappa", "3/2", "--format", "csv", "-o", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0] == "M,t2" and len(lines) == 9
    code, out = _run(capsysbinary, "jack", "eval", "--mu", "1,0", "--format", "csv")
    assert code == cli.EXIT_INVALID


def test_config_file_and_override(tmp_path, capsysbinary):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"params": {"L": 2, "theta": "0,0", "kappa": "1", "M": 1}}))
    code, a = _run(capsysbinary, "bethe", "solve", "--config", str(cfg))
    assert code == 0
    _, b = _run(capsysbinary, "bethe", "solve", "--config", str(cfg), "--M", "0")
    assert json.loads(a)["M"] == 1 and json.loads(b)["M"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert _run(capsysbinary, "bethe", "solve", "--config", str(bad))[0] == cli.EXIT_INVALID


def test_determinism(capsysbinary):
    argv = ["cs", "sector", "--lambda", "2,1,1,0", "--beta", "2", "--kappa", "3/2"]
    _, a = _run(capsysbinary, *argv)
    _, b = _run(capsysbinary, *argv)
    assert a == b


@pytest.mark.parametrize("target", ["n4", "n7", "n8", "L4-fusion", "gt-limit"])
def test_repro_golden(target, capsysbinary):
    code, out = _run(capsysbinary, "repro", target)
    assert code == 0
    assert out == (GOLDEN / f"repro_{target}.json").read_bytes()
