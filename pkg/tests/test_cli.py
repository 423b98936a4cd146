import json
import subprocess
import sys

import pytest

from lfpl.cli import run
from lfpl.corpus import CORPUS_DIR

C = str(CORPUS_DIR)


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_ok(capsys):
    code, out, _ = call(capsys, "check", f"{C}/reverse.lfpl")
    assert code == 0
    assert "reverse : L(1) -o L(1)" in out


def test_check_reports_reuse_location(capsys):
    code, _, err = call(capsys, "check", f"{C}/bad_dup_diamond.lfpl")
    assert code == 1
    assert "bad_dup_diamond.lfpl:4:47: variable reused: d" in err


def test_check_reports_syntax_error(capsys):
    code, _, err = call(capsys, "check", f"{C}/fnexp.lfpl")
    assert code == 1
    assert "fnexp.lfpl:3:9: syntax error: unexpected character '!'" in err


def test_check_json(capsys):
    code, out, _ = call(capsys, "check", "--json", f"{C}/bad_capture.lfpl")
    rec = json.loads(out)
    assert code == 1 == rec["exit_code"]
    assert rec["diagnostics"][0]["kind"] == "forbidden capture"


def test_eval(capsys):
    code, out, _ = call(capsys, "eval", f"{C}/reverse_bool.lfpl", "reverse",
                        "[inj1 <>, inj2 <>, inj2 <>]")
    assert code == 0
    assert out.splitlines() == ["[inj2 <>, inj2 <>, inj1 <>]", "cost: 39"]


def test_eval_costs_and_json(capsys):
    code, out, _ = call(capsys, "eval", "--json", "--costs", "paper-example",
                        f"{C}/reverse.lfpl", "reverse", "[<>, <>, <>]")
    rec = json.loads(out)
    assert code == 0 and rec["cost"] == 10 and rec["size"] == 3 == rec["env_size"]


def test_eval_cost_file(capsys, tmp_path):
    f = tmp_path / "costs.txt"
    f.write_text("c_app = 10\n")
    code, out, _ = call(capsys, "eval", "--costs", str(f), f"{C}/reverse.lfpl", "reverse", "[]")
    assert code == 0 and out.splitlines()[1] == "cost: 39"  # 12 at unit costs, three apps now cost 10


@pytest.mark.parametrize("args", [
    ["reverse", "[<>"],
    ["reverse", "[inj1 <>]"],
    ["reverse"],
    ["nosuch", "[]"],
])
def test_eval_user_errors(capsys, args):
    code, _, err = call(capsys, "eval", f"{C}/reverse.lfpl", *args)
    assert code == 1 and err.startswith("error:")


def test_eval_fuel_exhaustion_is_internal(capsys):
    code, _, err = call(capsys, "eval", "--fuel", "5", f"{C}/reverse.lfpl", "reverse", "[<>, <>]")
    assert code == 2 and "FuelExhausted" in err


def test_bound(capsys):
    code, out, _ = call(capsys, "bound", "--costs", "paper-example", f"{C}/reverse.lfpl", "reverse")
    assert code == 0 and out.splitlines() == ["4 + 2*n"]


def test_bound_verify_table(capsys):
    code, out, _ = call(capsys, "bound", "--costs", "paper-example", "--verify", "0..5",
                        f"{C}/reverse.lfpl", "reverse")
    lines = out.splitlines()
    assert code == 0
    assert lines[1].split("\t") == ["n", "cost", "value_poly", "term_poly", "env_poly", "slack"]
    rows = [l.split("\t") for l in lines[2:]]
    assert [r[0] for r in rows] == [str(n) for n in range(6)]
    assert all(r[5] == "0" for r in rows)


def test_bound_verify_bad_range(capsys):
    code, _, _ = call(capsys, "bound", "--verify", "5..2", f"{C}/reverse.lfpl", "reverse")
    assert code == 1


def test_compile_tm(capsys, tmp_path):
    dest = tmp_path / "bitflip.lfpl"
    code, out, _ = call(capsys, "compile-tm", f"{C}/tm/bitflip.tm", "--list-out",
                        "--test", "3", "-o", str(dest))
    assert code == 0
    assert "15 passed, 0 failed" in out
    code, out, _ = call(capsys, "check", str(dest))
    assert code == 0 and "L(1 + 1) -o L(1 + 1)" in out


def test_compile_tm_rejects_partial_delta(capsys):
    code, _, err = call(capsys, "compile-tm", f"{C}/tm/bad_delta.tm")
    assert code == 1 and "no rule for (q,_)" in err


def test_selftest_single_suite_json(capsys):
    code, out, _ = call(capsys, "selftest", "--json", "--suite", "budget", "--seed", "7")
    rec = json.loads(out)
    assert code == 0 and rec["seed"] == 7 and rec["suites"][0]["ok"]


def test_selftest_unknown_suite(capsys):
    code, _, _ = call(capsys, "selftest", "--suite", "nope")
    assert code == 1


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "lfpl.cli", "check", f"{C}/susp.lfpl"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "susp :" in p.stdout
