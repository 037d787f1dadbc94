import os
import stat
import sys
import textwrap
import time

import pytest

from countbmc.logic import parse_lc, to_nnf
from countbmc.smt import assemble
from countbmc.solver import (
    SolverAnswer,
    SolverConfig,
    default_solver_config,
    solve,
)

TRIVIAL_SAT = "(set-logic QF_LIA)\n(declare-const x Int)\n(assert (> x 0))\n(check-sat)\n(get-value (x))\n"
TRIVIAL_UNSAT = "(set-logic QF_LIA)\n(assert false)\n(check-sat)\n"


def stub(tmp_path, body: str) -> SolverConfig:
    """A canned 'solver': a python script that ignores its input."""
    path = tmp_path / "stub.py"
    path.write_text("import sys\nsys.stdin.read()\n" + textwrap.dedent(body))
    return SolverConfig((sys.executable, str(path)), timeout=10.0)


def test_trivial_sat_against_reference(refsolver_cfg):
    answer = solve(TRIVIAL_SAT, refsolver_cfg)
    assert answer.status == "sat"


def test_trivial_unsat_against_reference(refsolver_cfg):
    assert solve(TRIVIAL_UNSAT, refsolver_cfg).status == "unsat"


def test_decoded_witness_replays(ups, refsolver_cfg):
    # cross-check: the model of the (2,1) witness is an oracle-verified run
    from countbmc import oracle
    from countbmc.smt import place_sym, trans_sym

    psi = to_nnf(parse_lc("F(#x)p1(x)>p0(x)").formula)
    answer = solve(assemble(ups, psi, 2, 1), refsolver_cfg)
    assert answer.status == "sat"
    fired = tuple(
        next(t for t in ups.transitions if answer.model[trans_sym(t, i)])
        for i in range(2)
    )
    runs = oracle.enumerate_runs(ups, 2, 1)
    assert fired in {r.fired for r in runs}


def test_stub_sat_with_model(tmp_path):
    cfg = stub(
        tmp_path,
        """
        print("sat")
        print("((x 3))")
        print("((b true))")
        print("((n (- 2)))")
        """,
    )
    answer = solve("ignored", cfg)
    assert answer.status == "sat"
    assert answer.model == {"x": 3, "b": True, "n": -2}


def test_stub_negative_value_via_script_object(tmp_path, ups):
    # tracked symbols come from the script; all must resolve
    script = assemble(ups, parse_lc("(#x>0)p0(x)").formula, 0, 1)
    lines = ["print('sat')"]
    for sym in script.tracked:
        value = "true" if script.symbols[sym][0] != "place" else "0"
        lines.append(f"print('(({sym} {value}))')")
    cfg = stub(tmp_path, "\n".join(lines) + "\n")
    answer = solve(script, cfg)
    assert answer.status == "sat"
    assert set(script.tracked) <= set(answer.model)


def test_stub_missing_tracked_symbol_is_hard_error(tmp_path, ups):
    script = assemble(ups, parse_lc("(#x>0)p0(x)").formula, 0, 1)
    cfg = stub(tmp_path, "print('sat')\nprint('((p_p0_0 1))')\n")
    answer = solve(script, cfg)
    assert answer.status == "crashed"
    assert "missing tracked symbols" in answer.transcript


def test_stub_unknown(tmp_path):
    assert solve("x", stub(tmp_path, "print('unknown')")).status == "unknown"


def test_stub_garbage_is_crashed(tmp_path):
    answer = solve("x", stub(tmp_path, "print('segmentation fault')"))
    assert answer.status == "crashed"
    assert "segmentation fault" in answer.transcript


def test_stub_nonzero_exit_is_crashed(tmp_path):
    answer = solve("x", stub(tmp_path, "raise SystemExit(3)"))
    assert answer.status == "crashed"
    assert "exit code 3" in answer.transcript


def test_timeout_kills_the_process(tmp_path):
    path = tmp_path / "sleepy.py"
    path.write_text("import time\ntime.sleep(60)\n")
    cfg = SolverConfig((sys.executable, str(path)), timeout=0.5)
    started = time.monotonic()
    answer = solve("x", cfg)
    assert answer.status == "timeout"
    assert time.monotonic() - started < 10


def test_file_placeholder_transport(tmp_path):
    path = tmp_path / "cat.py"
    path.write_text(
        "import sys\n"
        "text = open(sys.argv[1]).read()\n"
        "print('sat' if 'x' in text else 'unsat')\n"
    )
    cfg = SolverConfig((sys.executable, str(path), "{file}"), timeout=10.0)
    assert solve("x", cfg).status == "sat"
    assert solve("y", cfg).status == "unsat"


def test_missing_program_is_crashed():
    cfg = SolverConfig(("definitely-not-a-solver-9f2",), timeout=5.0)
    assert solve("x", cfg).status == "crashed"


def test_env_var_supplies_default(monkeypatch):
    monkeypatch.setenv("COUNTBMC_SOLVER", "mysolver --flag 'a b'")
    cfg = default_solver_config()
    assert cfg.command == ("mysolver", "--flag", "a b")


def test_default_falls_back_to_bundled(monkeypatch):
    monkeypatch.delenv("COUNTBMC_SOLVER", raising=False)
    monkeypatch.setenv("PATH", "")
    cfg = default_solver_config()
    assert cfg.command[-2:] == ("-m", "countbmc.refsolver")


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig((), timeout=1.0)
    with pytest.raises(ValueError):
        SolverConfig(("z3",), timeout=0)
