import pytest

from countbmc import oracle
from countbmc.errors import BudgetExceededError, NameResolutionError
from countbmc.logic import CmpGt, Prop, Until, parse_lc, to_nnf
from countbmc.net import PetriNet
from countbmc.search import SearchConfig, Trace
from countbmc.smt import EncodeOptions


def test_zero_bound_single_run_no_loop(ups):
    runs = oracle.enumerate_runs(ups, 0, 0)
    assert len(runs) == 1
    only = runs[0]
    assert only.markings == ((0, 0, 0, 0, 0),)
    assert only.fired == ()
    assert only.loop_back is None


def test_kappa_one_length_two_is_unique(ups):
    runs = oracle.enumerate_runs(ups, 2, 1)
    assert {r.fired for r in runs} == {("t0", "t1")}


def test_full_cycle_run_exists_and_loops(ups):
    runs = oracle.enumerate_runs(ups, 5, 1)
    cycle = [r for r in runs if r.fired == ("t0", "t1", "t2", "t6", "t7")]
    assert cycle, "lifecycle run spawn/load/run/terminate/remove missing"
    assert cycle[0].markings[-1] == (0, 0, 0, 0, 0)
    # from the zero marking only t0 fires, landing on s_1
    loops = {r.loop_back for r in cycle}
    assert loops == {None, 1}
    with_loop = next(r for r in cycle if r.loop_back == 1)
    assert with_loop.loop_transition == "t0"


def test_every_enumerated_run_validates(ups):
    for run in oracle.enumerate_runs(ups, 3, 2):
        run.validate(ups)


def test_loop_backs_are_exactly_the_one_step_returns(aps):
    for run in oracle.enumerate_runs(aps, 3, 1):
        if run.loop_back is None:
            continue
        target = run.markings[run.loop_back]
        assert oracle.fire(aps, run.markings[-1], run.loop_transition) == target


def test_budget_refusal():
    net = PetriNet(
        places=tuple(f"p{i}" for i in range(8)),
        transitions=("t",),
        arcs={("t", "p0"): 1},
        initial_marking=(0,) * 8,
    )
    with pytest.raises(BudgetExceededError, match="budget"):
        oracle.enumerate_runs(net, 1, 3, budget=100)


def test_eval_count_comparison(ups):
    runs = oracle.enumerate_runs(ups, 2, 1)
    run = next(r for r in runs if r.loop_back is None)
    assert oracle.eval_bounded(ups, CmpGt("p1", "p0"), run, 2) is True
    assert oracle.eval_bounded(ups, CmpGt("p1", "p0"), run, 0) is False


def test_eval_globally_on_zero_run(ups):
    run = oracle.enumerate_runs(ups, 0, 0)[0]
    f = parse_lc("G(#x)p2(x)<=p0(x)").formula
    assert oracle.eval_bounded(ups, f, run, 0, EncodeOptions(g_noloop="prefix")) is True
    assert oracle.eval_bounded(ups, f, run, 0, EncodeOptions(g_noloop="false")) is False


def test_eval_until_clause(ups):
    run = next(r for r in oracle.enumerate_runs(ups, 2, 1) if r.loop_back is None)
    assert oracle.eval_bounded(ups, Until(Prop("t0"), Prop("t1")), run, 0) is True


def test_eval_trailing_modes(ups):
    run = oracle.enumerate_runs(ups, 0, 0)[0]
    strict = EncodeOptions(trailing_transitions="strict_false")
    free = EncodeOptions(trailing_transitions="unconstrained")
    f = parse_lc("t0 & t1").formula
    assert oracle.eval_bounded(ups, f, run, 0, strict) is False
    assert oracle.eval_bounded(ups, f, run, 0, free) is True


def test_oracle_check_witness_row1(ups):
    verdict = oracle.oracle_check(ups, parse_lc("F(#x)p1(x)>p0(x)"), SearchConfig(k_max=5))
    assert verdict.kind == "sat"
    assert verdict.k <= 4
    assert verdict.kappa == 1
    assert verdict.trace.fired == ("t0", "t1")


def test_oracle_check_strict_row4(ups):
    verdict = oracle.oracle_check(ups, parse_lc("F(t0 & t1 & t7)"), SearchConfig(k_max=5))
    assert verdict.kind == "unsat_up_to"
    assert len(verdict.stats) == 21


def test_oracle_check_unknown_name(ups):
    with pytest.raises(NameResolutionError):
        oracle.oracle_check(ups, parse_lc("F ghost"), SearchConfig(k_max=1))


def test_reachable_markings_depth(ups):
    reach = oracle.reachable_markings(ups, depth=2, kappa=1)
    assert (0, 0, 0, 0, 0) in reach
    assert (1, 0, 0, 0, 0) in reach
    assert (0, 1, 0, 0, 0) in reach
    assert (0, 0, 1, 0, 0) not in reach  # needs three steps
