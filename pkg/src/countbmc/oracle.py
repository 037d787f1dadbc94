"""Ground truth by brute force: enumerate every bounded run and evaluate
the bounded semantics directly.

This module mirrors the encoder's option switches exactly, so the two can
be compared verdict-for-verdict.  It is intentionally naive; the budget
guard refuses instances it should not attempt rather than answering
partially.
"""

from __future__ import annotations

from collections import deque

from . import logic
from .errors import BudgetExceededError
from .net import Marking, PetriNet, enabled, fire
from .search import (
    REFUTE,
    BmcVerdict,
    MicroStepStat,
    SearchConfig,
    Trace,
    schedule,
)
from .smt import (
    G_NOLOOP_FALSE,
    TRAILING_STRICT,
    EncodeOptions,
    _validate_atoms,
)

# The guard estimate places*(kappa+1)^places is a loose state-space bound;
# the shipped 9-place net needs ~9e7 at cap 5, so the default sits above
# that while still refusing genuinely explosive instances.
DEFAULT_BUDGET = 100_000_000


def _check_budget(net: PetriNet, lam: int, kappa: int, budget: int) -> None:
    estimate = max(1, len(net.places)) * (kappa + 1) ** len(net.places)
    if estimate > budget:
        raise BudgetExceededError(
            f"state estimate {estimate} exceeds budget {budget} "
            f"({len(net.places)} places, cap {kappa})"
        )


def loop_targets(net: PetriNet, markings: tuple[Marking, ...]) -> list[tuple[int, str]]:
    """All (l, transition) with a one-step return from the last marking to
    marking l.  Per target, the first such transition in net order."""
    last = markings[-1]
    out = []
    for l, target in enumerate(markings):
        for t in net.transitions:
            if t in enabled(net, last) and fire(net, last, t) == target:
                out.append((l, t))
                break
    return out


def enumerate_runs(
    net: PetriNet, lam: int, kappa: int, budget: int = DEFAULT_BUDGET
) -> list[Trace]:
    """Every firing sequence of length lam from the initial marking whose
    markings respect the token cap, each paired with every valid back-loop
    (the loop-free variant first)."""
    _check_budget(net, lam, kappa, budget)
    if any(n > kappa for n in net.initial_marking):
        return []
    runs: list[Trace] = []
    count = 0

    def emit(markings: tuple[Marking, ...], fired: tuple[str, ...]):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetExceededError(f"more than {budget} runs at lam={lam}, kappa={kappa}")
        runs.append(Trace(kappa=kappa, markings=markings, fired=fired))
        for l, t in loop_targets(net, markings):
            runs.append(
                Trace(
                    kappa=kappa,
                    markings=markings,
                    fired=fired,
                    loop_back=l,
                    loop_transition=t,
                )
            )

    def dfs(markings: tuple[Marking, ...], fired: tuple[str, ...]):
        if len(fired) == lam:
            emit(markings, fired)
            return
        here = markings[-1]
        for t in net.transitions:
            if t not in enabled(net, here):
                continue
            nxt = fire(net, here, t)
            if any(n > kappa for n in nxt):
                continue
            dfs(markings + (nxt,), fired + (t,))

    dfs((net.initial_marking,), ())
    return runs


def eval_bounded(
    net: PetriNet,
    f: logic.Formula,
    run: Trace,
    i: int,
    opts: EncodeOptions = EncodeOptions(),
) -> bool:
    """Direct evaluation of the bounded semantics at instant i.

    Mirrors the encoder's translation clause for clause, including the
    option switches.  Under unconstrained trailing, a transition atom at
    the final instant is angelic: it evaluates true in both polarities,
    matching what a solver can do with a free boolean.  Negation is also
    handled natively (complement), which NNF inputs never exercise.
    """
    lam = run.lam
    index = net.place_index

    def count(place: str, j: int) -> int:
        return run.markings[j][index[place]]

    def ev(g: logic.Formula, i: int) -> bool:
        if isinstance(g, logic.Prop):
            if i < lam:
                return run.fired[i] == g.name
            return opts.trailing_transitions != TRAILING_STRICT
        if isinstance(g, logic.NegProp):
            if i < lam:
                return run.fired[i] != g.name
            return opts.trailing_transitions != TRAILING_STRICT
        if isinstance(g, logic.CountGt):
            return count(g.place, i) > g.bound
        if isinstance(g, logic.CountLe):
            return count(g.place, i) <= g.bound
        if isinstance(g, logic.CmpGt):
            return count(g.left, i) > count(g.right, i)
        if isinstance(g, logic.CmpLe):
            return count(g.left, i) <= count(g.right, i)
        if isinstance(g, logic.Not):
            return not ev(g.sub, i)
        if isinstance(g, logic.And):
            return ev(g.left, i) and ev(g.right, i)
        if isinstance(g, logic.Or):
            return ev(g.left, i) or ev(g.right, i)
        if isinstance(g, logic.Next):
            if i < lam:
                return ev(g.sub, i + 1)
            if run.loop_back is None:
                return False
            return ev(g.sub, run.loop_back)
        if isinstance(g, logic.Finally):
            start = i if run.loop_back is None else min(run.loop_back, i)
            return any(ev(g.sub, j) for j in range(start, lam + 1))
        if isinstance(g, logic.Globally):
            if run.loop_back is None:
                if opts.g_noloop == G_NOLOOP_FALSE:
                    return False
                return all(ev(g.sub, j) for j in range(i, lam + 1))
            start = min(run.loop_back, i)
            return all(ev(g.sub, j) for j in range(start, lam + 1))
        if isinstance(g, logic.Until):
            if any(
                ev(g.right, j) and all(ev(g.left, n) for n in range(i, j))
                for j in range(i, lam + 1)
            ):
                return True
            if run.loop_back is None:
                return False
            l = run.loop_back
            return any(
                ev(g.right, j)
                and all(ev(g.left, n) for n in range(i, lam + 1))
                and all(ev(g.left, n) for n in range(l, j))
                for j in range(l, i)
            )
        if isinstance(g, logic.Release):
            # a R b == G b or b U (a and b), G read per mode
            if ev(logic.Globally(g.right), i):
                return True
            return ev(logic.Until(g.right, logic.And(g.left, g.right)), i)
        raise TypeError(f"not a formula node: {g!r}")

    return ev(f, i)


def oracle_check(
    net: PetriNet,
    prop: logic.Formula | logic.ParsedProperty,
    cfg: SearchConfig,
    budget: int = DEFAULT_BUDGET,
) -> BmcVerdict:
    """Same schedule, modes and options as the SMT engine, decided by
    enumeration."""
    formula = prop.formula if isinstance(prop, logic.ParsedProperty) else prop
    _validate_atoms(net, formula)
    psi = logic.to_nnf(logic.negate(formula) if cfg.mode == REFUTE else formula)
    stats: list[MicroStepStat] = []
    for lam, kappa in schedule(cfg.k_max):
        for run in enumerate_runs(net, lam, kappa, budget):
            if eval_bounded(net, psi, run, 0, cfg.options):
                stats.append(MicroStepStat(lam, kappa, "sat", 0.0))
                run.validate(net)
                return BmcVerdict(
                    kind="sat",
                    k_max=cfg.k_max,
                    lam=lam,
                    kappa=kappa,
                    trace=run,
                    stats=tuple(stats),
                )
        stats.append(MicroStepStat(lam, kappa, "unsat", 0.0))
    return BmcVerdict(kind="unsat_up_to", k_max=cfg.k_max, stats=tuple(stats))


def reachable_markings(
    net: PetriNet, depth: int, kappa: int | None = None, budget: int = DEFAULT_BUDGET
) -> set[Marking]:
    """All markings reachable in at most `depth` steps, optionally pruned
    by a per-place token cap."""
    seen = {net.initial_marking}
    frontier = deque([(net.initial_marking, 0)])
    while frontier:
        m, d = frontier.popleft()
        if d == depth:
            continue
        for t in net.transitions:
            if t not in enabled(net, m):
                continue
            nxt = fire(net, m, t)
            if kappa is not None and any(n > kappa for n in nxt):
                continue
            if nxt not in seen:
                if len(seen) >= budget:
                    raise BudgetExceededError(
                        f"more than {budget} reachable markings"
                    )
                seen.add(nxt)
                frontier.append((nxt, d + 1))
    return seen
