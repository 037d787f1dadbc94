"""The SMT-backed search loop: assemble each micro-step, solve, decode.

The loop stops at the first satisfiable micro-step (returning a decoded,
replay-validated trace), exhausts the schedule for an unsat-up-to-bound
verdict, and halts at the first undecided solver call rather than skip it:
skipping would make the unsat claim unsound.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import logic, oracle, smt, solver
from .errors import SoundnessError
from .net import PetriNet, enabled, fire
from .search import (
    REFUTE,
    BmcVerdict,
    MicroStepStat,
    SearchConfig,
    Trace,
    schedule,
)


def decode_trace(
    answer: solver.SolverAnswer,
    net: PetriNet,
    psi: logic.Formula,
    lam: int,
    kappa: int,
    opts: smt.EncodeOptions,
) -> Trace:
    """Rebuild the run a sat model describes.

    Reads the place integers into markings and the unique true transition
    boolean per step into the firing sequence; a step with zero or two
    true transitions, or a replay mismatch, is an encoder/solver bug and
    raises SoundnessError.  If the property needs the back-loop to hold,
    the loop target is recovered by testing which loop condition the model
    satisfies and reading the loop-bank transition.
    """
    model = answer.model
    markings = tuple(
        tuple(model[smt.place_sym(p, i)] for p in net.places) for i in range(lam + 1)
    )
    fired = []
    for i in range(lam):
        hot = [t for t in net.transitions if model[smt.trans_sym(t, i)]]
        if len(hot) != 1:
            raise SoundnessError(
                f"one-hot violated at step {i}: transitions {hot or 'none'} fire"
            )
        fired.append(hot[0])
    base = Trace(kappa=kappa, markings=markings, fired=tuple(fired))
    base.validate(net)

    if oracle.eval_bounded(net, psi, base, 0, opts):
        return base
    loop_hot = [t for t in net.transitions if model.get(smt.loop_sym(t))]
    if len(loop_hot) == 1:
        t = loop_hot[0]
        for l, target in enumerate(markings):
            if (
                t in enabled(net, markings[-1])
                and fire(net, markings[-1], t) == target
            ):
                lasso = Trace(
                    kappa=kappa,
                    markings=markings,
                    fired=tuple(fired),
                    loop_back=l,
                    loop_transition=t,
                )
                if oracle.eval_bounded(net, psi, lasso, 0, opts):
                    lasso.validate(net)
                    return lasso
    raise SoundnessError(
        "sat model satisfies neither the loop-free nor any back-loop reading "
        "of the property"
    )


def check(
    net: PetriNet,
    prop: logic.Formula | logic.ParsedProperty,
    cfg: SearchConfig,
    emit_dir: str | Path | None = None,
) -> BmcVerdict:
    """Run the 2D search for a witness (mode=witness checks the property
    itself; mode=refute checks its negation, so sat means counterexample)."""
    formula = prop.formula if isinstance(prop, logic.ParsedProperty) else prop
    smt._validate_atoms(net, formula)
    psi = logic.to_nnf(
        logic.negate(formula) if cfg.mode == REFUTE else formula
    )
    solver_cfg = cfg.solver or solver.default_solver_config()
    steps = schedule(cfg.k_max)

    emit_path = Path(emit_dir) if emit_dir is not None else None
    if emit_path is not None:
        emit_path.mkdir(parents=True, exist_ok=True)

    def run_step(seq_lam_kappa):
        seq, (lam, kappa) = seq_lam_kappa
        script = smt.assemble(net, psi, lam, kappa, cfg.options)
        if emit_path is not None:
            name = f"micro_{seq:03d}_lam{lam}_kap{kappa}.smt2"
            (emit_path / name).write_bytes(script.text.encode("utf-8"))
        started = time.perf_counter()
        answer = solver.solve(script, solver_cfg)
        millis = (time.perf_counter() - started) * 1000.0
        return lam, kappa, answer, millis

    stats: list[MicroStepStat] = []

    def fold(lam, kappa, answer, millis) -> BmcVerdict | None:
        stats.append(MicroStepStat(lam, kappa, answer.status, millis))
        if answer.status == solver.SAT:
            trace = decode_trace(answer, net, psi, lam, kappa, cfg.options)
            return BmcVerdict(
                kind="sat",
                k_max=cfg.k_max,
                lam=lam,
                kappa=kappa,
                trace=trace,
                stats=tuple(stats),
            )
        if answer.status != solver.UNSAT:
            return BmcVerdict(
                kind="inconclusive",
                k_max=cfg.k_max,
                lam=lam,
                kappa=kappa,
                detail=f"solver reported {answer.status}\n{answer.transcript}".strip(),
                stats=tuple(stats),
            )
        return None

    indexed = list(enumerate(steps))
    if cfg.jobs <= 1:
        for item in indexed:
            verdict = fold(*run_step(item))
            if verdict is not None:
                return verdict
    else:
        # Solve micro-steps of one macro-step concurrently, then fold the
        # results in schedule order so the verdict matches sequential runs.
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            by_k: dict[int, list] = {}
            for item in indexed:
                by_k.setdefault(sum(item[1]), []).append(item)
            for k in sorted(by_k):
                for result in pool.map(run_step, by_k[k]):
                    verdict = fold(*result)
                    if verdict is not None:
                        return verdict
    return BmcVerdict(kind="unsat_up_to", k_max=cfg.k_max, stats=tuple(stats))
