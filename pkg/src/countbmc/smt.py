"""Compilation of the bounded net semantics and property translation to
deterministic SMT-LIB 2 (QF_LIA).

Step variables: one integer per place per instant i in [0, lam]
(symbol ``p_<name>_<i>``), one boolean per transition per instant i < lam
(``t_<name>_<i>``), plus one boolean bank ``t_<name>_loop`` used by the
back-loop conditions.  Names are sanitized to the SMT-LIB simple-symbol
alphabet with an injective ``~hh`` escape, so distinct net names can never
collide as solver symbols.

Place counts double as the client counters of counting/comparing atoms:
the number of clients satisfying a place property at instant i is exactly
the token count of that place at instant i.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

from . import logic
from .errors import NameResolutionError, SoundnessError
from .net import PetriNet

# --- tiny QF_LIA expression IR ----------------------------------------------

IntTerm = tuple  # (variable symbol or None, integer offset)


class BoolExpr:
    __slots__ = ()


@dataclass(frozen=True)
class BConst(BoolExpr):
    value: bool


TRUE = BConst(True)
FALSE = BConst(False)


@dataclass(frozen=True)
class BVar(BoolExpr):
    name: str


@dataclass(frozen=True)
class BNot(BoolExpr):
    sub: BoolExpr


@dataclass(frozen=True)
class BAnd(BoolExpr):
    items: tuple


@dataclass(frozen=True)
class BOr(BoolExpr):
    items: tuple


@dataclass(frozen=True)
class BImplies(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Cmp(BoolExpr):
    """left <op> right over linear terms of the form var + offset."""

    op: str  # one of <=, <, >, >=, =
    left: IntTerm
    right: IntTerm


def band(items) -> BoolExpr:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return BAnd(items)


def bor(items) -> BoolExpr:
    items = tuple(items)
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return BOr(items)


def _render_term(term: IntTerm) -> str:
    var, off = term
    if var is None:
        return str(off) if off >= 0 else f"(- {-off})"
    if off == 0:
        return var
    if off > 0:
        return f"(+ {var} {off})"
    return f"(- {var} {-off})"


def render(e: BoolExpr) -> str:
    if isinstance(e, BConst):
        return "true" if e.value else "false"
    if isinstance(e, BVar):
        return e.name
    if isinstance(e, BNot):
        return f"(not {render(e.sub)})"
    if isinstance(e, BAnd):
        return "(and " + " ".join(render(x) for x in e.items) + ")"
    if isinstance(e, BOr):
        return "(or " + " ".join(render(x) for x in e.items) + ")"
    if isinstance(e, BImplies):
        return f"(=> {render(e.left)} {render(e.right)})"
    if isinstance(e, Cmp):
        return f"({e.op} {_render_term(e.left)} {_render_term(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def eval_expr(e: BoolExpr, model: dict) -> bool:
    """Evaluate under a model mapping symbols to ints/bools."""
    if isinstance(e, BConst):
        return e.value
    if isinstance(e, BVar):
        return bool(model[e.name])
    if isinstance(e, BNot):
        return not eval_expr(e.sub, model)
    if isinstance(e, BAnd):
        return all(eval_expr(x, model) for x in e.items)
    if isinstance(e, BOr):
        return any(eval_expr(x, model) for x in e.items)
    if isinstance(e, BImplies):
        return (not eval_expr(e.left, model)) or eval_expr(e.right, model)
    if isinstance(e, Cmp):
        lhs = (model[e.left[0]] if e.left[0] is not None else 0) + e.left[1]
        rhs = (model[e.right[0]] if e.right[0] is not None else 0) + e.right[1]
        return {
            "<=": lhs <= rhs,
            "<": lhs < rhs,
            ">": lhs > rhs,
            ">=": lhs >= rhs,
            "=": lhs == rhs,
        }[e.op]
    raise TypeError(f"not an expression: {e!r}")


# --- symbols ------------------------------------------------------------------

_SAFE = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
)


def sanitize(name: str) -> str:
    """Injective mapping into the SMT-LIB simple-symbol alphabet.

    Characters outside [A-Za-z0-9] (including underscore, which this
    module reserves as its own separator) become ``~hh`` per UTF-8 byte.
    """
    out = []
    for ch in name:
        if ch in _SAFE:
            out.append(ch)
        else:
            out.extend(f"~{b:02x}" for b in ch.encode("utf-8"))
    return "".join(out)


def place_sym(name: str, step: int) -> str:
    return f"p_{sanitize(name)}_{step}"


def trans_sym(name: str, step: int) -> str:
    return f"t_{sanitize(name)}_{step}"


def loop_sym(name: str) -> str:
    return f"t_{sanitize(name)}_loop"


# --- options and script -------------------------------------------------------

G_NOLOOP_PREFIX = "prefix"
G_NOLOOP_FALSE = "false"
TRAILING_STRICT = "strict_false"
TRAILING_FREE = "unconstrained"


@dataclass(frozen=True)
class EncodeOptions:
    """Bounded-semantics switches.

    g_noloop: meaning of G on a loop-free run -- "prefix" holds iff the
    child holds at every remaining instant, "false" is the classical
    pessimistic reading.  trailing_transitions: a transition proposition at
    the final instant is "strict_false" (no firing is claimed past the
    horizon, sound) or "unconstrained" (a free boolean the solver may set).
    """

    g_noloop: str = G_NOLOOP_PREFIX
    trailing_transitions: str = TRAILING_STRICT

    def __post_init__(self):
        if self.g_noloop not in (G_NOLOOP_PREFIX, G_NOLOOP_FALSE):
            raise ValueError(f"bad g_noloop {self.g_noloop!r}")
        if self.trailing_transitions not in (TRAILING_STRICT, TRAILING_FREE):
            raise ValueError(
                f"bad trailing_transitions {self.trailing_transitions!r}"
            )


@dataclass(frozen=True)
class SmtScript:
    """A complete solver script plus the symbol table to read models back.

    `symbols` maps each tracked solver symbol to (kind, name, step) with
    kind in {"place", "transition", "loop"}; step is None for the loop
    bank.  Emission is canonical: declarations sorted by kind, name, step;
    assertions in construction order.  Equal inputs yield byte-identical
    text.
    """

    logic: str
    declarations: tuple  # ((symbol, sort), ...)
    assertions: tuple  # ((comment or None, BoolExpr), ...)
    tracked: tuple  # symbols listed in get-value order
    symbols: dict

    @property
    def text(self) -> str:
        lines = ["(set-option :produce-models true)", f"(set-logic {self.logic})"]
        for sym, sort in self.declarations:
            lines.append(f"(declare-const {sym} {sort})")
        for comment, expr in self.assertions:
            if comment:
                lines.append(f"; {comment}")
            lines.append(f"(assert {render(expr)})")
        lines.append("(check-sat)")
        for sym in self.tracked:
            lines.append(f"(get-value ({sym}))")
        lines.append("(exit)")
        return "\n".join(lines) + "\n"


# --- net unrolling --------------------------------------------------------------


def encode_kappa(net: PetriNet, step: int, kappa: int) -> list[BoolExpr]:
    """0 <= p@step <= kappa for every place, two inequalities per place."""
    out = []
    for p in net.places:
        sym = place_sym(p, step)
        out.append(Cmp(">=", (sym, 0), (None, 0)))
        out.append(Cmp("<=", (sym, 0), (None, kappa)))
    return out


def encode_init(net: PetriNet, kappa: int) -> list[BoolExpr]:
    """p@0 pinned to the initial marking, plus the step-0 token cap."""
    out = [
        Cmp("=", (place_sym(p, 0), 0), (None, net.initial_marking[i]))
        for i, p in enumerate(net.places)
    ]
    out.extend(encode_kappa(net, 0, kappa))
    return out


def _pre_expr(net: PetriNet, t: str, src) -> BoolExpr:
    return band(Cmp(">=", (src(p), 0), (None, w)) for p, w in net.pre[t])


def _post_expr(net: PetriNet, t: str, src, dst) -> BoolExpr:
    # Frame condition folded in: every place is asserted, untouched ones
    # with delta 0.
    delta = net.effect(t)
    return band(
        Cmp("=", (dst(p), 0), (src(p), delta[i])) for i, p in enumerate(net.places)
    )


def _relation_parts(net: PetriNet, src, dst, tvar) -> list[BoolExpr]:
    """T_enabled, T_firability, T_next between the src and dst state copies.

    T_next is the literal one-hot disjunction: per transition, its boolean
    true, every other boolean false, and its post-condition selected.
    """
    pres = {t: _pre_expr(net, t, src) for t in net.transitions}
    t_enabled = bor(pres[t] for t in net.transitions)
    t_firability = band(
        BImplies(BVar(tvar(t)), pres[t]) for t in net.transitions
    )
    disjuncts = []
    for t in net.transitions:
        lits = [BVar(tvar(t))]
        lits.extend(BNot(BVar(tvar(u))) for u in net.transitions if u != t)
        lits.append(_post_expr(net, t, src, dst))
        disjuncts.append(band(lits))
    t_next = bor(disjuncts)
    return [t_enabled, t_firability, t_next]


def encode_transition_relation(net: PetriNet, step: int) -> list[BoolExpr]:
    """T(s_step, s_step+1) as its three conjuncts."""
    return _relation_parts(
        net,
        src=lambda p: place_sym(p, step),
        dst=lambda p: place_sym(p, step + 1),
        tvar=lambda t: trans_sym(t, step),
    )


def encode_loop_condition(net: PetriNet, l: int, lam: int) -> BoolExpr:
    """One-step back-loop from state lam to state l, over the loop bank."""
    return band(
        _relation_parts(
            net,
            src=lambda p: place_sym(p, lam),
            dst=lambda p: place_sym(p, l),
            tvar=loop_sym,
        )
    )


# --- property translation ---------------------------------------------------


class _FreshBools:
    """Allocator for the free booleans of unconstrained trailing atoms."""

    def __init__(self):
        self.names: list[str] = []

    def new(self) -> str:
        name = f"u_{len(self.names)}"
        self.names.append(name)
        return name


def translate(
    f: logic.Formula,
    i: int,
    lam: int,
    loop: int | None,
    opts: EncodeOptions,
    fresh: _FreshBools | None = None,
) -> BoolExpr:
    """Bounded translation of an NNF formula asserted at instant i.

    With loop=None the run is read as a loop-free prefix; with loop=l the
    run lassos from state lam back to state l.  Temporal indices range over
    [0, lam]; the token cap constrains counts only, never time.
    """
    if fresh is None:
        fresh = _FreshBools()

    def free_literal() -> BoolExpr:
        return BVar(fresh.new())

    def tr(g: logic.Formula, i: int) -> BoolExpr:
        if isinstance(g, logic.Prop):
            if i < lam:
                return BVar(trans_sym(g.name, i))
            if opts.trailing_transitions == TRAILING_STRICT:
                return FALSE
            return free_literal()
        if isinstance(g, logic.NegProp):
            if i < lam:
                return BNot(BVar(trans_sym(g.name, i)))
            if opts.trailing_transitions == TRAILING_STRICT:
                return FALSE
            return free_literal()
        if isinstance(g, logic.CountGt):
            return Cmp(">", (place_sym(g.place, i), 0), (None, g.bound))
        if isinstance(g, logic.CountLe):
            return Cmp("<=", (place_sym(g.place, i), 0), (None, g.bound))
        if isinstance(g, logic.CmpGt):
            return Cmp(">", (place_sym(g.left, i), 0), (place_sym(g.right, i), 0))
        if isinstance(g, logic.CmpLe):
            return Cmp("<=", (place_sym(g.left, i), 0), (place_sym(g.right, i), 0))
        if isinstance(g, logic.And):
            return band([tr(g.left, i), tr(g.right, i)])
        if isinstance(g, logic.Or):
            return bor([tr(g.left, i), tr(g.right, i)])
        if isinstance(g, logic.Not):
            raise SoundnessError("negation reached the encoder; formula not in NNF")
        if isinstance(g, logic.Next):
            if i < lam:
                return tr(g.sub, i + 1)
            if loop is None:
                return FALSE
            return tr(g.sub, loop)
        if isinstance(g, logic.Finally):
            start = i if loop is None else min(loop, i)
            return bor(tr(g.sub, j) for j in range(start, lam + 1))
        if isinstance(g, logic.Globally):
            if loop is None:
                if opts.g_noloop == G_NOLOOP_FALSE:
                    return FALSE
                return band(tr(g.sub, j) for j in range(i, lam + 1))
            start = min(loop, i)
            return band(tr(g.sub, j) for j in range(start, lam + 1))
        if isinstance(g, logic.Until):
            ahead = [
                band([tr(g.right, j)] + [tr(g.left, n) for n in range(i, j)])
                for j in range(i, lam + 1)
            ]
            if loop is None:
                return bor(ahead)
            wrapped = [
                band(
                    [tr(g.right, j)]
                    + [tr(g.left, n) for n in range(i, lam + 1)]
                    + [tr(g.left, n) for n in range(loop, j)]
                )
                for j in range(loop, i)
            ]
            return bor(ahead + wrapped)
        if isinstance(g, logic.Release):
            # a R b == G b or b U (a and b), with G read per mode.
            forever = tr(logic.Globally(g.right), i)
            until_part = tr(
                logic.Until(g.right, logic.And(g.left, g.right)), i
            )
            return bor([forever, until_part])
        raise TypeError(f"not a formula node: {g!r}")

    return tr(f, i)


# --- full problem -----------------------------------------------------------

_KIND_RANK = {"place": 0, "transition": 1, "loop": 2, "free": 3}


def _validate_atoms(net: PetriNet, f: logic.Formula) -> None:
    props, places = logic.referenced_names(f)
    trans_set, place_set = set(net.transitions), set(net.places)
    for name in sorted(props - trans_set):
        candidates = difflib.get_close_matches(name, net.transitions, n=3)
        hint = f"; candidates: {', '.join(candidates)}" if candidates else ""
        raise NameResolutionError(
            f"{name!r} is not a transition of this net{hint}"
        )
    for name in sorted(places - place_set):
        candidates = difflib.get_close_matches(name, net.places, n=3)
        hint = f"; candidates: {', '.join(candidates)}" if candidates else ""
        raise NameResolutionError(f"{name!r} is not a place of this net{hint}")


def assemble(
    net: PetriNet,
    psi: logic.Formula,
    lam: int,
    kappa: int,
    opts: EncodeOptions = EncodeOptions(),
) -> SmtScript:
    """The complete micro-step problem for (lam, kappa).

    Conjoins the unrolled net (initial state, lam copies of the transition
    relation, token caps at every instant) with the case split over a
    loop-free run and each back-loop target l in [0, lam].
    """
    _validate_atoms(net, psi)

    assertions: list[tuple[str | None, BoolExpr]] = []
    first = True
    for expr in encode_init(net, kappa):
        assertions.append((f"initial marking, token cap {kappa}" if first else None, expr))
        first = False
    for i in range(lam):
        for label, expr in zip(
            (f"step {i} -> {i + 1}", None, None), encode_transition_relation(net, i)
        ):
            assertions.append((label, expr))
        first = True
        for expr in encode_kappa(net, i + 1, kappa):
            assertions.append((f"token cap at step {i + 1}" if first else None, expr))
            first = False

    loop_conds = [encode_loop_condition(net, l, lam) for l in range(lam + 1)]
    fresh = _FreshBools()
    psi_noloop = translate(psi, 0, lam, None, opts, fresh)
    psi_loops = [translate(psi, 0, lam, l, opts, fresh) for l in range(lam + 1)]

    cases = [band([BNot(bor(loop_conds)), psi_noloop])]
    cases.extend(band([loop_conds[l], psi_loops[l]]) for l in range(lam + 1))
    assertions.append(("property, split over no-loop and each back-loop", bor(cases)))

    symbols: dict[str, tuple] = {}
    decls: list[tuple[int, str, int, str, str]] = []
    for name in net.places:
        for step in range(lam + 1):
            sym = place_sym(name, step)
            symbols[sym] = ("place", name, step)
            decls.append((_KIND_RANK["place"], name, step, sym, "Int"))
    for name in net.transitions:
        for step in range(lam):
            sym = trans_sym(name, step)
            symbols[sym] = ("transition", name, step)
            decls.append((_KIND_RANK["transition"], name, step, sym, "Bool"))
    for name in net.transitions:
        sym = loop_sym(name)
        symbols[sym] = ("loop", name, None)
        decls.append((_KIND_RANK["loop"], name, 0, sym, "Bool"))
    for n, sym in enumerate(fresh.names):
        decls.append((_KIND_RANK["free"], sym, n, sym, "Bool"))
    decls.sort(key=lambda d: (d[0], d[1], d[2]))

    declarations = tuple((sym, sort) for _, _, _, sym, sort in decls)
    tracked = tuple(sym for _, _, _, sym, sort in decls if sym in symbols)
    return SmtScript(
        logic="QF_LIA",
        declarations=declarations,
        assertions=tuple(assertions),
        tracked=tracked,
        symbols=symbols,
    )
