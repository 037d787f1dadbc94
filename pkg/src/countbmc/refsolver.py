"""A small SMT-LIB 2 solver for the difference-logic fragment of QF_LIA.

Bundled so the checker works out of the box on machines without z3/cvc5;
any SMT-LIB 2 solver can replace it via COUNTBMC_SOLVER.  It reads a
script from stdin (or a file argument), answers ``sat``/``unsat`` to
check-sat, and serves get-value requests from the model.

Engine: CDCL over the boolean skeleton (Tseitin, two watched literals,
first-UIP learning, phase saving) with a lazy theory check.  Every
arithmetic atom must normalize to a difference constraint x - y <= c
(one or both of x, y may be absent); integer equalities are split into
two inequalities up front, so the negation of every atom stays in the
fragment.  A complete assignment is checked by Bellman-Ford negative-cycle
detection over the implied constraint graph; the cycle's atoms become a
conflict clause.  Satisfying integer values are shortest-path potentials.
Scripts outside the fragment get ``unknown``.

The solver knows nothing about nets or temporal logic; it is an
independent back end, not a shortcut around the encoder.
"""

from __future__ import annotations

import heapq
import sys


class Unsupported(Exception):
    pass


class SolverInputError(Exception):
    pass


# --- s-expressions ------------------------------------------------------------


def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SolverInputError("unterminated quoted symbol")
            yield text[i : j + 1]
            i = j + 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise SolverInputError("unterminated string literal")
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str):
    stack = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SolverInputError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverInputError("unbalanced '('")
    return stack[0]


# --- terms --------------------------------------------------------------------
# Linear integer terms are dicts {var: coeff} plus a constant.


def _lin_add(a, b, sign=1):
    coeffs = dict(a[0])
    for v, c in b[0].items():
        coeffs[v] = coeffs.get(v, 0) + sign * c
        if coeffs[v] == 0:
            del coeffs[v]
    return coeffs, a[1] + sign * b[1]


class Problem:
    """Declared symbols, asserted terms, and the compiled CNF."""

    def __init__(self):
        self.sorts: dict[str, str] = {}
        self.asserts: list = []
        # SAT variable space: var 1 is reserved as constant true.
        self.nvars = 1
        self.clauses: list[list[int]] = [[1]]
        self.bool_var: dict[str, int] = {}
        self.atom_var: dict[tuple, int] = {}  # (x, y, c): x - y <= c
        self.atoms: list = [None, None]  # per sat var; None for non-atoms
        self.int_vars: list[str] = []

    # -- declarations and assertions

    def declare(self, name: str, sort: str):
        if name in self.sorts:
            raise SolverInputError(f"redeclared symbol {name}")
        if sort not in ("Int", "Bool"):
            raise Unsupported(f"sort {sort}")
        self.sorts[name] = sort
        if sort == "Int":
            self.int_vars.append(name)

    def _new_var(self, atom=None) -> int:
        self.nvars += 1
        self.atoms.append(atom)
        return self.nvars

    def _bool_lit(self, name: str) -> int:
        if name not in self.bool_var:
            self.bool_var[name] = self._new_var()
        return self.bool_var[name]

    def _atom_lit(self, x, y, c) -> int:
        key = (x, y, c)
        if key not in self.atom_var:
            self.atom_var[key] = self._new_var(atom=key)
        return self.atom_var[key]

    def lin(self, t):
        """Compile an integer term to ({var: coeff}, const)."""
        if isinstance(t, str):
            if t.lstrip("-").isdigit():
                return {}, int(t)
            if self.sorts.get(t) == "Int":
                return {t: 1}, 0
            raise Unsupported(f"integer term {t}")
        if not t:
            raise Unsupported("empty term")
        head = t[0]
        if head == "-" and len(t) == 2:
            coeffs, k = self.lin(t[1])
            return {v: -c for v, c in coeffs.items()}, -k
        if head == "-":
            acc = self.lin(t[1])
            for arg in t[2:]:
                acc = _lin_add(acc, self.lin(arg), sign=-1)
            return acc
        if head == "+":
            acc = {}, 0
            for arg in t[1:]:
                acc = _lin_add(acc, self.lin(arg))
            return acc
        if head == "*":
            parts = [self.lin(arg) for arg in t[1:]]
            consts = [p for p in parts if not p[0]]
            lins = [p for p in parts if p[0]]
            if len(lins) > 1:
                raise Unsupported("nonlinear term")
            scale = 1
            for _, k in consts:
                scale *= k
            if not lins:
                return {}, scale
            coeffs, k = lins[0]
            return {v: c * scale for v, c in coeffs.items()}, k * scale
        raise Unsupported(f"integer operator {head}")

    def _cmp_lit(self, op: str, lhs, rhs) -> int:
        """Literal for <lhs> <op> <rhs>; positive atoms are 'diff <= c'."""
        coeffs, k = _lin_add(self.lin(lhs), self.lin(rhs), sign=-1)
        # Sum(coeffs) + k <op> 0
        if op in (">", ">="):
            coeffs = {v: -c for v, c in coeffs.items()}
            k = -k
            op = "<" if op == ">" else "<="
        bound = -k if op == "<=" else -k - 1
        items = sorted(coeffs.items())
        if not items:
            return 1 if 0 <= bound else -1
        if len(items) == 1:
            (v, c), = items
            if c == 1:
                return self._atom_lit(v, None, bound)
            if c == -1:
                return self._atom_lit(None, v, bound)
        elif len(items) == 2:
            (v1, c1), (v2, c2) = items
            if c1 == 1 and c2 == -1:
                return self._atom_lit(v1, v2, bound)
            if c1 == -1 and c2 == 1:
                return self._atom_lit(v2, v1, bound)
        raise Unsupported("constraint is not a difference of two variables")

    def compile_bool(self, t) -> int:
        """Tseitin-compile a boolean term, returning its literal."""
        if isinstance(t, str):
            if t == "true":
                return 1
            if t == "false":
                return -1
            if self.sorts.get(t) == "Bool":
                return self._bool_lit(t)
            raise Unsupported(f"boolean term {t}")
        if not t:
            raise Unsupported("empty term")
        head = t[0]
        if head == "not":
            return -self.compile_bool(t[1])
        if head in ("and", "or"):
            lits = [self.compile_bool(x) for x in t[1:]]
            gate = self._new_var()
            if head == "and":
                for lit in lits:
                    self.clauses.append([-gate, lit])
                self.clauses.append([gate] + [-lit for lit in lits])
            else:
                for lit in lits:
                    self.clauses.append([-lit, gate])
                self.clauses.append([-gate] + lits)
            return gate
        if head == "=>":
            lits = [self.compile_bool(x) for x in t[1:]]
            # right-associative chain: a => b => c == a => (b => c)
            acc = lits[-1]
            for lit in reversed(lits[:-1]):
                gate = self._new_var()
                self.clauses.append([-gate, -lit, acc])
                self.clauses.append([lit, gate])
                self.clauses.append([-acc, gate])
                acc = gate
            return acc
        if head in ("<", "<=", ">", ">="):
            if len(t) != 3:
                raise Unsupported("chained comparison")
            return self._cmp_lit(head, t[1], t[2])
        if head == "=":
            if len(t) != 3:
                raise Unsupported("n-ary equality")
            if self._is_bool(t[1]) and self._is_bool(t[2]):
                a, b = self.compile_bool(t[1]), self.compile_bool(t[2])
                gate = self._new_var()
                self.clauses.append([-gate, -a, b])
                self.clauses.append([-gate, a, -b])
                self.clauses.append([gate, a, b])
                self.clauses.append([gate, -a, -b])
                return gate
            le = self._cmp_lit("<=", t[1], t[2])
            ge = self._cmp_lit(">=", t[1], t[2])
            gate = self._new_var()
            self.clauses.append([-gate, le])
            self.clauses.append([-gate, ge])
            self.clauses.append([gate, -le, -ge])
            return gate
        raise Unsupported(f"boolean operator {head}")

    def _is_bool(self, t) -> bool:
        if isinstance(t, str):
            return t in ("true", "false") or self.sorts.get(t) == "Bool"
        return t[0] in ("not", "and", "or", "=>", "<", "<=", ">", ">=", "=")

    def add_assert(self, t):
        self.asserts.append(t)
        self.clauses.append([self.compile_bool(t)])

    # -- model evaluation (self-check of sat answers)

    def eval_term(self, t, model):
        if isinstance(t, str):
            if t == "true":
                return True
            if t == "false":
                return False
            if t.lstrip("-").isdigit():
                return int(t)
            return model[t]
        head = t[0]
        args = [self.eval_term(x, model) for x in t[1:]]
        if head == "not":
            return not args[0]
        if head == "and":
            return all(args)
        if head == "or":
            return any(args)
        if head == "=>":
            acc = args[-1]
            for a in reversed(args[:-1]):
                acc = (not a) or acc
            return acc
        if head == "+":
            return sum(args)
        if head == "-":
            return -args[0] if len(args) == 1 else args[0] - sum(args[1:])
        if head == "*":
            out = 1
            for a in args:
                out *= a
            return out
        if head == "<":
            return args[0] < args[1]
        if head == "<=":
            return args[0] <= args[1]
        if head == ">":
            return args[0] > args[1]
        if head == ">=":
            return args[0] >= args[1]
        if head == "=":
            return args[0] == args[1]
        raise Unsupported(f"operator {head}")


# --- CDCL(T) ------------------------------------------------------------------


class Solver:
    THEORY_CHECK_STRIDE = 24  # new atom assignments between partial checks

    def __init__(self, problem: Problem):
        self.pb = problem
        n = problem.nvars
        self.value = [0] * (n + 1)  # 0 unassigned, 1 true, -1 false
        self.level = [0] * (n + 1)
        self.reason: list[list[int] | None] = [None] * (n + 1)
        self.phase = [False] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.bump = 1.0
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.watches: dict[int, list[list[int]]] = {}
        self.clauses: list[list[int]] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(2, n + 1)]
        self.atoms_assigned = 0
        self.theory_mark = 0
        for c in problem.clauses:
            if not self._attach(list(c)):
                self.unsat_at_ingest = True
                return
        self.unsat_at_ingest = False

    # watch helpers -----------------------------------------------------

    def _attach(self, c: list[int]) -> bool:
        """Add a clause; returns False if it makes the instance trivially unsat."""
        c = sorted(set(c), key=abs)
        if any(-lit in c for lit in c):
            return True  # tautology
        if len(c) == 0:
            return False
        if len(c) == 1:
            return self._assert_unit(c[0])
        self.clauses.append(c)
        for lit in c[:2]:
            self.watches.setdefault(-lit, []).append(c)
        return True

    def _assert_unit(self, lit: int) -> bool:
        v = abs(lit)
        if self.value[v] == 0:
            self._assign(lit, None)
            return True
        return self.value[v] == (1 if lit > 0 else -1)

    def _assign(self, lit: int, reason: list[int] | None):
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.phase[v] = lit > 0
        self.trail.append(lit)
        if self.pb.atoms[v] is not None:
            self.atoms_assigned += 1

    def _lit_true(self, lit: int) -> bool:
        return self.value[abs(lit)] == (1 if lit > 0 else -1)

    def _lit_false(self, lit: int) -> bool:
        return self.value[abs(lit)] == (-1 if lit > 0 else 1)

    def propagate(self) -> list[int] | None:
        """Unit propagation; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            watchers = self.watches.get(lit, [])
            i = 0
            while i < len(watchers):
                c = watchers[i]
                # make sure c[0] is the other watch
                if c[0] == -lit:
                    c[0], c[1] = c[1], c[0]
                if self._lit_true(c[0]):
                    i += 1
                    continue
                moved = False
                for j in range(2, len(c)):
                    if not self._lit_false(c[j]):
                        c[1], c[j] = c[j], c[1]
                        self.watches.setdefault(-c[1], []).append(c)
                        watchers[i] = watchers[-1]
                        watchers.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self.value[abs(c[0])] == 0:
                    self._assign(c[0], c)
                    i += 1
                else:
                    return c  # conflict: c[0] false, no replacement watch
        return None

    # conflict analysis --------------------------------------------------

    def _bump_var(self, v: int):
        self.activity[v] += self.bump
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.bump *= 1e-100

    def analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        cur_level = len(self.lim)
        learnt: list[int] = []
        seen = [False] * (self.pb.nvars + 1)
        counter = 0
        lits = list(conflict)
        idx = len(self.trail) - 1
        uip = 0
        while True:
            for q in lits:
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump_var(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            uip = self.trail[idx]
            seen[abs(uip)] = False
            idx -= 1
            counter -= 1
            if counter <= 0:
                break
            lits = [q for q in self.reason[abs(uip)] if q != uip]
        learnt.append(-uip)
        self.bump *= 1.05
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[:-1])
        return learnt, back

    def backtrack(self, target_level: int):
        while len(self.lim) > target_level:
            mark = self.lim.pop()
            for lit in self.trail[mark:]:
                v = abs(lit)
                self.value[v] = 0
                self.reason[v] = None
                if self.pb.atoms[v] is not None:
                    self.atoms_assigned -= 1
                heapq.heappush(self.heap, (-self.activity[v], v))
            del self.trail[mark:]
        self.qhead = min(self.qhead, len(self.trail))
        self.theory_mark = min(self.theory_mark, self.atoms_assigned)

    def _learn(self, learnt: list[int], back: int) -> bool:
        """Backjump and install a learnt clause; False on level-0 conflict.

        `analyze` puts the asserting (first-UIP) literal last; after the
        backjump it is the single unassigned literal of the clause.
        """
        self.backtrack(back)
        asserting = learnt[-1]
        if len(learnt) == 1:
            return self._assert_unit(asserting)
        clause = [asserting] + learnt[:-1]
        # second watch: a literal from the backjump level
        best = max(range(1, len(clause)), key=lambda k: self.level[abs(clause[k])])
        clause[1], clause[best] = clause[best], clause[1]
        self.clauses.append(clause)
        self.watches.setdefault(-clause[0], []).append(clause)
        self.watches.setdefault(-clause[1], []).append(clause)
        self._assign(asserting, clause)
        return True

    # theory ---------------------------------------------------------------

    def theory_conflict(self) -> list[int] | None:
        """Bellman-Ford over the difference constraints of assigned atoms.

        Returns the atoms of a negative cycle as a (fully falsified)
        conflict clause, or None when the assignment is T-consistent.
        """
        edges = []  # (src, dst, weight, lit)
        for v in range(2, self.pb.nvars + 1):
            atom = self.pb.atoms[v]
            if atom is None or self.value[v] == 0:
                continue
            x, y, c = atom
            x = x if x is not None else "$zero"
            y = y if y is not None else "$zero"
            if self.value[v] > 0:
                edges.append((y, x, c, v))  # x - y <= c
            else:
                edges.append((x, y, -c - 1, -v))  # y - x <= -c - 1
        nodes = {"$zero"}
        for s, d, _, _ in edges:
            nodes.add(s)
            nodes.add(d)
        dist = {u: 0 for u in nodes}
        pred: dict[str, tuple] = {}
        start = None
        for _ in range(len(nodes)):
            changed = False
            for s, d, w, lit in edges:
                if dist[s] + w < dist[d]:
                    dist[d] = dist[s] + w
                    pred[d] = (s, lit)
                    changed = True
                    start = d
            if not changed:
                self._dist = dist
                return None
        # negative cycle: step back |nodes| times to land on it, then collect
        u = start
        for _ in range(len(nodes)):
            u = pred[u][0]
        cycle_lits = []
        v = u
        while True:
            s, lit = pred[v]
            cycle_lits.append(lit)
            v = s
            if v == u:
                break
        return [-lit for lit in cycle_lits]

    def int_model(self) -> dict[str, int]:
        dist = getattr(self, "_dist", {})
        zero = dist.get("$zero", 0)
        return {v: dist.get(v, zero) - zero for v in self.pb.int_vars}

    # main loop --------------------------------------------------------------

    def solve(self) -> str:
        if self.unsat_at_ingest:
            return "unsat"
        while True:
            conflict = self.propagate()
            if conflict is not None:
                if not self.lim:
                    return "unsat"
                learnt, back = self.analyze(conflict)
                if not self._learn(learnt, back):
                    return "unsat"
                continue
            full = len(self.trail) == self.pb.nvars
            # check the theory eagerly every few atom assignments, so a
            # doomed branch dies before the descent completes
            if full or self.atoms_assigned - self.theory_mark >= self.THEORY_CHECK_STRIDE:
                self.theory_mark = self.atoms_assigned
                t_clause = self.theory_conflict()
                if t_clause is not None:
                    levels = [self.level[abs(q)] for q in t_clause]
                    if not levels or max(levels) == 0:
                        return "unsat"
                    # the clause may be falsified below the current level;
                    # analyze needs a literal at the conflicting level itself
                    self.backtrack(max(levels))
                    learnt, back = self.analyze(t_clause)
                    if not self._learn(learnt, back):
                        return "unsat"
                    continue
                if full:
                    return "sat"
            while True:
                _, best = heapq.heappop(self.heap)
                if self.value[best] == 0:
                    break
            self.lim.append(len(self.trail))
            self._assign(best if self.phase[best] else -best, None)

    def model(self) -> dict:
        out: dict[str, int | bool] = dict(self.int_model())
        for name, v in self.pb.bool_var.items():
            out[name] = self.value[v] > 0
        for name, sort in self.pb.sorts.items():
            if name not in out:
                out[name] = 0 if sort == "Int" else False
        return out


# --- session ------------------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v < 0:
        return f"(- {-v})"
    return str(v)


def run_script(text: str, out) -> int:
    pb = Problem()
    model: dict | None = None
    answered = False
    tainted: str | None = None
    try:
        commands = parse_sexprs(text)
    except SolverInputError as e:
        print(f"(error \"{e}\")", file=out)
        return 1
    for cmd in commands:
        if not isinstance(cmd, list) or not cmd:
            print('(error "stray token at top level")', file=out)
            return 1
        head = cmd[0]
        try:
            if head in ("set-option", "set-info", "set-logic", "push", "pop"):
                continue
            if head == "declare-const":
                pb.declare(cmd[1], cmd[2])
            elif head == "declare-fun":
                if cmd[2] != []:
                    raise Unsupported("declare-fun with arguments")
                pb.declare(cmd[1], cmd[3])
            elif head == "assert":
                pb.add_assert(cmd[1])
            elif head == "check-sat":
                if tainted:
                    print("unknown", file=out)
                    print(f"; unsupported: {tainted}", file=sys.stderr)
                    answered = True
                    continue
                solver = Solver(pb)
                result = solver.solve()
                if result == "sat":
                    model = solver.model()
                    for t in pb.asserts:
                        if pb.eval_term(t, model) is not True:
                            print("unknown", file=out)
                            print(
                                "; internal error: model failed self-check",
                                file=sys.stderr,
                            )
                            model = None
                            break
                    else:
                        print("sat", file=out)
                else:
                    print("unsat", file=out)
                answered = True
            elif head == "get-value":
                if model is None:
                    print('(error "model is not available")', file=out)
                    continue
                pairs = " ".join(
                    f"({name} {_format_value(model[name])})" for name in cmd[1]
                )
                print(f"({pairs})", file=out)
            elif head == "get-model":
                if model is None:
                    print('(error "model is not available")', file=out)
                    continue
                print("(model )", file=out)
            elif head == "exit":
                break
            else:
                raise Unsupported(f"command {head}")
        except Unsupported as e:
            tainted = str(e)
        except (IndexError, KeyError, TypeError) as e:
            print(f'(error "malformed command {head}: {e}")', file=out)
            return 1
    if not answered and tainted:
        print(f"; unsupported: {tainted}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if args:
        with open(args[0], "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    return run_script(text, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
