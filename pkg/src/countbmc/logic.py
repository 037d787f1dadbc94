"""The counting temporal language: grammar, AST, negation, NNF.

Formulas mix transition propositions (an identifier holds at instant i iff
that transition fires between states i and i+1) with client sentences that
count tokens in places:

    (#x > 2) p0(x)          strictly more than 2 tokens in p0
    (#x <= 1) p2(x)         at most 1 token in p2
    (#x) p1(x) > p0(x)      p1 holds more tokens than p0
    (#x) p2(x) <= p1(x) <= p0(x)   chain, sugar for the pairwise conjunction

Operator precedence, loosest to tightest: U (right-associative), |, &,
then the unary operators X F G !.  X, F, G and U are reserved words.
The Release node is internal only (produced by `to_nnf` for negated
Untils); the surface grammar does not expose it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError


class Formula:
    """Base class for formula AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class NegProp(Formula):
    """Negated transition proposition; only introduced by `to_nnf`."""

    name: str


@dataclass(frozen=True)
class CountGt(Formula):
    place: str
    bound: int


@dataclass(frozen=True)
class CountLe(Formula):
    place: str
    bound: int


@dataclass(frozen=True)
class CmpGt(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class CmpLe(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True)
class Finally(Formula):
    sub: Formula


@dataclass(frozen=True)
class Globally(Formula):
    sub: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    """Internal dual of Until; not part of the surface syntax."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class ParsedProperty:
    text: str
    formula: Formula
    atoms: frozenset[str]


# --- parsing ---------------------------------------------------------------

_KEYWORDS = {"X", "F", "G", "U"}

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<le><=)
      | (?P<gt>>)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<hash>\#)
      | (?P<amp>&)
      | (?P<pipe>\|)
      | (?P<bang>!)
      | (?P<nat>[0-9]+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    )""",
    re.VERBOSE,
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                col = len(text) - len(stripped) + 1
                raise ParseError(
                    f"unexpected character {stripped[0]!r}", f"column {col}"
                )
            kind = m.lastgroup
            value = m.group(kind)
            start = m.start(kind) + 1
            if kind == "ident" and value in _KEYWORDS:
                kind = value  # X / F / G / U become operator tokens
            self.items.append((kind, value, start))
            pos = m.end()
        self.items.append(("eof", "", len(text) + 1))
        self.pos = 0

    def peek(self, ahead: int = 0) -> tuple[str, str, int]:
        return self.items[min(self.pos + ahead, len(self.items) - 1)]

    def next(self) -> tuple[str, str, int]:
        tok = self.items[self.pos]
        if self.pos < len(self.items) - 1:
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            found = repr(tok[1]) if tok[1] else "end of input"
            raise ParseError(
                f"expected {what or kind}, found {found}", f"column {tok[2]}"
            )
        return self.next()


def parse_lc(text: str) -> ParsedProperty:
    """Parse a property.  Raises ParseError with a column position."""
    toks = _Tokens(text)
    formula = _parse_until(toks)
    trailing = toks.peek()
    if trailing[0] != "eof":
        raise ParseError(
            f"unexpected trailing input {trailing[1]!r}", f"column {trailing[2]}"
        )
    return ParsedProperty(text=text, formula=formula, atoms=frozenset(_atom_names(formula)))


def _parse_until(toks: _Tokens) -> Formula:
    left = _parse_or(toks)
    if toks.peek()[0] == "U":
        toks.next()
        return Until(left, _parse_until(toks))
    return left


def _parse_or(toks: _Tokens) -> Formula:
    left = _parse_and(toks)
    if toks.peek()[0] == "pipe":
        toks.next()
        return Or(left, _parse_or(toks))
    return left


def _parse_and(toks: _Tokens) -> Formula:
    left = _parse_unary(toks)
    if toks.peek()[0] == "amp":
        toks.next()
        return And(left, _parse_and(toks))
    return left


def _parse_unary(toks: _Tokens) -> Formula:
    kind = toks.peek()[0]
    if kind in ("X", "F", "G"):
        toks.next()
        sub = _parse_unary(toks)
        return {"X": Next, "F": Finally, "G": Globally}[kind](sub)
    if kind == "bang":
        toks.next()
        return Not(_parse_unary(toks))
    return _parse_primary(toks)


def _parse_primary(toks: _Tokens) -> Formula:
    kind, value, col = toks.peek()
    if kind == "lparen":
        if toks.peek(1)[0] == "hash":
            return _parse_client_sentence(toks)
        toks.next()
        inner = _parse_until(toks)
        toks.expect("rparen", "')'")
        return inner
    if kind == "ident":
        toks.next()
        return Prop(value)
    found = repr(value) if value else "end of input"
    raise ParseError(f"expected a formula, found {found}", f"column {col}")


def _parse_client_var(toks: _Tokens, expected: str | None) -> str:
    _, var, col = toks.expect("ident", "the client variable")
    if expected is not None and var != expected:
        raise ParseError(
            f"client variable {var!r} does not match {expected!r}", f"column {col}"
        )
    return var


def _parse_place_ref(toks: _Tokens, var: str) -> str:
    _, name, _ = toks.expect("ident", "a place name")
    toks.expect("lparen", "'('")
    _parse_client_var(toks, var)
    toks.expect("rparen", "')'")
    return name


def _parse_client_sentence(toks: _Tokens) -> Formula:
    toks.expect("lparen", "'('")
    toks.expect("hash", "'#'")
    var = _parse_client_var(toks, None)
    kind, _, col = toks.peek()
    if kind in ("gt", "le"):
        # counting sentence: (#x CMP NAT) place(x)
        toks.next()
        _, raw, _ = toks.expect("nat", "a natural number")
        toks.expect("rparen", "')'")
        place = _parse_place_ref(toks, var)
        return (CountGt if kind == "gt" else CountLe)(place, int(raw))
    if kind == "rparen":
        # comparing sentence: (#x) place(x) CMP place(x) [CMP place(x) ...]
        toks.next()
        names = [_parse_place_ref(toks, var)]
        direction = None
        while toks.peek()[0] in ("gt", "le"):
            kind, _, col = toks.next()
            if direction is None:
                direction = kind
            elif kind != direction:
                raise ParseError(
                    "comparison chain mixes directions", f"column {col}"
                )
            names.append(_parse_place_ref(toks, var))
        if direction is None:
            tok = toks.peek()
            raise ParseError(
                "comparing sentence needs at least one comparison",
                f"column {tok[2]}",
            )
        cls = CmpGt if direction == "gt" else CmpLe
        pairs = [cls(a, b) for a, b in zip(names, names[1:])]
        out = pairs[-1]
        for atom in reversed(pairs[:-1]):
            out = And(atom, out)
        return out
    raise ParseError(
        "expected '>', '<=' or ')' after the client variable", f"column {col}"
    )


def _atom_names(f: Formula):
    if isinstance(f, (Prop, NegProp)):
        yield f.name
    elif isinstance(f, (CountGt, CountLe)):
        yield f.place
    elif isinstance(f, (CmpGt, CmpLe)):
        yield f.left
        yield f.right
    elif isinstance(f, Not):
        yield from _atom_names(f.sub)
    elif isinstance(f, (Next, Finally, Globally)):
        yield from _atom_names(f.sub)
    elif isinstance(f, (And, Or, Until, Release)):
        yield from _atom_names(f.left)
        yield from _atom_names(f.right)


def referenced_names(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Names used as transition propositions and as counted places."""
    props: set[str] = set()
    places: set[str] = set()

    def walk(g: Formula):
        if isinstance(g, (Prop, NegProp)):
            props.add(g.name)
        elif isinstance(g, (CountGt, CountLe)):
            places.add(g.place)
        elif isinstance(g, (CmpGt, CmpLe)):
            places.update((g.left, g.right))
        elif isinstance(g, (Not, Next, Finally, Globally)):
            walk(g.sub)
        elif isinstance(g, (And, Or, Until, Release)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return frozenset(props), frozenset(places)


# --- negation and normal form ----------------------------------------------


def negate(f: Formula) -> Formula:
    """Wrap in Not; simplification is `to_nnf`'s job."""
    return Not(f)


_COMPLEMENT = {
    CountGt: lambda a: CountLe(a.place, a.bound),
    CountLe: lambda a: CountGt(a.place, a.bound),
    CmpGt: lambda a: CmpLe(a.left, a.right),
    CmpLe: lambda a: CmpGt(a.left, a.right),
}


def to_nnf(f: Formula) -> Formula:
    """Push negation to the leaves.

    The result contains no Not node: negation survives only as NegProp on
    transition propositions, and client atoms are replaced by their
    complements (the four atom kinds are closed under negation).
    """
    if isinstance(f, (Prop, NegProp, CountGt, CountLe, CmpGt, CmpLe)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.sub))
    if isinstance(f, Finally):
        return Finally(to_nnf(f.sub))
    if isinstance(f, Globally):
        return Globally(to_nnf(f.sub))
    if isinstance(f, Until):
        return Until(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Release):
        return Release(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Prop):
            return NegProp(g.name)
        if isinstance(g, NegProp):
            return Prop(g.name)
        if type(g) in _COMPLEMENT:
            return _COMPLEMENT[type(g)](g)
        if isinstance(g, Not):
            return to_nnf(g.sub)
        if isinstance(g, And):
            return Or(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Or):
            return And(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Next):
            return Next(to_nnf(Not(g.sub)))
        if isinstance(g, Finally):
            return Globally(to_nnf(Not(g.sub)))
        if isinstance(g, Globally):
            return Finally(to_nnf(Not(g.sub)))
        if isinstance(g, Until):
            return Release(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Release):
            return Until(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
    raise TypeError(f"not a formula node: {f!r}")


# --- pretty printing ---------------------------------------------------------

_LEVEL_UNTIL, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY, _LEVEL_ATOM = range(5)


def _level(f: Formula) -> int:
    if isinstance(f, (Until, Release)):
        return _LEVEL_UNTIL
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    if isinstance(f, (Not, Next, Finally, Globally, NegProp)):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def pretty(f: Formula) -> str:
    """Minimal-parenthesis rendering.

    A fixed point under parse: pretty(parse(pretty(parse(s)))) equals
    pretty(parse(s)).  Release renders as infix R for display but is not
    parseable back.
    """
    return _pp(f, _LEVEL_UNTIL)


def _pp(f: Formula, min_level: int) -> str:
    text = _pp_node(f)
    if _level(f) < min_level:
        return f"({text})"
    return text


def _pp_node(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return f"!{f.name}"
    if isinstance(f, CountGt):
        return f"(#x>{f.bound}){f.place}(x)"
    if isinstance(f, CountLe):
        return f"(#x<={f.bound}){f.place}(x)"
    if isinstance(f, CmpGt):
        return f"(#x){f.left}(x)>{f.right}(x)"
    if isinstance(f, CmpLe):
        return f"(#x){f.left}(x)<={f.right}(x)"
    if isinstance(f, Not):
        return f"!{_pp(f.sub, _LEVEL_UNARY)}"
    if isinstance(f, Next):
        return f"X {_pp(f.sub, _LEVEL_UNARY)}"
    if isinstance(f, Finally):
        return f"F {_pp(f.sub, _LEVEL_UNARY)}"
    if isinstance(f, Globally):
        return f"G {_pp(f.sub, _LEVEL_UNARY)}"
    if isinstance(f, And):
        return f"{_pp(f.left, _LEVEL_AND + 1)} & {_pp(f.right, _LEVEL_AND)}"
    if isinstance(f, Or):
        return f"{_pp(f.left, _LEVEL_OR + 1)} | {_pp(f.right, _LEVEL_OR)}"
    if isinstance(f, Until):
        return f"{_pp(f.left, _LEVEL_UNTIL + 1)} U {_pp(f.right, _LEVEL_UNTIL)}"
    if isinstance(f, Release):
        return f"{_pp(f.left, _LEVEL_UNTIL + 1)} R {_pp(f.right, _LEVEL_UNTIL)}"
    raise TypeError(f"not a formula node: {f!r}")
