"""Place/transition nets, markings, and concrete firing semantics.

A marking is a plain tuple of token counts, index-aligned with
``PetriNet.places``.  All values here are immutable after construction and
safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import NetError

Marking = tuple[int, ...]


@dataclass(frozen=True)
class PetriNet:
    """A weighted P/T net with an initial marking.

    ``arcs`` maps (place, transition) and (transition, place) pairs to a
    positive integer weight; at most one arc per ordered pair (duplicate
    arcs in input files are summed on ingest).
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    arcs: dict[tuple[str, str], int]
    initial_marking: Marking

    def __post_init__(self):
        place_set = set(self.places)
        trans_set = set(self.transitions)
        if len(place_set) != len(self.places):
            raise NetError("duplicate place names")
        if len(trans_set) != len(self.transitions):
            raise NetError("duplicate transition names")
        overlap = place_set & trans_set
        if overlap:
            raise NetError(f"names used as both place and transition: {sorted(overlap)}")
        for (src, dst), weight in self.arcs.items():
            if weight < 1:
                raise NetError(f"arc {src} -> {dst} has weight {weight}, must be >= 1")
            if src in place_set and dst in trans_set:
                continue
            if src in trans_set and dst in place_set:
                continue
            raise NetError(f"arc {src} -> {dst} must connect a place and a transition")
        if len(self.initial_marking) != len(self.places):
            raise NetError(
                f"initial marking has {len(self.initial_marking)} entries "
                f"for {len(self.places)} places"
            )
        if any(n < 0 for n in self.initial_marking):
            raise NetError("initial marking has a negative entry")

    @cached_property
    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def pre(self) -> dict[str, tuple[tuple[str, int], ...]]:
        """Per transition: its pre-places with weights, in place order."""
        out = {}
        for t in self.transitions:
            out[t] = tuple(
                (p, self.arcs[(p, t)]) for p in self.places if (p, t) in self.arcs
            )
        return out

    @cached_property
    def post(self) -> dict[str, tuple[tuple[str, int], ...]]:
        """Per transition: its post-places with weights, in place order."""
        out = {}
        for t in self.transitions:
            out[t] = tuple(
                (p, self.arcs[(t, p)]) for p in self.places if (t, p) in self.arcs
            )
        return out

    def effect(self, t: str) -> tuple[int, ...]:
        """Marking delta of firing `t`: W(t,p) - W(p,t) per place."""
        delta = [0] * len(self.places)
        for p, w in self.pre[t]:
            delta[self.place_index[p]] -= w
        for p, w in self.post[t]:
            delta[self.place_index[p]] += w
        return tuple(delta)

    def check_marking(self, m: Marking) -> None:
        if len(m) != len(self.places):
            raise NetError(
                f"marking has {len(m)} entries for {len(self.places)} places"
            )
        if any(n < 0 for n in m):
            raise NetError("marking has a negative entry")


@dataclass(frozen=True)
class FiringStep:
    """One step of a replayed run."""

    transition: str
    before: Marking
    after: Marking


def enabled(net: PetriNet, m: Marking) -> frozenset[str]:
    """Transitions enabled at `m`: every pre-place holds at least the arc
    weight.  Transitions with no pre-places are always enabled."""
    net.check_marking(m)
    idx = net.place_index
    return frozenset(
        t
        for t in net.transitions
        if all(m[idx[p]] >= w for p, w in net.pre[t])
    )


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """Fire `t` at `m`.  Raises NetError naming the deficient place if `t`
    is not enabled."""
    net.check_marking(m)
    if t not in net.pre:
        raise NetError(f"unknown transition {t!r}")
    idx = net.place_index
    for p, w in net.pre[t]:
        if m[idx[p]] < w:
            raise NetError(
                f"transition {t} not enabled: place {p} holds {m[idx[p]]} "
                f"tokens, needs {w}"
            )
    out = list(m)
    for p, w in net.pre[t]:
        out[idx[p]] -= w
    for p, w in net.post[t]:
        out[idx[p]] += w
    return tuple(out)


def replay(net: PetriNet, start: Marking, fired: list[str] | tuple[str, ...]) -> list[FiringStep]:
    """Replay a firing sequence from `start`, validating enabledness."""
    steps = []
    m = tuple(start)
    for t in fired:
        nxt = fire(net, m, t)
        steps.append(FiringStep(t, m, nxt))
        m = nxt
    return steps
