"""The two-dimensional search space: micro-step schedule, traces, verdicts.

The total bound k = lam + kappa grows one macro-step at a time; within a
macro-step the micro-steps walk lam up from 0 (so kappa falls from k to 0,
i.e. client count first, then run length).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SoundnessError
from .net import Marking, PetriNet, fire
from .smt import EncodeOptions
from .solver import SolverConfig

WITNESS = "witness"
REFUTE = "refute"


def schedule(k_max: int) -> list[tuple[int, int]]:
    """All (lam, kappa) pairs with lam + kappa <= k_max, in search order.

    k ascends; within each k, lam ascends (kappa descends), e.g. for
    k_max=2: (0,0), (0,1), (1,0), (0,2), (1,1), (2,0).
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return [(lam, k - lam) for k in range(k_max + 1) for lam in range(k + 1)]


@dataclass(frozen=True)
class SearchConfig:
    k_max: int
    mode: str = WITNESS
    options: EncodeOptions = field(default_factory=EncodeOptions)
    solver: SolverConfig | None = None  # None: decided by the caller
    jobs: int = 1

    def __post_init__(self):
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")
        if self.mode not in (WITNESS, REFUTE):
            raise ValueError(f"bad mode {self.mode!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class Trace:
    """A replayable bounded run: markings s_0..s_lam, the transition fired
    at each instant, and optionally a one-step back-loop from s_lam."""

    kappa: int
    markings: tuple[Marking, ...]
    fired: tuple[str, ...]
    loop_back: int | None = None
    loop_transition: str | None = None

    @property
    def lam(self) -> int:
        return len(self.markings) - 1

    def validate(self, net: PetriNet) -> None:
        """Replay under the net semantics; raise SoundnessError on any lie."""
        if len(self.fired) != len(self.markings) - 1:
            raise SoundnessError("trace has mismatched markings/fired lengths")
        if self.markings[0] != net.initial_marking:
            raise SoundnessError("trace does not start at the initial marking")
        for m in self.markings:
            if any(n > self.kappa for n in m):
                raise SoundnessError(f"marking {m} exceeds token cap {self.kappa}")
        for i, t in enumerate(self.fired):
            if fire(net, self.markings[i], t) != self.markings[i + 1]:
                raise SoundnessError(
                    f"firing {t} at step {i} does not reproduce step {i + 1}"
                )
        if (self.loop_back is None) != (self.loop_transition is None):
            raise SoundnessError("loop target and loop transition must come together")
        if self.loop_back is not None:
            if not 0 <= self.loop_back <= self.lam:
                raise SoundnessError(f"loop target {self.loop_back} out of range")
            if fire(net, self.markings[-1], self.loop_transition) != self.markings[self.loop_back]:
                raise SoundnessError(
                    f"loop transition {self.loop_transition} does not reach "
                    f"state {self.loop_back}"
                )


@dataclass(frozen=True)
class MicroStepStat:
    lam: int
    kappa: int
    status: str
    millis: float


@dataclass(frozen=True)
class BmcVerdict:
    """Outcome of a 2D search.

    kind "sat" carries the (lam, kappa) micro-step and a validated trace;
    "unsat_up_to" means every micro-step with lam+kappa <= k_max was
    unsatisfiable; "inconclusive" reports the first micro-step the solver
    could not decide (remaining steps are skipped, soundness first).
    """

    kind: str  # sat | unsat_up_to | inconclusive
    k_max: int
    lam: int | None = None
    kappa: int | None = None
    trace: Trace | None = None
    detail: str = ""
    stats: tuple[MicroStepStat, ...] = ()

    @property
    def k(self) -> int | None:
        if self.lam is None:
            return None
        return self.lam + self.kappa
