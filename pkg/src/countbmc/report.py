"""Run reports: one structure, two renderings (human text and JSON).

The JSON layout is documented in docs/report-schema.md and is stable:
fields appear in a fixed order, so equal runs produce byte-equal output
(timing fields are the only nondeterministic values).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .net import PetriNet
from .search import BmcVerdict, MicroStepStat, Trace


def render_trace(trace: Trace, net: PetriNet) -> str:
    """One line per instant: marking vector plus the transition fired;
    a lasso's last line is annotated with its back-loop target."""
    lines = [f"kappa = {trace.kappa}"]
    for i, m in enumerate(trace.markings):
        vector = "(" + ", ".join(str(n) for n in m) + ")"
        if i < len(trace.fired):
            lines.append(f"step {i}  {vector}  fired {trace.fired[i]}")
        elif trace.loop_back is not None:
            lines.append(
                f"step {i}  {vector}  fired {trace.loop_transition} "
                f"-> loops to step {trace.loop_back}"
            )
        else:
            lines.append(f"step {i}  {vector}")
    return "\n".join(lines)


def verdict_line(verdict: BmcVerdict) -> str:
    if verdict.kind == "sat":
        return f"SAT at k={verdict.k} (lambda={verdict.lam}, kappa={verdict.kappa})"
    if verdict.kind == "unsat_up_to":
        return f"UNSAT up to k_max={verdict.k_max}"
    where = (
        f" at (lambda={verdict.lam}, kappa={verdict.kappa})"
        if verdict.lam is not None
        else ""
    )
    return f"inconclusive{where}"


@dataclass(frozen=True)
class RunReport:
    net_path: str
    net_id: str
    formula: str
    mode: str
    k_max: int
    engine: str  # "smt" | "oracle"
    g_noloop: str
    trailing: str
    solver: str | None
    verdict: BmcVerdict
    total_millis: float

    def to_dict(self) -> dict:
        v = self.verdict
        trace = None
        if v.trace is not None:
            trace = {
                "kappa": v.trace.kappa,
                "markings": [list(m) for m in v.trace.markings],
                "fired": list(v.trace.fired),
                "loop_back": v.trace.loop_back,
                "loop_transition": v.trace.loop_transition,
            }
        return {
            "net": self.net_path,
            "net_id": self.net_id,
            "formula": self.formula,
            "mode": self.mode,
            "k_max": self.k_max,
            "engine": self.engine,
            "options": {"g_noloop": self.g_noloop, "trailing": self.trailing},
            "solver": self.solver,
            "verdict": v.kind,
            "k": v.k,
            "lambda": v.lam,
            "kappa": v.kappa,
            "detail": v.detail,
            "trace": trace,
            "micro_steps": [
                {
                    "lambda": s.lam,
                    "kappa": s.kappa,
                    "status": s.status,
                    "millis": round(s.millis, 1),
                }
                for s in v.stats
            ],
            "total_millis": round(self.total_millis, 1),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        trace = None
        if d["trace"] is not None:
            t = d["trace"]
            trace = Trace(
                kappa=t["kappa"],
                markings=tuple(tuple(m) for m in t["markings"]),
                fired=tuple(t["fired"]),
                loop_back=t["loop_back"],
                loop_transition=t["loop_transition"],
            )
        verdict = BmcVerdict(
            kind=d["verdict"],
            k_max=d["k_max"],
            lam=d["lambda"],
            kappa=d["kappa"],
            trace=trace,
            detail=d["detail"],
            stats=tuple(
                MicroStepStat(s["lambda"], s["kappa"], s["status"], s["millis"])
                for s in d["micro_steps"]
            ),
        )
        return cls(
            net_path=d["net"],
            net_id=d["net_id"],
            formula=d["formula"],
            mode=d["mode"],
            k_max=d["k_max"],
            engine=d["engine"],
            g_noloop=d["options"]["g_noloop"],
            trailing=d["options"]["trailing"],
            solver=d["solver"],
            verdict=verdict,
            total_millis=d["total_millis"],
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_text(self, net: PetriNet) -> str:
        lines = [
            f"net:      {self.net_path} ({self.net_id})",
            f"formula:  {self.formula}",
            f"mode:     {self.mode}   k_max: {self.k_max}",
            f"options:  g_noloop={self.g_noloop} trailing={self.trailing}",
            f"engine:   {self.engine}"
            + (f" ({self.solver})" if self.solver else ""),
            "",
            " lambda  kappa  status        millis",
        ]
        for s in self.verdict.stats:
            lines.append(
                f" {s.lam:6d} {s.kappa:6d}  {s.status:<12s}{s.millis:8.1f}"
            )
        lines.append("")
        lines.append(f"verdict: {verdict_line(self.verdict)}")
        if self.verdict.trace is not None:
            lines.append(render_trace(self.verdict.trace, net))
        if self.verdict.kind == "inconclusive" and self.verdict.detail:
            lines.append(f"detail: {self.verdict.detail}")
        lines.append(f"total: {self.total_millis:.1f} ms")
        return "\n".join(lines) + "\n"
