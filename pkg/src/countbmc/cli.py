"""Command-line front end: check one property, bench a directory of nets
with their property suites, or convert between net formats.

Exit codes for `check`: 10 a witness/counterexample was found (sat), 20
unsat up to the bound, 30 the solver could not decide some micro-step,
1 usage or input error.
"""

from __future__ import annotations

import argparse
import shlex
import sys
import time
from pathlib import Path

from . import engine, logic, oracle, pnml
from .errors import CountbmcError
from .report import RunReport, verdict_line
from .search import REFUTE, WITNESS, SearchConfig
from .smt import (
    G_NOLOOP_FALSE,
    G_NOLOOP_PREFIX,
    TRAILING_FREE,
    TRAILING_STRICT,
    EncodeOptions,
)
from .solver import SolverConfig, default_solver_config

EXIT_SAT = 10
EXIT_UNSAT_UP_TO = 20
EXIT_INCONCLUSIVE = 30
EXIT_ERROR = 1

_VERDICT_EXIT = {
    "sat": EXIT_SAT,
    "unsat_up_to": EXIT_UNSAT_UP_TO,
    "inconclusive": EXIT_INCONCLUSIVE,
}

_TRAILING_FLAG = {"strict": TRAILING_STRICT, "paper": TRAILING_FREE}


class _UsageError(CountbmcError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is 1
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="countbmc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check one property against one net")
    check.add_argument("--net", required=True, help="net file (PNML or textual)")
    group = check.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", help="property text")
    group.add_argument("--formula-file", help="file with exactly one property")
    check.add_argument("--kmax", required=True, type=int, help="external termination bound")
    check.add_argument("--mode", choices=[WITNESS, REFUTE], default=None)
    check.add_argument(
        "--g-noloop", choices=[G_NOLOOP_PREFIX, G_NOLOOP_FALSE], default=G_NOLOOP_PREFIX
    )
    check.add_argument("--trailing", choices=["strict", "paper"], default="strict")
    check.add_argument("--oracle", action="store_true", help="decide by enumeration instead of SMT")
    check.add_argument("--emit-smt", metavar="DIR", help="dump every micro-step script")
    check.add_argument("--json", action="store_true", help="machine-readable report")
    check.add_argument("--solver", metavar="CMD", help="solver command line")
    check.add_argument("--timeout", type=float, default=300.0, help="per-call solver timeout (s)")
    check.add_argument("--jobs", type=int, default=1, help="solve micro-steps of one macro-step concurrently")

    bench = sub.add_parser("bench", help="run every .props suite next to a net file")
    bench.add_argument("--dir", required=True, help="directory of net files with sibling .props")
    bench.add_argument("--kmax", required=True, type=int)
    bench.add_argument(
        "--g-noloop", choices=[G_NOLOOP_PREFIX, G_NOLOOP_FALSE], default=G_NOLOOP_PREFIX
    )
    bench.add_argument("--trailing", choices=["strict", "paper"], default="strict")
    bench.add_argument("--oracle", action="store_true")
    bench.add_argument("--solver", metavar="CMD")
    bench.add_argument("--timeout", type=float, default=300.0)
    bench.add_argument("--jobs", type=int, default=1)

    convert = sub.add_parser("convert", help="convert PNML <-> textual net")
    convert.add_argument("--in", dest="src", required=True)
    convert.add_argument("--out", dest="dst", required=True)
    return parser


def _solver_config(args) -> SolverConfig:
    if args.solver:
        return SolverConfig(tuple(shlex.split(args.solver)), args.timeout)
    return default_solver_config(args.timeout)


def _options(args) -> EncodeOptions:
    return EncodeOptions(
        g_noloop=args.g_noloop,
        trailing_transitions=_TRAILING_FLAG[args.trailing],
    )


def parse_props(text: str, where: str) -> list[tuple[str | None, str, int]]:
    """One property per line; lines starting with # are comments; an
    optional leading @mode=witness|refute directive per line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        mode = None
        if line.startswith("@mode="):
            directive, _, rest = line.partition(" ")
            mode = directive[len("@mode=") :]
            if mode not in (WITNESS, REFUTE):
                raise CountbmcError(
                    f"{where}:{lineno}: unknown mode {mode!r} (witness or refute)"
                )
            line = rest.strip()
            if not line:
                raise CountbmcError(f"{where}:{lineno}: directive without a property")
        out.append((mode, line, lineno))
    return out


def _run_one(net_doc, net_path, formula_text, mode, args) -> RunReport:
    prop = logic.parse_lc(formula_text)
    cfg = SearchConfig(
        k_max=args.kmax,
        mode=mode,
        options=_options(args),
        solver=None if args.oracle else _solver_config(args),
        jobs=getattr(args, "jobs", 1),
    )
    started = time.perf_counter()
    if args.oracle:
        verdict = oracle.oracle_check(net_doc.net, prop, cfg)
    else:
        verdict = engine.check(
            net_doc.net, prop, cfg, emit_dir=getattr(args, "emit_smt", None)
        )
    total = (time.perf_counter() - started) * 1000.0
    return RunReport(
        net_path=str(net_path),
        net_id=net_doc.net_id,
        formula=formula_text,
        mode=mode,
        k_max=args.kmax,
        engine="oracle" if args.oracle else "smt",
        g_noloop=args.g_noloop,
        trailing=_TRAILING_FLAG[args.trailing],
        solver=None if args.oracle else " ".join(cfg.solver.command),
        verdict=verdict,
        total_millis=total,
    )


def _cmd_check(args) -> int:
    net_doc = pnml.load_net(args.net)
    if args.formula is not None:
        formula_text, directive_mode = args.formula, None
    else:
        props = parse_props(
            Path(args.formula_file).read_text(encoding="utf-8"), args.formula_file
        )
        if len(props) != 1:
            raise CountbmcError(
                f"{args.formula_file}: expected exactly one property, found "
                f"{len(props)} (use bench for suites)"
            )
        directive_mode, formula_text, _ = props[0]
    mode = args.mode or directive_mode or WITNESS
    report = _run_one(net_doc, args.net, formula_text, mode, args)
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.to_text(net_doc.net))
    return _VERDICT_EXIT[report.verdict.kind]


def _cmd_bench(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise CountbmcError(f"--dir {args.dir}: not a directory")
    suites = []
    for net_path in sorted(root.iterdir()):
        if net_path.suffix not in (".pnml", ".xml", ".net", ".txt"):
            continue
        props_path = net_path.with_suffix(".props")
        if not props_path.exists():
            continue
        suites.append((net_path, props_path))
    if not suites:
        raise CountbmcError(f"--dir {args.dir}: no net file with a sibling .props suite")

    rows = []
    for net_path, props_path in suites:
        net_doc = pnml.load_net(net_path)
        for mode, formula_text, lineno in parse_props(
            props_path.read_text(encoding="utf-8"), str(props_path)
        ):
            report = _run_one(net_doc, net_path, formula_text, mode or WITNESS, args)
            rows.append((net_path.name, lineno, report))

    name_w = max(len(r[0]) for r in rows)
    form_w = max(len(r[2].formula) for r in rows)
    header = (
        f"{'net':<{name_w}}  {'mode':<7}  {'property':<{form_w}}  result"
    )
    print(header)
    print("-" * len(header))
    for name, lineno, report in rows:
        print(
            f"{name:<{name_w}}  {report.mode:<7}  {report.formula:<{form_w}}  "
            f"{verdict_line(report.verdict)}"
        )
    total = sum(r[2].total_millis for r in rows)
    print(f"ran {len(rows)} properties in {total:.0f} ms", file=sys.stderr)
    return 0


def _cmd_convert(args) -> int:
    doc = pnml.load_net(args.src)
    dst = Path(args.dst)
    if dst.suffix in (".pnml", ".xml"):
        target = "pnml"
    elif dst.suffix in (".net", ".txt"):
        target = "text"
    else:
        target = "text" if doc.source_format == "pnml" else "pnml"
    if target == "pnml":
        dst.write_bytes(pnml.write_pnml(doc))
    else:
        dst.write_text(pnml.write_textnet(doc), encoding="utf-8")
    print(f"wrote {target} to {dst}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_convert(args)
    except _UsageError as e:
        print(f"countbmc: usage error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except CountbmcError as e:
        print(f"countbmc: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"countbmc: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
