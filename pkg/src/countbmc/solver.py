"""Running an external SMT-LIB 2 solver process and parsing its answers."""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field

from .refsolver import SolverInputError, parse_sexprs
from .smt import SmtScript

SOLVER_ENV_VAR = "COUNTBMC_SOLVER"

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"
TIMEOUT = "timeout"
CRASHED = "crashed"


@dataclass(frozen=True)
class SolverConfig:
    """How to run the solver.

    `command` is the program plus arguments; an argument containing the
    placeholder ``{file}`` makes the script go through a temporary file,
    otherwise it is written to the solver's stdin.
    """

    command: tuple[str, ...]
    timeout: float = 300.0

    def __post_init__(self):
        if not self.command or not self.command[0]:
            raise ValueError("solver command must name a program")
        if self.timeout <= 0:
            raise ValueError("solver timeout must be positive")


@dataclass(frozen=True)
class SolverAnswer:
    status: str  # sat | unsat | unknown | timeout | crashed
    model: dict = field(default_factory=dict)
    transcript: str = ""


def default_solver_config(timeout: float = 300.0) -> SolverConfig:
    """COUNTBMC_SOLVER if set, else z3/cvc5 from PATH, else the bundled
    reference solver."""
    env = os.environ.get(SOLVER_ENV_VAR)
    if env:
        return SolverConfig(tuple(shlex.split(env)), timeout)
    if shutil.which("z3"):
        return SolverConfig(("z3", "-smt2", "-in"), timeout)
    if shutil.which("cvc5"):
        return SolverConfig(("cvc5", "--lang", "smt2"), timeout)
    return SolverConfig((sys.executable, "-m", "countbmc.refsolver"), timeout)


def solve(script: SmtScript | str, cfg: SolverConfig) -> SolverAnswer:
    """Run the solver on one script and decode its answer.

    sat answers must provide a value for every symbol the script tracks;
    a missing symbol, a garbled reply, or a nonzero exit is reported as
    `crashed` with the transcript, never patched over.
    """
    text = script.text if isinstance(script, SmtScript) else script
    tracked = script.tracked if isinstance(script, SmtScript) else ()

    uses_file = any("{file}" in arg for arg in cfg.command)
    tmp_path = None
    try:
        if uses_file:
            fd, tmp_path = tempfile.mkstemp(suffix=".smt2", prefix="countbmc_")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            argv = [arg.replace("{file}", tmp_path) for arg in cfg.command]
            stdin_data = None
        else:
            argv = list(cfg.command)
            stdin_data = text
        try:
            proc = subprocess.run(
                argv,
                input=stdin_data,
                capture_output=True,
                text=True,
                timeout=cfg.timeout,
            )
        except subprocess.TimeoutExpired as e:
            transcript = _expired_transcript(e)
            return SolverAnswer(TIMEOUT, transcript=transcript)
        except OSError as e:
            return SolverAnswer(CRASHED, transcript=f"could not run {argv[0]}: {e}")
    finally:
        if tmp_path is not None:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass

    transcript = proc.stdout + (("\n--- stderr ---\n" + proc.stderr) if proc.stderr else "")
    answer = _parse_answer(proc.stdout, tracked, transcript)
    # A recognizable verdict wins over the exit code: some solvers exit
    # nonzero on the post-unsat get-value requests the script always sends.
    if answer.status == CRASHED and proc.returncode != 0:
        return SolverAnswer(
            CRASHED, transcript=f"exit code {proc.returncode}\n{transcript}"
        )
    return answer


def _expired_transcript(e: subprocess.TimeoutExpired) -> str:
    parts = []
    for name in ("output", "stderr"):
        data = getattr(e, name, None)
        if data:
            parts.append(data if isinstance(data, str) else data.decode("utf-8", "replace"))
    return "\n".join(parts)


def _parse_answer(stdout: str, tracked, transcript: str) -> SolverAnswer:
    lines = [ln for ln in stdout.splitlines() if ln.strip() and not ln.lstrip().startswith(";")]
    if not lines:
        return SolverAnswer(CRASHED, transcript="empty solver output\n" + transcript)
    verdict = lines[0].strip()
    if verdict == UNSAT:
        return SolverAnswer(UNSAT, transcript=transcript)
    if verdict == UNKNOWN:
        return SolverAnswer(UNKNOWN, transcript=transcript)
    if verdict != SAT:
        return SolverAnswer(
            CRASHED, transcript=f"unrecognized verdict {verdict!r}\n{transcript}"
        )
    try:
        model = _parse_model("\n".join(lines[1:]))
    except SolverInputError as e:
        return SolverAnswer(CRASHED, transcript=f"bad model output: {e}\n{transcript}")
    missing = [sym for sym in tracked if sym not in model]
    if missing:
        return SolverAnswer(
            CRASHED,
            transcript=f"model is missing tracked symbols {missing[:5]}\n{transcript}",
        )
    return SolverAnswer(SAT, model=model, transcript=transcript)


def _parse_model(text: str) -> dict:
    """Read get-value replies: a sequence of ((sym val) ...) groups."""
    model: dict = {}
    for group in parse_sexprs(text):
        if not isinstance(group, list):
            raise SolverInputError(f"stray token {group!r} in model output")
        for pair in group:
            if not isinstance(pair, list) or len(pair) != 2:
                raise SolverInputError(f"malformed value pair {pair!r}")
            sym, val = pair
            model[sym] = _parse_value(val)
    return model


def _parse_value(val):
    if isinstance(val, list):
        if len(val) == 2 and val[0] == "-":
            return -_parse_value(val[1])
        raise SolverInputError(f"unsupported value {val!r}")
    if val == "true":
        return True
    if val == "false":
        return False
    if val.lstrip("-").isdigit():
        return int(val)
    raise SolverInputError(f"unsupported value {val!r}")
