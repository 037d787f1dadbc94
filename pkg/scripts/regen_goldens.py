#!/usr/bin/env python3
"""Regenerate the committed golden files under tests/goldens/.

Run from the repository root after an intentional change to emission or
report formats, then review the diff before committing.
"""

import io
import json
import sys
from contextlib import redirect_stdout
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from countbmc import cli  # noqa: E402
from countbmc.logic import parse_lc, to_nnf  # noqa: E402
from countbmc.pnml import load_net  # noqa: E402
from countbmc.smt import assemble  # noqa: E402

GOLDENS = REPO / "tests" / "goldens"


def normalize_millis(text: str) -> str:
    data = json.loads(text)
    data["total_millis"] = 0
    for step in data["micro_steps"]:
        step["millis"] = 0
    return json.dumps(data, indent=2) + "\n"


def main() -> int:
    GOLDENS.mkdir(parents=True, exist_ok=True)

    # byte-exact SMT script for the first scheduler property at (lam=2, kap=1)
    ups = load_net(REPO / "nets" / "ups.pnml").net
    psi = to_nnf(parse_lc("F(#x)p1(x)>p0(x)").formula)
    script = assemble(ups, psi, 2, 1)
    (GOLDENS / "ups_row1_lam2_kap1.smt2").write_bytes(script.text.encode("utf-8"))

    # JSON report (oracle engine, so only timings vary; they are zeroed)
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(
            ["check", "--net", "nets/ups.pnml", "--formula", "F(#x)p1(x)>p0(x)",
             "--kmax", "4", "--json", "--oracle"]
        )
    assert code == 10, code
    (GOLDENS / "check_ups_row1.json").write_text(normalize_millis(buf.getvalue()))

    # bench table over the shipped suites (timing goes to stderr only)
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(["bench", "--dir", str(REPO / "nets"), "--kmax", "5",
                         "--solver", f"{sys.executable} -m countbmc.refsolver"])
    assert code == 0, code
    (GOLDENS / "bench_nets.txt").write_text(buf.getvalue())

    for p in sorted(GOLDENS.iterdir()):
        print(f"wrote {p.relative_to(REPO)} ({p.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
