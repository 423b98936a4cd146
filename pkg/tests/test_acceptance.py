"""The nine acceptance criteria, each run at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (shown even under output
capture) and then asserts, so a red criterion is both visible and failing.
"""

import io
import time
from contextlib import redirect_stdout

import pytest

from lfpl.cli import run
from lfpl.corpus import CORPUS_DIR, load_entries
from lfpl.suites import SUITES, SuiteConfig

CRITERIA = [
    (1, "cost-bound reproduction", "reverse-bound", 1.0),
    (2, "general soundness", "soundness", 60.0),
    (3, "non-size-increasing", "nsi", 30.0),
    (4, "determinism and preservation", "determinism", 30.0),
    (5, "coherence", "coherence", 30.0),
    (6, "stack correctness", "stacks", 120.0),
    (7, "iterator law", "iterators", 10.0),
    (8, "end-to-end completeness", "tm", 120.0),
    (9, "budget inequality", "budget", 1.0),
]


def bound_stdout() -> tuple[int, str]:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(["bound", "--costs", "paper-example", str(CORPUS_DIR / "reverse.lfpl"), "reverse"])
    return code, buf.getvalue()


def extra_checks(num: int, cfg: SuiteConfig) -> list[str]:
    problems = []
    if num == 1:
        code, out = bound_stdout()
        if code != 0 or out.splitlines()[:1] != ["4 + 2*n"]:
            problems.append(f"bound command printed {out!r} (exit {code})")
    if num == 2:
        files = {e.file for e in load_entries(cfg.corpus)}
        if len(files) < 15:
            problems.append(f"corpus has {len(files)} programs, need at least 15")
        if cfg.random_terms < 500:
            problems.append("fewer than 500 random terms")
    if num == 6 and cfg.stack_scripts < 200:
        problems.append("fewer than 200 scripts")
    return problems


@pytest.mark.parametrize("num, title, suite, limit", CRITERIA, ids=[c[2] for c in CRITERIA])
def test_criterion(num, title, suite, limit, capsys):
    cfg = SuiteConfig()
    t0 = time.perf_counter()
    res = SUITES[suite](cfg)
    problems = extra_checks(num, cfg)
    elapsed = time.perf_counter() - t0
    if elapsed >= limit:
        problems.append(f"took {elapsed:.2f}s, limit {limit:g}s")
    problems += res.failures[:3]
    ok = res.ok and not problems
    line = (f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {res.checked} cases, "
            f"{len(res.failures)} failures, {elapsed:.2f}s / {limit:g}s")
    with capsys.disabled():
        print("\n" + line + ("" if ok else f"  [{'; '.join(problems)}]"))
    assert ok, problems
