import contextlib
import io
import sys
from pathlib import Path

import pytest

from tmc.cli import main
from tmc.frontend import parse_er, parse_tm

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

sys.path.insert(0, str(Path(__file__).resolve().parent))

TM_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.tm"))
ER_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.er"))

# Filled by test_acceptance; printed once the run ends.
ACCEPTANCE_RESULTS = {}


def load_tm(name):
    return parse_tm((FIXTURES / name).read_text(encoding="utf-8"))


def load_er(name):
    return parse_er((FIXTURES / name).read_text(encoding="utf-8"))


def run_cli(*argv, stdin=""):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    saved = sys.stdin
    sys.stdin = io.StringIO(stdin)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                code = main([str(a) for a in argv])
            except SystemExit as exc:
                code = exc.code
    finally:
        sys.stdin = saved
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def marriage():
    return load_tm("marriage.tm")


@pytest.fixture
def airplane():
    return load_tm("airplane.tm")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
