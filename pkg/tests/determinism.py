"""Run every subcommand on every fixture and collect what it printed.

Run as a script to dump the results as JSON, so a test can compare runs
made under different hash seeds.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ER_FIXTURES, FIXTURES, TM_FIXTURES, run_cli  # noqa: E402


def tm_commands(path):
    yield ("parse", path)
    yield ("parse", path, "--json")
    yield ("validate", path)
    yield ("eventize", path)
    yield ("eventize", path, "--replace")
    yield ("simulate", path)
    for view in ("static", "dynamic", "behavior"):
        yield ("render", path, "--view", view)
    yield ("shorthand", path)


def er_commands(path):
    yield ("parse", path)
    yield ("parse", path, "--json")
    yield ("validate", path)
    for strategy in ("flow", "reify"):
        yield ("dissipate", path, "--strategy", strategy)


def outputs():
    """List of [command line, exit code, stdout, stderr] with paths relative to the fixture dir."""
    rows = []
    for name in TM_FIXTURES:
        for argv in tm_commands(str(FIXTURES / name)):
            rows.append([argv, *run_cli(*argv)])
        code, trace, _ = run_cli("simulate", FIXTURES / name)
        events = json.loads(trace)["firings"] if code == 0 else []
        if events:
            argv = ("timeshare", "-", "--group", events[-1]["event"])
            rows.append([argv, *run_cli(*argv, stdin=trace)])
    for name in ER_FIXTURES:
        for argv in er_commands(str(FIXTURES / name)):
            rows.append([argv, *run_cli(*argv)])
    prefix = str(FIXTURES) + "/"
    return [[" ".join(a.replace(prefix, "") for a in argv), code, out, err] for argv, code, out, err in rows]


if __name__ == "__main__":
    json.dump(outputs(), sys.stdout, ensure_ascii=False)
