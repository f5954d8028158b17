"""Command-line entry point: ``tmc <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import re
import sys
from typing import Callable, Dict, List, Optional, Sequence

from tmc.dissipator import Strategy, dissipate, shorthand
from tmc.errors import Diagnostic, TMError, has_errors
from tmc.eventizer import eventize, strip_events
from tmc.frontend import dumps, er_to_dict, model_to_dict, parse_er, parse_tm, serialize_er, serialize_tm
from tmc.render import View, render
from tmc.simulator import Trace, format_ratio, simulate, time_share
from tmc.validator import validate, validate_er

_FIRST_WORD = re.compile(r"\s*(?://[^\n]*\s*)*([A-Za-z_]+)")


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def is_er(path: str, text: str) -> bool:
    """ER sources end in .er or open with ``erd``; everything else is TM."""
    if path.endswith(".er"):
        return True
    if path.endswith(".tm"):
        return False
    m = _FIRST_WORD.match(text)
    return bool(m and m.group(1) == "erd")


def report(diags: Sequence[Diagnostic]) -> None:
    for d in diags:
        print(d.render(), file=sys.stderr)


def load_tm(path: str):
    return parse_tm(read_text(path))


def load_er(path: str):
    return parse_er(read_text(path))


# --- subcommands ----------------------------------------------------------


def cmd_parse(args) -> int:
    text = read_text(args.file)
    if is_er(args.file, text):
        er = parse_er(text)
        out = dumps(er_to_dict(er)) if args.json else serialize_er(er)
    else:
        model = parse_tm(text)
        out = dumps(model_to_dict(model)) if args.json else serialize_tm(model)
    write_text(args.output, out)
    return 0


def cmd_validate(args) -> int:
    text = read_text(args.file)
    diags = validate_er(parse_er(text)) if is_er(args.file, text) else validate(parse_tm(text))
    report(diags)
    return 1 if has_errors(diags) else 0


def cmd_dissipate(args) -> int:
    model = dissipate(load_er(args.file), Strategy(args.strategy))
    write_text(args.output, serialize_tm(model))
    return 0


def cmd_eventize(args) -> int:
    model = load_tm(args.file)
    if args.replace:
        model = strip_events(model)
    write_text(args.output, serialize_tm(eventize(model)))
    return 0


def cmd_simulate(args) -> int:
    model = load_tm(args.file)
    diags = validate(model)
    report(diags)
    if has_errors(diags):
        return 1
    overrides: Dict[str, int] = dict(args.repeat)
    write_text(args.output, simulate(model, overrides).to_json())
    return 0


def cmd_timeshare(args) -> int:
    trace = Trace.from_json(read_text(args.file))
    group = [g for chunk in args.group for g in chunk.split(",") if g]
    write_text(args.output, format_ratio(time_share(trace, group)) + "\n")
    return 0


def cmd_render(args) -> int:
    write_text(args.output, render(load_tm(args.file), View(args.view)))
    return 0


def cmd_shorthand(args) -> int:
    write_text(args.output, serialize_er(shorthand(load_tm(args.file))))
    return 0


def _repeat_arg(text: str):
    eid, sep, count = text.partition("=")
    if not sep or not eid or not count.isdigit() or int(count) < 1:
        raise argparse.ArgumentTypeError(f"expected EVENT=N with N >= 1, got {text!r}")
    return eid, int(count)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmc", description="Thinging machine model toolchain.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help_text: str, file_help: str, output: bool = True):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("file", help=file_help + " ('-' for stdin)")
        if output:
            p.add_argument("-o", "--output", metavar="FILE", help="write here instead of stdout")
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "print the canonical form of a .tm or .er file", "model source")
    p.add_argument("--json", action="store_true", help="emit the AST as JSON")
    add("validate", cmd_validate, "check flow laws; diagnostics go to stderr", "model source", output=False)
    p = add("dissipate", cmd_dissipate, "turn an ER model into a TM model", "ER source")
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    p = add("eventize", cmd_eventize, "derive events and chronology", "TM source")
    p.add_argument("--replace", action="store_true", help="drop declared events and derive fresh ones")
    p = add("simulate", cmd_simulate, "run the behavior graph and emit a JSON trace", "TM source")
    p.add_argument(
        "--repeat", action="append", default=[], type=_repeat_arg, metavar="EVENT=N", help="override a repeat count"
    )
    p = add("timeshare", cmd_timeshare, "share of trace time spent in a group of events", "trace JSON")
    p.add_argument("--group", action="append", required=True, metavar="E1,E2", help="event ids, comma separated")
    p = add("render", cmd_render, "emit a DOT diagram", "TM source")
    p.add_argument("--view", required=True, choices=[v.value for v in View])
    add("shorthand", cmd_shorthand, "collapse a TM model into an ER model", "TM source")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="tmc: %(message)s")
    try:
        return args.func(args)
    except TMError as exc:
        if exc.diagnostics:
            report(exc.diagnostics)
        if not exc.diagnostics or exc.code != exc.diagnostics[0].code:
            print(f"tmc: error {exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"tmc: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
