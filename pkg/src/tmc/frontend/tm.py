"""Recursive-descent parser for the TM modelling language."""

from __future__ import annotations

from decimal import Decimal
from typing import List

from tmc.errors import DUPLICATE_NAME, SYNTAX, Diagnostic, ParseError
from tmc.frontend.lexer import TokenStream
from tmc.metamodel import (
    DURATION_UNITS,
    BehaviorGraph,
    Duration,
    Event,
    Flow,
    Model,
    Precedence,
    RegionItem,
    Repeat,
    StageKind,
    StageRef,
    StaticModel,
    Thimac,
    Trigger,
)

STAGE_KINDS = tuple(k.value for k in StageKind)
TM_KEYWORDS = (
    "model",
    "thimac",
    "memory",
    "stage",
    "flow",
    "trigger",
    "event",
    "region",
    "time",
    "duration",
    "behavior",
    "repeat",
) + STAGE_KINDS

DEFAULT_REPEAT = 2


class _TMParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text, reserved=TM_KEYWORDS)
        self.problems: List[Diagnostic] = []

    def duplicate(self, what: str, name: str, loc) -> None:
        self.problems.append(Diagnostic.error(DUPLICATE_NAME, f"duplicate {what} {name!r}", loc))

    def model(self) -> Model:
        ts = self.ts
        start = ts.expect("model")
        name = ts.expect_ident("model name").text
        ts.expect("{")
        thimacs: List[Thimac] = []
        flows: List[Flow] = []
        triggers: List[Trigger] = []
        events: List[Event] = []
        precedence: List[Precedence] = []
        repeats: List[Repeat] = []
        saw_behavior = False
        while not ts.at("}"):
            if ts.at("thimac"):
                t = self.thimac()
                if any(o.name == t.name for o in thimacs):
                    self.duplicate("thimac", t.name, t.loc)
                thimacs.append(t)
            elif ts.at("flow"):
                flows.append(self.edge(Flow))
            elif ts.at("trigger"):
                triggers.append(self.edge(Trigger))
            elif ts.at("event"):
                ev = self.event()
                if any(o.id == ev.id for o in events):
                    self.duplicate("event", ev.id, ev.loc)
                events.append(ev)
            elif ts.at("behavior"):
                saw_behavior = True
                self.behavior(precedence, repeats)
            else:
                raise ts.fail(
                    f"expected thimac, flow, trigger, event or behavior, found {ts.current.describe()}"
                )
        ts.expect("}")
        if ts.current.kind != "eof":
            raise ts.fail(f"unexpected {ts.current.describe()} after model")
        statics = StaticModel(name, tuple(thimacs), tuple(flows), tuple(triggers), loc=start.loc)
        behavior = BehaviorGraph(tuple(precedence), tuple(repeats)) if saw_behavior else None
        return Model(statics, tuple(events), behavior)

    def thimac(self) -> Thimac:
        ts = self.ts
        start = ts.expect("thimac")
        name = ts.expect_ident("thimac name").text
        memory = ts.accept("memory") is not None
        ts.expect("{")
        stages: List[StageKind] = []
        subs: List[Thimac] = []
        while not ts.at("}"):
            if ts.at("stage"):
                ts.advance()
                tok = ts.expect_one_of(STAGE_KINDS, "stage kind")
                kind = StageKind(tok.text)
                if kind in stages:
                    self.duplicate(f"stage in thimac {name}:", kind.value, tok.loc)
                else:
                    stages.append(kind)
                ts.expect(";")
            elif ts.at("thimac"):
                sub = self.thimac()
                if any(o.name == sub.name for o in subs):
                    self.duplicate(f"subthimac of {name}:", sub.name, sub.loc)
                subs.append(sub)
            else:
                raise ts.fail(f"expected 'stage', 'thimac' or '}}', found {ts.current.describe()}")
        ts.expect("}")
        return Thimac(name, tuple(stages), tuple(subs), memory, loc=start.loc)

    def stage_ref(self) -> StageRef:
        ts = self.ts
        first = ts.current
        if first.kind != "ident":
            raise ts.fail(f"expected stage reference, found {first.describe()}")
        parts: List[str] = []
        while True:
            tok = ts.current
            if tok.kind != "ident":
                raise ts.fail(f"expected identifier in stage reference, found {tok.describe()}")
            if tok.text in STAGE_KINDS:
                if not parts:
                    raise ts.fail("stage reference must name a thimac before the stage kind")
                ts.advance()
                return StageRef(tuple(parts), StageKind(tok.text))
            parts.append(ts.expect_ident("thimac name").text)
            if not ts.accept("."):
                raise ts.fail(
                    f"stage reference {'.'.join(parts)} must end with a stage kind ({' | '.join(STAGE_KINDS)})"
                )

    def edge(self, cls):
        ts = self.ts
        start = ts.advance()
        src = self.stage_ref()
        ts.expect("->")
        dst = self.stage_ref()
        ts.expect(";")
        return cls(src, dst, loc=start.loc)

    def event(self) -> Event:
        ts = self.ts
        start = ts.expect("event")
        eid = ts.expect_ident("event id").text
        label = None
        if ts.current.kind == "string":
            label = ts.advance().text
        ts.expect("{")
        ts.expect("region")
        ts.expect("{")
        region: List[RegionItem] = []
        while not ts.at("}"):
            if ts.at("flow"):
                item: RegionItem = self.edge(Flow)
            elif ts.at("trigger"):
                item = self.edge(Trigger)
            else:
                item = self.stage_ref()
                ts.expect(";")
            region.append(item)
        ts.expect("}")
        time = None
        if ts.accept("time"):
            time = ts.expect_kind("string", "time annotation string").text
            ts.expect(";")
        duration = None
        if ts.at("duration"):
            duration = self.duration()
        ts.expect("}")
        return Event(eid, tuple(region), label, time, duration, loc=start.loc)

    def duration(self) -> Duration:
        ts = self.ts
        ts.expect("duration")
        num = ts.expect_kind("number", "duration value")
        unit = ts.expect_one_of(tuple(DURATION_UNITS), "duration unit")
        ts.expect(";")
        d = Duration(Decimal(num.text), unit.text)
        if not d.is_whole:
            raise ParseError(
                [Diagnostic.error(SYNTAX, f"duration {d} is not a whole number of ticks", num.loc)]
            )
        return d

    def behavior(self, precedence: List[Precedence], repeats: List[Repeat]) -> None:
        ts = self.ts
        ts.expect("behavior")
        ts.expect("{")
        while not ts.at("}"):
            if ts.at("repeat") and ts.peek().kind == "ident":
                start = ts.advance()
                eid = ts.expect_ident("event id").text
                count = DEFAULT_REPEAT
                if ts.current.kind == "number":
                    tok = ts.advance()
                    if not tok.text.isdigit() or int(tok.text) < 1:
                        raise ts.fail("repeat count must be a positive integer", tok)
                    count = int(tok.text)
                ts.expect(";")
                if any(r.event == eid for r in repeats):
                    self.duplicate("repeat for event", eid, start.loc)
                repeats.append(Repeat(eid, count, loc=start.loc))
            else:
                first = ts.expect_ident("event id")
                ts.expect("->")
                second = ts.expect_ident("event id")
                ts.expect(";")
                precedence.append(Precedence(first.text, second.text, loc=first.loc))
        ts.expect("}")


def parse_tm(text: str) -> Model:
    """Parse TM source. Raises ParseError carrying at least one diagnostic."""
    parser = _TMParser(text)
    model = parser.model()
    if parser.problems:
        raise ParseError(sorted(parser.problems, key=Diagnostic.sort_key))
    return model


def parse_stage_ref(text: str) -> StageRef:
    parser = _TMParser(text)
    ref = parser.stage_ref()
    if parser.ts.current.kind != "eof":
        raise parser.ts.fail(f"unexpected {parser.ts.current.describe()} after stage reference")
    return ref
