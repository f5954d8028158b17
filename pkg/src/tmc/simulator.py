"""Deterministic execution of a behavior graph, and time-share reports."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from tmc import errors as E
from tmc.errors import TMError
from tmc.metamodel import Model

DEFAULT_TICKS = 1


@dataclass(frozen=True)
class Firing:
    event: str
    iteration: int
    start: int
    end: int

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Trace:
    model: str
    firings: Tuple[Firing, ...] = ()

    def events(self) -> List[str]:
        seen: Dict[str, None] = {}
        for f in self.firings:
            seen.setdefault(f.event)
        return list(seen)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "firings": [
                {"event": f.event, "iteration": f.iteration, "start": f.start, "end": f.end} for f in self.firings
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Trace":
        try:
            firings = tuple(
                Firing(str(f["event"]), int(f["iteration"]), int(f["start"]), int(f["end"]))
                for f in data["firings"]
            )
            return cls(str(data["model"]), firings)
        except (KeyError, TypeError, ValueError) as exc:
            raise TMError(E.SYNTAX, f"malformed trace document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Trace":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TMError(E.SYNTAX, f"trace is not valid JSON: {exc.msg} at {exc.lineno}:{exc.colno}") from None
        if not isinstance(data, dict):
            raise TMError(E.SYNTAX, "trace document must be a JSON object")
        return cls.from_dict(data)


def schedule(model: Model) -> List[str]:
    """Kahn order over the precedence edges, ties broken by event declaration order."""
    order = {ev.id: i for i, ev in enumerate(model.events)}
    pairs = model.behavior.pairs() if model.behavior else ()
    succ: Dict[str, List[str]] = {eid: [] for eid in order}
    indegree = {eid: 0 for eid in order}
    for before, after in pairs:
        if before not in order or after not in order:
            missing = before if before not in order else after
            raise TMError(E.UNDECLARED_EVENT, f"behavior references undeclared event {missing}")
        if after not in succ[before]:
            succ[before].append(after)
            indegree[after] += 1
    ready = [(order[e], e) for e, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    out = []
    while ready:
        _, eid = heapq.heappop(ready)
        out.append(eid)
        for nxt in succ[eid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, (order[nxt], nxt))
    if len(out) != len(order):
        stuck = sorted((e for e in order if e not in out), key=order.get)
        raise TMError(E.CYCLIC_BEHAVIOR, "precedence cycle among " + ", ".join(stuck))
    return out


def effective_repeats(model: Model, overrides: Optional[Mapping[str, int]] = None) -> Dict[str, int]:
    declared = model.behavior.repeat_counts() if model.behavior else {}
    ids = {ev.id for ev in model.events}
    counts = {eid: declared.get(eid, 1) for eid in ids}
    for eid, n in (overrides or {}).items():
        if eid not in ids:
            raise TMError(E.UNDECLARED_EVENT, f"repeat override names undeclared event {eid}")
        if n < 1:
            raise TMError(E.SYNTAX, f"repeat override for {eid} must be a positive integer")
        counts[eid] = n
    return counts


def simulate(model: Model, overrides: Optional[Mapping[str, int]] = None) -> Trace:
    counts = effective_repeats(model, overrides)
    order = schedule(model)
    preds: Dict[str, List[str]] = {eid: [] for eid in order}
    for before, after in model.behavior.pairs() if model.behavior else ():
        preds[after].append(before)
    finished: Dict[str, int] = {}
    firings: List[Firing] = []
    for eid in order:
        ev = model.event(eid)
        ticks = ev.duration.ticks if ev.duration is not None else DEFAULT_TICKS
        t = max((finished[p] for p in preds[eid]), default=0)
        for i in range(1, counts[eid] + 1):
            firings.append(Firing(eid, i, t, t + ticks))
            t += ticks
        finished[eid] = t
    return Trace(model.name, tuple(firings))


def time_share(trace: Trace, group: Iterable[str]) -> Fraction:
    """Fraction of total firing time spent in ``group`` events."""
    if not trace.firings:
        raise TMError(E.EMPTY_TRACE, "trace has no firings")
    group = set(group)
    unknown = sorted(group - set(trace.events()))
    if unknown:
        raise TMError(E.UNDECLARED_EVENT, "group names events absent from the trace: " + ", ".join(unknown))
    total = sum(f.duration for f in trace.firings)
    if total == 0:
        raise TMError(E.EMPTY_TRACE, "trace has zero total duration")
    part = sum(f.duration for f in trace.firings if f.event in group)
    return Fraction(part, total)


def format_ratio(value: Fraction, places: int = 4) -> str:
    """Round half up to ``places`` decimals without going through floats."""
    scale = 10**places
    q = (value * scale * 2 + 1) // 2
    return f"{q // scale}.{q % scale:0{places}d}"
