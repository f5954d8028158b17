"""Derive events and a default chronology from a static model.

Events are generated in four passes, numbered E1, E2, ... in generation order:

1. creation of a root thimac that nothing flows or triggers into;
2. one motion per maximal inter-machine flow chain;
3. every process stage, with the flows feeding it;
4. every create stage reached by a trigger, with those triggers.

A chain starts at a release stage not fed by its own machine's receive
stage, leaves through the transfer gate, and is followed across machines.
A machine relays the thing onward (receive -> release -> transfer) only
if its gate has somewhere new to send it; otherwise the chain ends at its
receive stage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Dict, List, Optional, Tuple

from tmc import errors as E
from tmc.errors import TMError, has_errors
from tmc.metamodel import (
    BehaviorGraph,
    Event,
    Flow,
    Model,
    Path,
    Precedence,
    RegionItem,
    StageKind,
    StageRef,
    StaticModel,
    Trigger,
    is_ancestor_or_self,
    item_key,
    walk_thimacs,
)
from tmc.validator import validate

log = logging.getLogger(__name__)

K = StageKind


@dataclass(frozen=True)
class Chain:
    origin: Path
    hops: Tuple[Path, ...]  # machines entered, in order; the last is where the chain ends
    region: Tuple[RegionItem, ...]
    inter_flows: Tuple[Flow, ...]

    @property
    def target(self) -> Path:
        return self.hops[-1]

    @property
    def relays(self) -> Tuple[Path, ...]:
        return self.hops[:-1]


class _FlowIndex:
    def __init__(self, statics: StaticModel):
        self.out: Dict[StageRef, List[Flow]] = {}
        self.into: Dict[StageRef, List[Flow]] = {}
        for f in statics.flows:
            self.out.setdefault(f.source, []).append(f)
            self.into.setdefault(f.target, []).append(f)

    def intra(self, path: Path, src: K, dst: K) -> Optional[Flow]:
        for f in self.out.get(StageRef(path, src), ()):
            if f.target == StageRef(path, dst):
                return f
        return None

    def inter_out(self, gate: StageRef) -> List[Flow]:
        return [f for f in self.out.get(gate, ()) if f.target.path != gate.path]


def _dedupe(items: List[RegionItem]) -> Tuple[RegionItem, ...]:
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return tuple(out)


def chain_origins(statics: StaticModel) -> List[StageRef]:
    index = _FlowIndex(statics)
    origins = []
    for path, t in walk_thimacs(statics.thimacs):
        if K.RELEASE not in t.stages:
            continue
        rel = StageRef(path, K.RELEASE)
        fed_by_receive = any(f.source == StageRef(path, K.RECEIVE) for f in index.into.get(rel, ()))
        if not fed_by_receive:
            origins.append(rel)
    return origins


def flow_chains(statics: StaticModel) -> List[Chain]:
    """Every maximal inter-machine chain, by origin declaration order then branch order."""
    index = _FlowIndex(statics)
    chains: List[Chain] = []

    for release in chain_origins(statics):
        origin = release.path
        to_gate = index.intra(origin, K.RELEASE, K.TRANSFER)
        if to_gate is None:
            continue
        feeding = [f for f in index.into.get(release, ()) if f.source.path == origin]
        prefix: List[RegionItem] = feeding + [release, to_gate, to_gate.target]

        def allowed(gate: StageRef, visited: Tuple[Path, ...]) -> List[Flow]:
            return [
                f
                for f in index.inter_out(gate)
                if f.target.path not in visited and not is_ancestor_or_self(f.target.path, origin)
            ]

        def depart(gate, items, visited, hops, inter):
            for f in allowed(gate, visited):
                arrive(f, items, visited, hops, inter)

        def arrive(f, items, visited, hops, inter):
            m = f.target.path
            items = items + [f, f.target]
            visited = visited + (m,)
            hops = hops + (m,)
            inter = inter + (f,)
            to_recv = index.intra(m, K.TRANSFER, K.RECEIVE)
            if to_recv is not None:
                items = items + [to_recv, to_recv.target]
                to_rel = index.intra(m, K.RECEIVE, K.RELEASE)
                back = index.intra(m, K.RELEASE, K.TRANSFER)
                if to_rel is not None and back is not None and allowed(f.target, visited):
                    depart(f.target, items + [to_rel, to_rel.target, back], visited, hops, inter)
                    return
            chains.append(Chain(origin, hops, _dedupe(items), inter))

        depart(to_gate.target, prefix, (origin,), (), ())
    return chains


def _label_path(path: Path) -> str:
    return ".".join(path)


def derive_events(statics: StaticModel) -> List[Event]:
    index = _FlowIndex(statics)
    triggers_into: Dict[StageRef, List[Trigger]] = {}
    for t in statics.triggers:
        triggers_into.setdefault(t.target, []).append(t)

    events: List[Tuple[Tuple[RegionItem, ...], str]] = []

    for root in statics.thimacs:
        ref = StageRef((root.name,), K.CREATE)
        if K.CREATE in root.stages and not index.into.get(ref) and not triggers_into.get(ref):
            events.append(((ref,), f"There is a {root.name}"))

    for chain in flow_chains(statics):
        events.append(
            (chain.region, f"{_label_path(chain.origin)} moves to {_label_path(chain.hops[0])}")
        )

    for path, t in walk_thimacs(statics.thimacs):
        if K.PROCESS in t.stages:
            ref = StageRef(path, K.PROCESS)
            feeding = [f for f in index.into.get(ref, ()) if f.source.path == path]
            events.append(((ref, *feeding), f"{_label_path(path)} is processed"))

    for path, t in walk_thimacs(statics.thimacs):
        if K.CREATE in t.stages:
            ref = StageRef(path, K.CREATE)
            trigs = triggers_into.get(ref)
            if trigs:
                events.append(((*trigs, ref), f"{_label_path(path)} is created"))

    return [Event(f"E{i}", region, label) for i, (region, label) in enumerate(events, start=1)]


def derive_precedence(statics: StaticModel, events: List[Event]) -> List[Tuple[str, str]]:
    """A precedes B when a static edge leaves A's stages and lands in B's.

    The edge's source must lie outside B and its target outside A, so
    overlapping chain regions do not order each other. An edge that some
    region lists belongs to that motion: it only orders A and B when A or
    B is one of the events listing it.
    """
    holders: Dict[StageRef, set] = {}
    owners: Dict[tuple, set] = {}
    for i, ev in enumerate(events):
        for ref in ev.region_stages():
            holders.setdefault(ref, set()).add(i)
        for item in ev.region:
            if not isinstance(item, StageRef):
                owners.setdefault(item_key(item), set()).add(i)
    found = set()
    for e in statics.edges():
        src, dst = holders.get(e.source, set()), holders.get(e.target, set())
        listed = owners.get(item_key(e))
        for i in src - dst:
            for j in dst - src:
                if not listed or i in listed or j in listed:
                    found.add((i, j))
    return [(events[i].id, events[j].id) for i, j in sorted(found)]


def _require_valid(model: Model) -> None:
    diags = validate(model)
    if has_errors(diags):
        raise TMError(E.NOT_VALIDATED, f"model {model.name} has validation errors", diags)


def eventize(model: Model) -> Model:
    """Return ``model`` with derived events and behavior.

    A model that already declares events is returned untouched.
    """
    _require_valid(model)
    if model.events:
        log.warning("model %s already declares events; eventize left it unchanged", model.name)
        return model
    events = derive_events(model.statics)
    pairs = derive_precedence(model.statics, events)
    graph: Dict[str, List[str]] = {ev.id: [] for ev in events}
    for before, after in pairs:
        graph[after].append(before)
    try:
        TopologicalSorter(graph).prepare()
    except CycleError as exc:
        raise TMError(
            E.CYCLIC_BEHAVIOR,
            "static structure forces a cyclic chronology: " + " -> ".join(exc.args[1]),
        ) from None
    behavior = BehaviorGraph(tuple(Precedence(a, b) for a, b in pairs))
    return replace(model, events=tuple(events), behavior=behavior)


def strip_events(model: Model) -> Model:
    return replace(model, events=(), behavior=None)


@dataclass(frozen=True)
class CoverageReport:
    covered: int
    total: int
    uncovered: Tuple[RegionItem, ...]

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.covered, self.total) if self.total else Fraction(1)


def static_elements(statics: StaticModel) -> List[RegionItem]:
    return [*statics.stage_refs(), *statics.flows, *statics.triggers]


def region_coverage(model: Model) -> CoverageReport:
    """Which stages, flows and triggers fall inside no event region."""
    covered_keys = set()
    for ev in model.events:
        covered_keys |= ev.region_key()
    elements = static_elements(model.statics)
    missing = tuple(item for item in elements if item_key(item) not in covered_keys)
    return CoverageReport(len(elements) - len(missing), len(elements), missing)
