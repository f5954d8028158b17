"""Flow-law checks over parsed models."""

from __future__ import annotations

from graphlib import CycleError, TopologicalSorter
from typing import Dict, List

from tmc import errors as E
from tmc.errors import Diagnostic
from tmc.metamodel import (
    ErModel,
    Event,
    Flow,
    Model,
    StageKind,
    StaticModel,
    Trigger,
    resolves,
)

K = StageKind

# Directed pairs permitted for a flow that stays inside one thimac.
INTRA_ADJACENCY = frozenset(
    {
        (K.CREATE, K.PROCESS),
        (K.CREATE, K.RELEASE),
        (K.PROCESS, K.RELEASE),
        (K.RECEIVE, K.PROCESS),
        (K.RECEIVE, K.RELEASE),
        (K.RELEASE, K.TRANSFER),
        (K.TRANSFER, K.RECEIVE),
    }
)


def _edge_key(edge) -> tuple:
    return (str(edge.source), str(edge.target))


def _check_edge(statics: StaticModel, edge, what: str, out: List[Diagnostic]) -> bool:
    """Report dangling endpoints and self edges; True when the edge is usable."""
    ok = True
    for end in (edge.source, edge.target):
        if not resolves(statics, end):
            out.append(Diagnostic.error(E.DANGLING_REF, f"{what} endpoint {end} does not resolve", edge.loc))
            ok = False
    if ok and edge.source == edge.target:
        out.append(Diagnostic.error(E.SELF_FLOW, f"{what} {edge} connects a stage to itself", edge.loc))
        ok = False
    return ok


def _check_flow_law(flow: Flow, out: List[Diagnostic]) -> None:
    pair = (flow.source.kind, flow.target.kind)
    if flow.source.path == flow.target.path:
        if pair not in INTRA_ADJACENCY:
            out.append(
                Diagnostic.error(
                    E.ILLEGAL_INTRA_ADJACENCY,
                    f"flow {flow} is not a permitted succession inside {flow.source.machine}",
                    flow.loc,
                )
            )
    elif pair != (K.TRANSFER, K.TRANSFER):
        out.append(
            Diagnostic.error(
                E.ILLEGAL_INTER_FLOW,
                f"flow {flow} crosses machines without going transfer -> transfer",
                flow.loc,
            )
        )


def _check_region(statics: StaticModel, ev: Event, flows: set, triggers: set, out: List[Diagnostic]) -> None:
    if not ev.region:
        out.append(Diagnostic.warning(E.EMPTY_REGION, f"event {ev.id} has an empty region", ev.loc))
    for item in ev.region:
        loc = getattr(item, "loc", None) or ev.loc
        if isinstance(item, (Flow, Trigger)):
            what = "flow" if isinstance(item, Flow) else "trigger"
            dangling = [end for end in (item.source, item.target) if not resolves(statics, end)]
            for end in dangling:
                out.append(
                    Diagnostic.error(E.DANGLING_REF, f"event {ev.id} region {what} endpoint {end} does not resolve", loc)
                )
            declared = flows if isinstance(item, Flow) else triggers
            if not dangling and _edge_key(item) not in declared:
                out.append(
                    Diagnostic.error(
                        E.REGION_NOT_SUBSET, f"event {ev.id} region {what} {item} is not in the static model", loc
                    )
                )
        elif not resolves(statics, item):
            out.append(Diagnostic.error(E.DANGLING_REF, f"event {ev.id} region stage {item} does not resolve", loc))


def _check_behavior(model: Model, out: List[Diagnostic]) -> None:
    behavior = model.behavior
    if behavior is None:
        return
    declared = {ev.id for ev in model.events}
    graph: Dict[str, List[str]] = {}
    edge_loc = {}
    for p in behavior.precedence:
        missing = [eid for eid in (p.before, p.after) if eid not in declared]
        for eid in missing:
            out.append(Diagnostic.error(E.UNDECLARED_EVENT, f"behavior references undeclared event {eid}", p.loc))
        if missing:
            continue
        if p.before == p.after:
            out.append(
                Diagnostic.error(
                    E.CYCLIC_BEHAVIOR, f"event {p.before} precedes itself; use 'repeat' for repetition", p.loc
                )
            )
            continue
        graph.setdefault(p.after, []).append(p.before)
        graph.setdefault(p.before, [])
        edge_loc.setdefault((p.before, p.after), p.loc)
    for r in behavior.repeats:
        if r.event not in declared:
            out.append(Diagnostic.error(E.UNDECLARED_EVENT, f"repeat references undeclared event {r.event}", r.loc))
    try:
        TopologicalSorter(graph).prepare()
    except CycleError as exc:
        # graphlib lists each node as a predecessor of the next, so the cycle reads forwards.
        forward = list(exc.args[1])
        locs = [edge_loc.get((a, b)) for a, b in zip(forward, forward[1:])]
        loc = min((l for l in locs if l), default=None)
        out.append(
            Diagnostic.error(E.CYCLIC_BEHAVIOR, "precedence cycle " + " -> ".join(forward), loc)
        )


def validate(model: Model) -> List[Diagnostic]:
    """Return every diagnostic for ``model``, sorted by location then code."""
    statics = model.statics
    out: List[Diagnostic] = []
    for flow in statics.flows:
        if _check_edge(statics, flow, "flow", out):
            _check_flow_law(flow, out)
    for trig in statics.triggers:
        if _check_edge(statics, trig, "trigger", out) and trig.source.path == trig.target.path:
            out.append(
                Diagnostic.warning(
                    E.SAME_MACHINE_TRIGGER, f"trigger {trig} stays inside {trig.source.machine}", trig.loc
                )
            )
    flows = {_edge_key(f) for f in statics.flows}
    triggers = {_edge_key(t) for t in statics.triggers}
    for ev in model.events:
        _check_region(statics, ev, flows, triggers, out)
    _check_behavior(model, out)
    return sorted(out, key=Diagnostic.sort_key)


def validate_er(er: ErModel) -> List[Diagnostic]:
    """Checks beyond what the ER parser enforces."""
    out = []
    for ent in er.entities:
        for attr in ent.attributes:
            if attr.is_temporal:
                out.append(
                    Diagnostic.warning(
                        E.TEMPORAL_ENTITY_ATTR,
                        f"temporal flag on entity attribute {ent.name}.{attr.name} has no effect",
                        attr.loc,
                    )
                )
    return sorted(out, key=Diagnostic.sort_key)
