"""Canonical text and JSON forms for TM and ER models."""

from __future__ import annotations

import json
from typing import Any, Dict, List

from tmc.metamodel import (
    ErAttribute,
    ErModel,
    Event,
    Flow,
    Model,
    RegionItem,
    StageRef,
    Thimac,
    Trigger,
)

INDENT = "  "


def quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _thimac_lines(t: Thimac, depth: int) -> List[str]:
    pad = INDENT * depth
    head = f"{pad}thimac {t.name}{' memory' if t.has_memory else ''} {{"
    lines = [head]
    lines += [f"{pad}{INDENT}stage {k.value};" for k in t.stages]
    for sub in t.subthimacs:
        lines += _thimac_lines(sub, depth + 1)
    lines.append(f"{pad}}}")
    return lines


def _region_item(item: RegionItem) -> str:
    if isinstance(item, StageRef):
        return f"{item};"
    keyword = "flow" if isinstance(item, Flow) else "trigger"
    return f"{keyword} {item.source} -> {item.target};"


def _event_lines(ev: Event) -> List[str]:
    label = f" {quote(ev.label)}" if ev.label is not None else ""
    lines = [f"{INDENT}event {ev.id}{label} {{", f"{INDENT * 2}region {{"]
    lines += [f"{INDENT * 3}{_region_item(item)}" for item in ev.region]
    lines.append(f"{INDENT * 2}}}")
    if ev.time is not None:
        lines.append(f"{INDENT * 2}time {quote(ev.time)};")
    if ev.duration is not None:
        lines.append(f"{INDENT * 2}duration {ev.duration.value} {ev.duration.unit};")
    lines.append(f"{INDENT}}}")
    return lines


def serialize_tm(model: Model) -> str:
    s = model.statics
    lines = [f"model {s.name} {{"]
    for t in s.thimacs:
        lines += _thimac_lines(t, 1)
    lines += [f"{INDENT}flow {f.source} -> {f.target};" for f in s.flows]
    lines += [f"{INDENT}trigger {t.source} -> {t.target};" for t in s.triggers]
    for ev in model.events:
        lines += _event_lines(ev)
    if model.behavior is not None:
        lines.append(f"{INDENT}behavior {{")
        lines += [f"{INDENT * 2}{p.before} -> {p.after};" for p in model.behavior.precedence]
        lines += [f"{INDENT * 2}repeat {r.event} {r.count};" for r in model.behavior.repeats]
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _attr_line(a: ErAttribute, depth: int) -> str:
    flags = (" key" if a.is_key else "") + (" temporal" if a.is_temporal else "")
    return f"{INDENT * depth}attr {a.name}{flags};"


def serialize_er(er: ErModel) -> str:
    lines = [f"erd {er.name} {{"]
    for ent in er.entities:
        lines.append(f"{INDENT}entity {ent.name} {{")
        lines += [_attr_line(a, 2) for a in ent.attributes]
        lines.append(f"{INDENT}}}")
    for rel in er.relationships:
        roles = ", ".join(
            " ".join(p for p in (r.entity, r.role_name, r.cardinality.value) if p) for r in rel.roles
        )
        head = f"{INDENT}relationship {rel.name} ({roles})"
        if rel.attributes:
            lines.append(head + " {")
            lines += [_attr_line(a, 2) for a in rel.attributes]
            lines.append(f"{INDENT}}}")
        else:
            lines.append(head)
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- JSON -----------------------------------------------------------------


def _thimac_dict(t: Thimac) -> Dict[str, Any]:
    return {
        "name": t.name,
        "memory": t.has_memory,
        "stages": [k.value for k in t.stages],
        "subthimacs": [_thimac_dict(s) for s in t.subthimacs],
    }


def _edge_dict(e) -> Dict[str, str]:
    return {"source": str(e.source), "target": str(e.target)}


def _region_dict(item: RegionItem) -> Dict[str, Any]:
    if isinstance(item, StageRef):
        return {"stage": str(item)}
    if isinstance(item, Trigger):
        return {"trigger": _edge_dict(item)}
    return {"flow": _edge_dict(item)}


def model_to_dict(model: Model) -> Dict[str, Any]:
    s = model.statics
    behavior = None
    if model.behavior is not None:
        behavior = {
            "precedence": [[p.before, p.after] for p in model.behavior.precedence],
            "repeats": {r.event: r.count for r in model.behavior.repeats},
        }
    return {
        "model": s.name,
        "thimacs": [_thimac_dict(t) for t in s.thimacs],
        "flows": [_edge_dict(f) for f in s.flows],
        "triggers": [_edge_dict(t) for t in s.triggers],
        "events": [
            {
                "id": ev.id,
                "label": ev.label,
                "region": [_region_dict(i) for i in ev.region],
                "time": ev.time,
                "duration": None
                if ev.duration is None
                else {"value": str(ev.duration.value), "unit": ev.duration.unit, "ticks": ev.duration.ticks},
            }
            for ev in model.events
        ],
        "behavior": behavior,
    }


def _attr_dict(a: ErAttribute) -> Dict[str, Any]:
    return {"name": a.name, "key": a.is_key, "temporal": a.is_temporal}


def er_to_dict(er: ErModel) -> Dict[str, Any]:
    return {
        "erd": er.name,
        "entities": [{"name": e.name, "attributes": [_attr_dict(a) for a in e.attributes]} for e in er.entities],
        "relationships": [
            {
                "name": r.name,
                "roles": [
                    {"entity": ro.entity, "role": ro.role_name, "cardinality": ro.cardinality.value} for ro in r.roles
                ],
                "attributes": [_attr_dict(a) for a in r.attributes],
            }
            for r in er.relationships
        ],
    }


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
