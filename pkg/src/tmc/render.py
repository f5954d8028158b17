"""DOT text for the static, dynamic and behavior views of a model."""

from __future__ import annotations

from enum import Enum
from typing import List, Sequence

from tmc import errors as E
from tmc.errors import TMError, has_errors
from tmc.metamodel import Flow, Model, Path, StageRef, Thimac, Trigger
from tmc.validator import validate

INDENT = "  "


class View(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    BEHAVIOR = "behavior"


def q(text: str) -> str:
    """Quote a DOT id or label."""
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _path_id(path: Path) -> str:
    return ".".join(path)


def _edge_attrs(edge) -> str:
    return "[style=dashed]" if isinstance(edge, Trigger) else "[style=solid]"


def _thimac_cluster(t: Thimac, path: Path, depth: int) -> List[str]:
    pad = INDENT * depth
    pid = _path_id(path)
    lines = [f"{pad}subgraph {q('cluster_' + pid)} {{", f"{pad}{INDENT}label={q(t.name)};"]
    for kind in t.stages:
        lines.append(f"{pad}{INDENT}{q(str(StageRef(path, kind)))} [label={q(kind.value)}];")
    if t.has_memory:
        lines.append(f"{pad}{INDENT}{q(pid + '/memory')} [shape=cylinder, label=\"memory\"];")
    for sub in t.subthimacs:
        lines += _thimac_cluster(sub, path + (sub.name,), depth + 1)
    lines.append(f"{pad}}}")
    return lines


def _static_body(model: Model) -> List[str]:
    s = model.statics
    lines: List[str] = []
    for t in s.thimacs:
        lines += _thimac_cluster(t, (t.name,), 1)
    for e in s.edges():
        lines.append(f"{INDENT}{q(str(e.source))} -> {q(str(e.target))} {_edge_attrs(e)};")
    return lines


def _event_cluster(ev) -> List[str]:
    prefix = ev.id + "/"
    nodes: List[StageRef] = []
    edges = []
    for item in ev.region:
        if isinstance(item, (Flow, Trigger)):
            edges.append(item)
            candidates: Sequence[StageRef] = (item.source, item.target)
        else:
            candidates = (item,)
        for ref in candidates:
            if ref not in nodes:
                nodes.append(ref)
    title = ev.id if ev.label is None else f"{ev.id}: {ev.label}"
    lines = [
        f"{INDENT}subgraph {q('cluster_event_' + ev.id)} {{",
        f"{INDENT * 2}label={q(title)};",
        f"{INDENT * 2}style=rounded;",
    ]
    for ref in nodes:
        lines.append(f"{INDENT * 2}{q(prefix + str(ref))} [label={q(ref.kind.value)}];")
    for e in edges:
        lines.append(f"{INDENT * 2}{q(prefix + str(e.source))} -> {q(prefix + str(e.target))} {_edge_attrs(e)};")
    lines.append(f"{INDENT}}}")
    return lines


def _behavior_body(model: Model) -> List[str]:
    lines = [f"{INDENT}node [shape=box];"]
    for ev in model.events:
        label = ev.id if ev.label is None else f"{ev.id}\n{ev.label}"
        lines.append(f"{INDENT}{q(ev.id)} [label={q(label)}];")
    for p in model.behavior.precedence:
        lines.append(f"{INDENT}{q(p.before)} -> {q(p.after)} [style=solid];")
    for r in model.behavior.repeats:
        lines.append(f"{INDENT}{q(r.event)} -> {q(r.event)} [label={q(f'×{r.count}')}];")
    return lines


def render(model: Model, view: View | str) -> str:
    view = View(view)
    diags = validate(model)
    if has_errors(diags):
        raise TMError(E.NOT_VALIDATED, f"model {model.name} has validation errors", diags)
    if view is View.DYNAMIC and not model.events:
        raise TMError(E.MISSING_VIEW_DATA, f"model {model.name} declares no events to overlay")
    if view is View.BEHAVIOR and model.behavior is None:
        raise TMError(E.MISSING_VIEW_DATA, f"model {model.name} has no behavior block")

    lines = [f"digraph {q(model.name)} {{"]
    if view is View.BEHAVIOR:
        lines += _behavior_body(model)
    else:
        lines += _static_body(model)
        if view is View.DYNAMIC:
            for ev in model.events:
                lines += _event_cluster(ev)
    lines.append("}")
    return "\n".join(lines) + "\n"
