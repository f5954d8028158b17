"""Turn ER relationships into TM flows and events, and back again.

``dissipate`` rewrites an ER model as thimacs: entities become machines,
and each relationship disappears into the flows that connect them.
``shorthand`` goes the other direction, collapsing flow chains of a TM
model into ER relationships.
"""

from __future__ import annotations

from dataclasses import replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

from tmc import errors as E
from tmc.errors import TMError, has_errors
from tmc.eventizer import Chain, eventize, flow_chains
from tmc.frontend.er import ER_KEYWORDS
from tmc.frontend.lexer import IDENT_RE
from tmc.metamodel import (
    Cardinality,
    ErAttribute,
    ErEntity,
    ErModel,
    ErRelationship,
    ErRole,
    Flow,
    Model,
    Path,
    StageKind,
    StageRef,
    StaticModel,
    Thimac,
    Trigger,
    walk_thimacs,
)
from tmc.validator import validate

K = StageKind


class Strategy(Enum):
    FLOW_MEMBERSHIP = "flow"
    REIFY = "reify"


ENTITY_STAGES = (K.CREATE, K.RELEASE, K.TRANSFER)
MEMBERSHIP_STAGES = (K.TRANSFER, K.RECEIVE)
REIFIED_STAGES = (K.CREATE, K.PROCESS, K.RECEIVE, K.TRANSFER)
ROLE_STAGES = (K.TRANSFER, K.RECEIVE, K.RELEASE)
SET_SUFFIX = "_set"


def _ref(path: Sequence[str], kind: K) -> StageRef:
    return StageRef(tuple(path), kind)


def _unique(name: str, taken: Set[str]) -> str:
    candidate, n = name, 2
    while candidate in taken:
        candidate = f"{name}{n}"
        n += 1
    taken.add(candidate)
    return candidate


def _capitalize(name: str) -> str:
    return name[:1].upper() + name[1:]


def _decapitalize(name: str) -> str:
    return name[:1].lower() + name[1:]


def _leaf(name: str) -> Thimac:
    return Thimac(name, (K.CREATE,))


class _Builder:
    """Accumulates thimacs and edges; nested thimacs are added by path."""

    def __init__(self, er: ErModel):
        self.roots: Dict[str, dict] = {}
        self.flows: List[Flow] = []
        self.triggers: List[Trigger] = []
        self._seen: Set[Tuple[str, str, str]] = set()
        for ent in er.entities:
            self.add((ent.name,), ENTITY_STAGES)
            for attr in ent.attributes:
                self.add((ent.name, attr.name), (K.CREATE,))

    def add(self, path: Path, stages: Sequence[K]) -> dict:
        level = self.roots
        node = None
        for name in path:
            node = level.setdefault(name, {"stages": [], "subs": {}})
            level = node["subs"]
        for k in stages:
            if k not in node["stages"]:
                node["stages"].append(k)
        return node

    def children(self, path: Path) -> Set[str]:
        level = self.roots
        for name in path:
            level = level[name]["subs"]
        return set(level)

    def flow(self, src: StageRef, dst: StageRef) -> Flow:
        key = ("flow", str(src), str(dst))
        f = Flow(src, dst)
        if key not in self._seen:
            self._seen.add(key)
            self.flows.append(f)
        return f

    def trigger(self, src: StageRef, dst: StageRef) -> None:
        key = ("trigger", str(src), str(dst))
        if key not in self._seen:
            self._seen.add(key)
            self.triggers.append(Trigger(src, dst))

    def entity_outflow(self, name: str) -> StageRef:
        self.flow(_ref((name,), K.CREATE), _ref((name,), K.RELEASE))
        self.flow(_ref((name,), K.RELEASE), _ref((name,), K.TRANSFER))
        return _ref((name,), K.TRANSFER)

    def build(self, name: str) -> StaticModel:
        def to_thimac(tname: str, node: dict) -> Thimac:
            ordered = tuple(k for k in K if k in node["stages"])
            subs = tuple(to_thimac(n, child) for n, child in node["subs"].items())
            return Thimac(tname, ordered, subs)

        thimacs = tuple(to_thimac(n, node) for n, node in self.roots.items())
        return StaticModel(name, thimacs, tuple(self.flows), tuple(self.triggers))


def _membership(b: _Builder, rel: ErRelationship) -> Tuple[Flow, List[str]]:
    if len(rel.roles) != 2:
        raise TMError(
            E.UNSUPPORTED_ARITY,
            f"relationship {rel.name} has {len(rel.roles)} roles; membership flow handles binary relationships only",
        )
    first, second = rel.roles
    if first.cardinality is Cardinality.ONE and second.cardinality is Cardinality.MANY:
        source, sink = second, first
    else:
        source, sink = first, second
    set_name = _unique(rel.name + SET_SUFFIX, b.children((sink.entity,)))
    set_path = (sink.entity, set_name)
    b.add(set_path, MEMBERSHIP_STAGES)
    for attr in rel.attributes:
        if not attr.is_temporal:
            b.add(set_path + (attr.name,), (K.CREATE,))
    gate = b.entity_outflow(source.entity)
    inter = b.flow(gate, _ref(set_path, K.TRANSFER))
    b.flow(_ref(set_path, K.TRANSFER), _ref(set_path, K.RECEIVE))
    return inter, [a.name for a in rel.attributes if a.is_temporal]


def _reify(b: _Builder, rel: ErRelationship, taken: Set[str]) -> Tuple[Flow, List[str]]:
    r = rel.name
    b.add((r,), REIFIED_STAGES)
    sub_names: Set[str] = set()
    for attr in rel.attributes:
        if not attr.is_temporal:
            b.add((r, attr.name), (K.CREATE,))
            sub_names.add(attr.name)
    r_gate = _ref((r,), K.TRANSFER)
    first_inter: Optional[Flow] = None
    products = []
    for role in rel.roles:
        gate = b.entity_outflow(role.entity)
        if role.role_name is None:
            f = b.flow(gate, r_gate)
        else:
            role_name = _capitalize(role.role_name)
            if role_name in taken:
                role_name = _unique(f"{r}_{role.role_name}", taken)
            else:
                taken.add(role_name)
            b.add((role_name,), ROLE_STAGES)
            role_gate = _ref((role_name,), K.TRANSFER)
            b.flow(gate, role_gate)
            b.flow(role_gate, _ref((role_name,), K.RECEIVE))
            b.flow(_ref((role_name,), K.RECEIVE), _ref((role_name,), K.RELEASE))
            b.flow(_ref((role_name,), K.RELEASE), role_gate)
            f = b.flow(role_gate, r_gate)
            products.append((role_name, _unique(_capitalize(role.role_name) + "hood", sub_names)))
        first_inter = first_inter or f
    b.flow(r_gate, _ref((r,), K.RECEIVE))
    b.flow(_ref((r,), K.RECEIVE), _ref((r,), K.PROCESS))
    b.trigger(_ref((r,), K.PROCESS), _ref((r,), K.CREATE))
    # Each named role receives its own half of the relation back from the process.
    for role_name, product in products:
        p = (r, product)
        b.add(p, ENTITY_STAGES)
        b.trigger(_ref((r,), K.PROCESS), _ref(p, K.CREATE))
        b.flow(_ref(p, K.CREATE), _ref(p, K.RELEASE))
        b.flow(_ref(p, K.RELEASE), _ref(p, K.TRANSFER))
        b.flow(_ref(p, K.TRANSFER), _ref((role_name,), K.TRANSFER))
    return first_inter, [a.name for a in rel.attributes if a.is_temporal]


def _attach_times(model: Model, wanted: List[Tuple[Flow, List[str]]]) -> Model:
    events = list(model.events)
    for inter, names in wanted:
        if not names:
            continue
        for i, ev in enumerate(events):
            if inter in ev.region:
                stamp = ", ".join(names)
                events[i] = replace(ev, time=stamp if ev.time is None else f"{ev.time}, {stamp}")
                break
    return replace(model, events=tuple(events))


def dissipate(er: ErModel, strategy: Strategy) -> Model:
    """Rewrite ``er`` as a TM model with derived events and chronology."""
    b = _Builder(er)
    taken = {e.name for e in er.entities} | {r.name for r in er.relationships}
    wanted = []
    for rel in er.relationships:
        if strategy is Strategy.FLOW_MEMBERSHIP:
            wanted.append(_membership(b, rel))
        else:
            wanted.append(_reify(b, rel, taken))
    model = eventize(Model(b.build(er.name)))
    return _attach_times(model, wanted)


# --- shorthand ------------------------------------------------------------


def _root(path: Path) -> str:
    return path[0]


def _is_reifying(statics: StaticModel, root: str) -> bool:
    for t in statics.triggers:
        src, dst = t.source, t.target
        if (
            src.kind is K.PROCESS
            and dst.kind is K.CREATE
            and _root(src.path) == root
            and _root(dst.path) == root
        ):
            return True
    return False


def _attributes_under(statics: StaticModel, path: Path) -> Tuple[ErAttribute, ...]:
    targets = {e.target.path for e in statics.edges()}
    thimac = statics.thimac_at(path)
    attrs = []
    for sub_path, sub in walk_thimacs(thimac.subthimacs, path):
        if sub.is_create_only_leaf and sub_path not in targets:
            attrs.append(ErAttribute(sub.name))
    return tuple(attrs)


def _temporal_from_events(model: Model, chain: Chain) -> List[str]:
    for ev in model.events:
        if ev.time and any(f in ev.region for f in chain.inter_flows):
            parts = [p.strip() for p in ev.time.split(",")]
            if all(IDENT_RE.match(p) for p in parts):
                return parts
    return []


def _merge_temporal(attrs: Tuple[ErAttribute, ...], names: List[str]) -> Tuple[ErAttribute, ...]:
    have = {a.name for a in attrs}
    extra = []
    for n in names:
        if n not in have:
            have.add(n)
            extra.append(ErAttribute(n, is_temporal=True))
    return attrs + tuple(extra)


def shorthand(model: Model) -> ErModel:
    """Collapse flow chains into an ER model.

    A root whose process triggers a creation inside itself and that is reached
    by two or more chains reads as a reified relationship; each incoming chain
    is one of its roles, named after the first thimac it relays through.
    Any other chain becomes a binary relationship from its origin (many) to
    the thimac it ends in (one), named after that thimac when it is nested,
    else ``<Origin>_to_<Target>``.
    """
    diags = validate(model)
    if has_errors(diags):
        raise TMError(E.NOT_VALIDATED, f"model {model.name} has validation errors", diags)
    statics = model.statics
    chains = flow_chains(statics)
    roots = [t.name for t in statics.thimacs]

    incoming: Dict[str, List[Chain]] = {}
    for c in chains:
        root = _root(c.target)
        if c.target == (root,) and _root(c.origin) != root and _is_reifying(statics, root):
            incoming.setdefault(root, []).append(c)
    # A candidate fed by another candidate cannot name it as a participant.
    candidates = set(incoming)
    relationship_roots = {
        r for r, cs in incoming.items() if sum(_root(c.origin) not in candidates for c in cs) >= 2
    }

    role_chains = [c for c in chains if _root(c.target) in relationship_roots and c.target == (_root(c.target),)]
    role_chains = [c for c in role_chains if _root(c.origin) not in candidates]
    binary = [
        c
        for c in chains
        if _root(c.origin) not in relationship_roots and _root(c.target) not in relationship_roots
    ]
    considered = role_chains + binary

    ends = {_root(c.origin) for c in considered} | {_root(c.target) for c in considered}
    relay_roots = {_root(p) for c in considered for p in c.relays}
    skip = relationship_roots | (relay_roots - ends)
    entity_names = [r for r in roots if r not in skip]
    entities = tuple(ErEntity(n, _attributes_under(statics, (n,))) for n in entity_names)

    names_taken = set(entity_names)
    rels: List[ErRelationship] = []
    emitted: Set[str] = set()
    for c in chains:
        root = _root(c.target)
        if c in role_chains:
            if root in emitted:
                continue
            emitted.add(root)
            roles = []
            used_roles: Set[str] = set()
            temporal: List[str] = []
            for rc in incoming[root]:
                if _root(rc.origin) in candidates:
                    continue
                role_name = None
                if rc.relays:
                    candidate = _decapitalize(rc.relays[0][-1])
                    if candidate not in used_roles and candidate not in ER_KEYWORDS:
                        used_roles.add(candidate)
                        role_name = candidate
                roles.append(ErRole(_root(rc.origin), Cardinality.ONE, role_name))
                temporal += _temporal_from_events(model, rc)
            attrs = _merge_temporal(_attributes_under(statics, (root,)), temporal)
            rels.append(ErRelationship(_unique(root, names_taken), tuple(roles), attrs))
        elif c in binary:
            nested = len(c.target) > 1
            name = c.target[-1] if nested else f"{_root(c.origin)}_to_{root}"
            attrs = _attributes_under(statics, c.target) if nested else ()
            attrs = _merge_temporal(attrs, _temporal_from_events(model, c))
            roles = (
                ErRole(_root(c.origin), Cardinality.MANY),
                ErRole(root, Cardinality.ONE),
            )
            rels.append(ErRelationship(_unique(name, names_taken), roles, attrs))
    return ErModel(statics.name, entities, tuple(rels))
