"""Abstract syntax for thinging machine (TM) models and ER models.

Every value here is immutable. Collections are tuples kept in declaration
order, which downstream passes use as their tie-breaker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Tuple, Union

from tmc.errors import DANGLING_REF, Location, TMError


class StageKind(Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"

    def __str__(self) -> str:
        return self.value


Path = Tuple[str, ...]


def _loc_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Thimac:
    name: str
    stages: Tuple[StageKind, ...] = ()
    subthimacs: Tuple["Thimac", ...] = ()
    has_memory: bool = False
    loc: Optional[Location] = _loc_field()

    def child(self, name: str) -> Optional["Thimac"]:
        for sub in self.subthimacs:
            if sub.name == name:
                return sub
        return None

    @property
    def is_create_only_leaf(self) -> bool:
        return not self.subthimacs and self.stages == (StageKind.CREATE,)


@dataclass(frozen=True)
class StageRef:
    path: Path
    kind: StageKind

    def __str__(self) -> str:
        return ".".join(self.path + (self.kind.value,))

    @property
    def machine(self) -> str:
        return ".".join(self.path)

    @classmethod
    def parse(cls, dotted: str) -> "StageRef":
        *path, kind = dotted.split(".")
        if not path:
            raise ValueError(f"stage reference {dotted!r} names no thimac")
        return cls(tuple(path), StageKind(kind))

    def sort_key(self) -> tuple:
        return (self.path, self.kind.value)


@dataclass(frozen=True)
class Flow:
    source: StageRef
    target: StageRef
    loc: Optional[Location] = _loc_field()

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class Trigger:
    source: StageRef
    target: StageRef
    loc: Optional[Location] = _loc_field()

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


Edge = Union[Flow, Trigger]
RegionItem = Union[StageRef, Flow, Trigger]

DURATION_UNITS = {"ticks": 1, "min": 1, "h": 60}


@dataclass(frozen=True)
class Duration:
    value: Decimal
    unit: str = "ticks"

    @property
    def ticks(self) -> int:
        scaled = self.value * DURATION_UNITS[self.unit]
        return int(scaled)

    @property
    def is_whole(self) -> bool:
        scaled = self.value * DURATION_UNITS[self.unit]
        return scaled == scaled.to_integral_value()

    def __str__(self) -> str:
        return f"{self.value} {self.unit}"


@dataclass(frozen=True)
class Event:
    id: str
    region: Tuple[RegionItem, ...] = ()
    label: Optional[str] = None
    time: Optional[str] = None
    duration: Optional[Duration] = None
    loc: Optional[Location] = _loc_field()

    def region_stages(self) -> Tuple[StageRef, ...]:
        return tuple(item for item in self.region if isinstance(item, StageRef))

    def region_key(self) -> frozenset:
        """Order- and location-insensitive view of the region."""
        return frozenset(item_key(item) for item in self.region)


def item_key(item: RegionItem) -> tuple:
    """Location-insensitive identity of a region item."""
    if isinstance(item, StageRef):
        return ("stage", str(item))
    kind = "flow" if isinstance(item, Flow) else "trigger"
    return (kind, str(item.source), str(item.target))


@dataclass(frozen=True)
class Precedence:
    before: str
    after: str
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class Repeat:
    event: str
    count: int = 2
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class BehaviorGraph:
    """Chronology over the enclosing model's events."""

    precedence: Tuple[Precedence, ...] = ()
    repeats: Tuple[Repeat, ...] = ()

    def repeat_counts(self) -> Dict[str, int]:
        return {r.event: r.count for r in self.repeats}

    def pairs(self) -> Tuple[Tuple[str, str], ...]:
        return tuple((p.before, p.after) for p in self.precedence)


@dataclass(frozen=True)
class StaticModel:
    name: str
    thimacs: Tuple[Thimac, ...] = ()
    flows: Tuple[Flow, ...] = ()
    triggers: Tuple[Trigger, ...] = ()
    loc: Optional[Location] = _loc_field()

    @cached_property
    def _index(self) -> Dict[Path, Thimac]:
        table: Dict[Path, Thimac] = {}
        for path, thimac in walk_thimacs(self.thimacs):
            table.setdefault(path, thimac)
        return table

    def thimac_at(self, path: Path) -> Optional[Thimac]:
        return self._index.get(tuple(path))

    def paths(self) -> List[Path]:
        return list(self._index)

    def stage_refs(self) -> List[StageRef]:
        """All declared (thimac, stage) pairs, preorder, stages in declared order."""
        return [StageRef(path, kind) for path, t in walk_thimacs(self.thimacs) for kind in t.stages]

    def edges(self) -> Tuple[Edge, ...]:
        return self.flows + self.triggers


@dataclass(frozen=True)
class Model:
    statics: StaticModel
    events: Tuple[Event, ...] = ()
    behavior: Optional[BehaviorGraph] = None

    @property
    def name(self) -> str:
        return self.statics.name

    def event(self, event_id: str) -> Optional[Event]:
        for ev in self.events:
            if ev.id == event_id:
                return ev
        return None


# --- ER -------------------------------------------------------------------


class Cardinality(Enum):
    ONE = "one"
    MANY = "many"


@dataclass(frozen=True)
class ErAttribute:
    name: str
    is_key: bool = False
    is_temporal: bool = False
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class ErEntity:
    name: str
    attributes: Tuple[ErAttribute, ...] = ()
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class ErRole:
    entity: str
    cardinality: Cardinality
    role_name: Optional[str] = None
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class ErRelationship:
    name: str
    roles: Tuple[ErRole, ...]
    attributes: Tuple[ErAttribute, ...] = ()
    loc: Optional[Location] = _loc_field()


@dataclass(frozen=True)
class ErModel:
    name: str
    entities: Tuple[ErEntity, ...] = ()
    relationships: Tuple[ErRelationship, ...] = ()
    loc: Optional[Location] = _loc_field()

    def entity(self, name: str) -> Optional[ErEntity]:
        for ent in self.entities:
            if ent.name == name:
                return ent
        return None


# --- structural queries ---------------------------------------------------


def walk_thimacs(roots: Tuple[Thimac, ...], prefix: Path = ()) -> Iterator[Tuple[Path, Thimac]]:
    """Preorder traversal yielding (path, thimac)."""
    for t in roots:
        path = prefix + (t.name,)
        yield path, t
        yield from walk_thimacs(t.subthimacs, path)


def resolve(model: StaticModel, ref: StageRef) -> Tuple[Thimac, StageKind]:
    thimac = model.thimac_at(ref.path)
    if thimac is None:
        raise TMError(DANGLING_REF, f"no thimac named {ref.machine}")
    if ref.kind not in thimac.stages:
        raise TMError(DANGLING_REF, f"thimac {ref.machine} declares no {ref.kind.value} stage")
    return thimac, ref.kind


def resolves(model: StaticModel, ref: StageRef) -> bool:
    thimac = model.thimac_at(ref.path)
    return thimac is not None and ref.kind in thimac.stages


def same_machine(model: StaticModel, a: StageRef, b: StageRef) -> bool:
    resolve(model, a)
    resolve(model, b)
    return a.path == b.path


def is_ancestor_or_self(ancestor: Path, path: Path) -> bool:
    return path[: len(ancestor)] == ancestor


@dataclass(frozen=True)
class StageGraph:
    nodes: Tuple[StageRef, ...]
    edges: Tuple[Tuple[StageRef, StageRef, str], ...]  # (source, target, "flow" | "trigger")

    def successors(self, node: StageRef) -> List[StageRef]:
        return [t for s, t, _ in self.edges if s == node]


def stage_graph(model: StaticModel) -> StageGraph:
    for edge in model.edges():
        resolve(model, edge.source)
        resolve(model, edge.target)
    edges = tuple((f.source, f.target, "flow") for f in model.flows) + tuple(
        (t.source, t.target, "trigger") for t in model.triggers
    )
    return StageGraph(tuple(model.stage_refs()), edges)
