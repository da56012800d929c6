"""Data model for declarative scenario documents.

A document describes one functional test item: the map it runs on, the
ego route, the cast of actors, event-triggered maneuvers, environment
tags and the parameters that vary between concrete instances. Scalar
fields may hold a "$name" placeholder bound at instantiation time.
"""

from __future__ import annotations

from dataclasses import dataclass

CATEGORIES = (
    "adaptive_cruise_control",
    "following_driving",
    "emergency_braking",
    "traffic_sign",
    "overtaking",
    "parking",
    "merging",
)

ACTOR_KINDS = ("ego", "vehicle", "pedestrian", "bicycle", "static_obstacle", "emergency_vehicle")
BEHAVIORS = ("scripted", "idm_follow", "stationary")
TRIGGER_KINDS = ("time", "ego_gap", "ego_station")
ACTION_KINDS = ("lane_change", "decelerate", "cross_road", "stop", "set_speed")
TIMES_OF_DAY = ("noon", "sunset", "night")
WEATHERS = ("clear", "rain", "fog", "snow")

Scalar = float | str


@dataclass(frozen=True)
class ParameterDecl:
    name: str
    unit: str
    low: float
    high: float
    default: float


@dataclass(frozen=True)
class ActorSpec:
    actor_id: str
    kind: str
    initial_pose: tuple[Scalar, Scalar, Scalar]
    initial_speed: Scalar
    dimensions: tuple[float, float, float]
    behavior: str


@dataclass(frozen=True)
class TriggerCondition:
    kind: str
    threshold: Scalar


@dataclass(frozen=True)
class ManeuverAction:
    kind: str
    params: tuple[tuple[str, Scalar], ...] = ()

    def get(self, name: str, default: Scalar | None = None) -> Scalar | None:
        for key, value in self.params:
            if key == name:
                return value
        return default


@dataclass(frozen=True)
class TriggeredManeuver:
    actor_id: str
    trigger: TriggerCondition
    action: ManeuverAction


@dataclass(frozen=True)
class EnvironmentSpec:
    time_of_day: str = "noon"
    weather: str = "clear"


@dataclass(frozen=True)
class ScenarioDocument:
    document_id: str
    category: str
    map_ref: str
    route: tuple[tuple[float, float], ...]
    actors: tuple[ActorSpec, ...]
    events: tuple[TriggeredManeuver, ...] = ()
    environment: EnvironmentSpec = EnvironmentSpec()
    parameters: tuple[ParameterDecl, ...] = ()
    metadata: tuple[tuple[str, str], ...] = ()

    def parameter(self, name: str) -> ParameterDecl:
        for decl in self.parameters:
            if decl.name == name:
                return decl
        raise KeyError(name)

    def meta(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.metadata:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class ScenarioInstance:
    document_id: str
    bindings: tuple[tuple[str, float], ...]
    seed: int

    def binding(self, name: str) -> float:
        for key, value in self.bindings:
            if key == name:
                return value
        raise KeyError(name)


@dataclass(frozen=True)
class Violation:
    document_id: str | None
    message: str


@dataclass(frozen=True)
class Catalog:
    items: tuple[ScenarioDocument, ...]
    version: str = "1"

    def item(self, document_id: str) -> ScenarioDocument:
        for doc in self.items:
            if doc.document_id == document_id:
                return doc
        raise KeyError(document_id)

    def by_category(self) -> dict[str, list[ScenarioDocument]]:
        grouped: dict[str, list[ScenarioDocument]] = {c: [] for c in CATEGORIES}
        for doc in self.items:
            grouped.setdefault(doc.category, []).append(doc)
        return grouped
