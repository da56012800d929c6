"""State carried through the simulation loop.

Everything the next tick depends on lives in WorldState, so stepping is
a pure function and two runs from the same setup are bit-identical.
Actors are either lane-bound (pose derived from lane station plus a
lateral offset that is nonzero only mid lane-change) or freespace
(pose integrated directly, used for pedestrians and obstacles).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..geometry import OrientedBox
from ..scenario.types import TriggeredManeuver

DT = 0.05
ACCEL_MIN = -8.0
ACCEL_MAX = 4.0

INFRACTION_FOR_KIND = {
    "pedestrian": "collision_pedestrian",
    "bicycle": "collision_vehicle",
    "vehicle": "collision_vehicle",
    "emergency_vehicle": "collision_vehicle",
    "static_obstacle": "collision_static",
}

TERMINATIONS = ("route_done", "timeout", "collision_stop")


@dataclass(frozen=True)
class EgoControl:
    """Longitudinal command plus an optional lane-change request."""

    acceleration: float = 0.0
    lane_change: str = "none"

    def __post_init__(self):
        clamped = min(max(float(self.acceleration), ACCEL_MIN), ACCEL_MAX)
        object.__setattr__(self, "acceleration", clamped)
        if self.lane_change not in ("none", "left", "right"):
            raise ValueError(f"lane_change must be none/left/right, got {self.lane_change!r}")


@dataclass(frozen=True)
class ActorState:
    actor_id: str
    kind: str
    x: float
    y: float
    heading: float
    speed: float
    length: float
    width: float
    height: float
    behavior: str
    lane_id: str | None = None
    station: float = 0.0
    lateral: float = 0.0
    accel: float = 0.0
    target_speed: float = 0.0

    def box(self) -> OrientedBox:
        return OrientedBox(self.x, self.y, self.heading, self.length, self.width)

    @property
    def lane_bound(self) -> bool:
        return self.lane_id is not None


@dataclass(frozen=True)
class ManeuverState:
    """Runtime wrapper of one triggered maneuver: pending, active or done."""

    maneuver: TriggeredManeuver
    status: str = "pending"
    fired_tick: int = -1
    data: tuple[tuple[str, float], ...] = ()

    def datum(self, key: str, default: float = 0.0) -> float:
        for k, v in self.data:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class RuleTrackers:
    """Cross-tick memory for the traffic-rule detectors."""

    stop_flags: tuple[tuple[int, bool], ...] = ()
    emergency_since: float = -1.0
    emergency_fired: bool = False
    collision_active: tuple[str, ...] = ()

    def stop_flag(self, signal_idx: int) -> bool:
        for idx, flag in self.stop_flags:
            if idx == signal_idx:
                return flag
        return False


@dataclass(frozen=True)
class InfractionEvent:
    tick: int
    kind: str
    actor_id: str


@dataclass(frozen=True)
class WorldState:
    tick: int
    time: float
    actors: tuple[ActorState, ...]
    signal_phases: tuple[str, ...] = ()
    maneuvers: tuple[ManeuverState, ...] = ()
    trackers: RuleTrackers = RuleTrackers()

    def actor(self, actor_id: str) -> ActorState:
        for actor in self.actors:
            if actor.actor_id == actor_id:
                return actor
        raise KeyError(actor_id)

    def ego(self) -> ActorState:
        return self.actor("ego")

    def with_actor(self, updated: ActorState) -> "WorldState":
        actors = tuple(updated if a.actor_id == updated.actor_id else a for a in self.actors)
        return replace(self, actors=actors)
