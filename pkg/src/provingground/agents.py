"""Built-in driving agents.

Both agents share one planner: proportional cruise toward the desired
speed, an IDM-style gap term against obstacles on the ego's path, a
yield rule against traffic whose predicted path crosses ours, and a
hard time-to-collision override. They differ only in where obstacles
come from: the rule agent reads them out of the true world state, the
perception agent trusts whatever the detector said, so a missed
detection translates directly into a missed braking decision.

Signals and route context come from the map in both modes; the threat
surface of interest here is object perception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    OrientedBox,
    point_at_station,
    polyline_lengths,
    project_on_polyline,
)
from .sim.setup import SimSetup
from .sim.state import ACCEL_MIN, ActorState, EgoControl, ManeuverState, WorldState

LOOKAHEAD = 60.0


@dataclass(frozen=True)
class WorldDetection:
    """A detected obstacle lifted into world coordinates."""

    box: OrientedBox
    cls: str
    confidence: float
    speed: float = 0.0


@dataclass(frozen=True)
class TrackedObject:
    """Planner-facing view of one other road user."""

    box: OrientedBox
    speed: float
    lane_id: str | None
    heading: float


@dataclass(frozen=True)
class AgentObservation:
    """Per-tick agent input. Exactly one of world/detections is set:
    privileged mode carries the true world, sensor mode carries
    detector output (plus, optionally, the frames it came from)."""

    mode: str
    setup: SimSetup
    progress: float
    tick: int
    time: float
    ego: ActorState
    signal_phases: tuple[str, ...] = ()
    maneuvers: tuple[ManeuverState, ...] = ()
    world: WorldState | None = None
    detections: tuple[WorldDetection, ...] | None = None
    camera: object | None = None
    cloud: object | None = None

    def __post_init__(self):
        if self.mode == "privileged":
            if self.world is None or self.detections is not None:
                raise ValueError("privileged observations carry world state only")
        elif self.mode == "sensor":
            if self.world is not None or self.detections is None:
                raise ValueError("sensor observations carry detections only")
        else:
            raise ValueError(f"unknown observation mode {self.mode!r}")


def privileged_observation(state: WorldState, setup: SimSetup, progress: float) -> AgentObservation:
    return AgentObservation(
        mode="privileged",
        setup=setup,
        progress=progress,
        tick=state.tick,
        time=state.time,
        ego=state.ego(),
        signal_phases=state.signal_phases,
        maneuvers=state.maneuvers,
        world=state,
    )


@dataclass(frozen=True)
class AgentParams:
    desired_speed: float | None = None
    headway: float = 1.5
    comfortable_decel: float = 3.0
    max_accel: float = 2.0
    min_gap: float = 2.0
    ttc_brake: float = 1.5
    stop_margin: float = 2.0


@dataclass
class AgentMemory:
    """Declared cross-tick agent state."""

    satisfied_signs: tuple[int, ...] = ()
    initial_speed: float = 0.0


@dataclass(frozen=True)
class PathObstacle:
    distance: float
    speed: float


def _ego_path(setup: SimSetup, ego: ActorState) -> np.ndarray:
    """Ego lane centerline concatenated with its preferred successor."""
    lane = setup.map.lane(ego.lane_id)
    points = [lane.centerline]
    next_id = setup.preferred_successor(ego.lane_id)
    if next_id is not None:
        nxt = setup.map.lane(next_id).centerline
        if np.linalg.norm(points[-1][-1] - nxt[0]) < 1e-6:
            nxt = nxt[1:]
        points.append(nxt)
    return np.vstack(points)


def _obstacles_on_path(path, ego: ActorState, ego_station: float, objects) -> list[PathObstacle]:
    obstacles = []
    for obj in objects:
        station, lateral = project_on_polyline((obj.box.cx, obj.box.cy), path)
        ahead = station - ego_station
        if ahead <= 0.0 or ahead > LOOKAHEAD:
            continue
        if lateral > (3.5 + obj.box.width) / 2.0:
            continue
        clearance = ahead - (obj.box.length + ego.length) / 2.0
        obstacles.append(PathObstacle(distance=clearance, speed=obj.speed))
    return obstacles


def _first_crossing(pa: np.ndarray, pb: np.ndarray):
    """First point where polyline pa crosses polyline pb.

    Returns (station_a, station_b) of the crossing, or None. Collinear
    overlap does not count; shared endpoints do.
    """
    a0, a1 = pa[:-1], pa[1:]
    b0, b1 = pb[:-1], pb[1:]
    da = a1 - a0
    db = b1 - b0
    denom = da[:, None, 0] * db[None, :, 1] - da[:, None, 1] * db[None, :, 0]
    diff = b0[None, :, :] - a0[:, None, :]
    safe = np.where(np.abs(denom) < 1e-12, 1.0, denom)
    t = (diff[..., 0] * db[None, :, 1] - diff[..., 1] * db[None, :, 0]) / safe
    u = (diff[..., 0] * da[:, None, 1] - diff[..., 1] * da[:, None, 0]) / safe
    valid = (np.abs(denom) >= 1e-12) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    if not valid.any():
        return None
    sta_a = polyline_lengths(pa)
    sta_b = polyline_lengths(pb)
    len_a = sta_a[1:] - sta_a[:-1]
    len_b = sta_b[1:] - sta_b[:-1]
    s_a = np.where(valid, sta_a[:-1, None] + t * len_a[:, None], np.inf)
    s_b = sta_b[None, :-1] + u * len_b[None, :]
    i, j = np.unravel_index(int(np.argmin(s_a)), s_a.shape)
    return float(s_a[i, j]), float(s_b[i, j])


def _predicted_path(setup: SimSetup, obj: TrackedObject) -> tuple[np.ndarray, float]:
    """Where an object is headed: its lane chain, or a straight ray for
    freespace movers. Returns the path and the object's station on it."""
    if obj.lane_id is not None:
        lane = setup.map.lane(obj.lane_id)
        points = [lane.centerline]
        if lane.successors:
            nxt = setup.map.lane(lane.successors[0]).centerline
            if np.linalg.norm(points[-1][-1] - nxt[0]) < 1e-6:
                nxt = nxt[1:]
            points.append(nxt)
        path = np.vstack(points)
        station, _ = project_on_polyline((obj.box.cx, obj.box.cy), path)
        return path, station
    origin = np.array([obj.box.cx, obj.box.cy])
    tip = origin + 120.0 * np.array([math.cos(obj.heading), math.sin(obj.heading)])
    return np.vstack([origin, tip]), 0.0


def _crossing_conflicts(
    setup: SimSetup,
    ego: ActorState,
    objects,
    path: np.ndarray,
    ego_station: float,
) -> list[PathObstacle]:
    """Yield points against traffic whose predicted path crosses ours.

    A stop point short of the crossing is emitted when the other party
    gets there soon and our own nominal arrival lands inside its
    occupancy window, or when we are already waiting near the crossing
    and it has not cleared yet.
    """
    chain = {ego.lane_id, setup.preferred_successor(ego.lane_id)}
    conflicts = []
    for obj in objects:
        if obj.speed < 0.3 or obj.lane_id in chain:
            continue
        if math.hypot(obj.box.cx - ego.x, obj.box.cy - ego.y) > 80.0:
            continue
        other_path, other_station = _predicted_path(setup, obj)
        hit = _first_crossing(path, other_path)
        if hit is None:
            continue
        s_ego = hit[0] - ego_station
        s_other = hit[1] - other_station
        if not (0.5 <= s_ego <= 50.0) or not (0.0 < s_other <= 70.0):
            continue
        t_other = s_other / max(obj.speed, 0.5)
        if t_other > 8.0:
            continue
        t_ego = s_ego / max(ego.speed, 0.5)
        holding = s_ego < 12.0 and ego.speed < 2.0
        if holding or (t_other - 2.0 < t_ego < t_other + 4.0):
            conflicts.append(PathObstacle(distance=s_ego - 3.0, speed=0.0))
    return conflicts


def _signal_stops(obs: AgentObservation, memory: AgentMemory) -> list[PathObstacle]:
    """Red lights and unserved stop signs, expressed as standing obstacles."""
    ego = obs.ego
    world_map = obs.setup.map
    stops = []
    front = ego.station + ego.length / 2.0
    for idx, sig in enumerate(world_map.signals):
        if sig.lane_id != ego.lane_id:
            continue
        distance = sig.station - front
        if distance < -1.0 or distance > LOOKAHEAD:
            continue
        phase = obs.signal_phases[idx] if idx < len(obs.signal_phases) else sig.phase_at(obs.time)
        if sig.kind == "traffic_light":
            if phase in ("red", "yellow"):
                stops.append(PathObstacle(distance=distance, speed=0.0))
        else:
            if idx in memory.satisfied_signs:
                continue
            in_zone = sig.station - 5.0 <= front <= sig.station
            if in_zone and ego.speed < 0.05:
                memory.satisfied_signs = memory.satisfied_signs + (idx,)
                continue
            stops.append(PathObstacle(distance=distance, speed=0.0))
    return stops


def _longitudinal(ego_speed: float, desired: float, obstacles, params: AgentParams) -> float:
    accel = min(params.max_accel, 1.0 * (desired - ego_speed))
    for obstacle in obstacles:
        gap = max(obstacle.distance - params.stop_margin, 0.05)
        closing = ego_speed - obstacle.speed
        if closing > 0.0 and gap / closing < params.ttc_brake:
            return ACCEL_MIN
        desired_gap = params.min_gap + ego_speed * params.headway + ego_speed * closing / (
            2.0 * math.sqrt(params.max_accel * params.comfortable_decel)
        )
        follow = params.max_accel * (1.0 - max(desired_gap, 0.0) ** 2 / gap**2)
        accel = min(accel, follow)
    return max(min(accel, params.max_accel), ACCEL_MIN)


def _route_lane_request(obs: AgentObservation) -> str:
    """Ask for a lane change when the route runs down a neighbor lane."""
    ego = obs.ego
    setup = obs.setup
    lane = setup.map.lane(ego.lane_id)
    changing = any(
        ms.status == "active"
        and ms.maneuver.actor_id == "ego"
        and ms.maneuver.action.kind == "lane_change"
        for ms in obs.maneuvers
    )
    if changing:
        return "none"
    lookahead = max(15.0, 2.0 * ego.speed)
    target, _ = point_at_station(setup.route, obs.progress + lookahead)
    _, dist = lane.project(target)
    if dist <= lane.width / 2.0:
        return "none"
    point, heading = lane.point_at(ego.station)
    lateral = -(target[0] - point[0]) * math.sin(heading) + (target[1] - point[1]) * math.cos(heading)
    if lateral > 0 and lane.left is not None:
        return "left"
    if lateral < 0 and lane.right is not None:
        return "right"
    return "none"


def _plan(obs: AgentObservation, memory: AgentMemory, params: AgentParams, objects) -> EgoControl:
    ego = obs.ego
    lane = obs.setup.map.lane(ego.lane_id)
    desired = params.desired_speed
    if desired is None:
        desired = memory.initial_speed or lane.speed_limit
    desired = min(desired, lane.speed_limit)

    path = _ego_path(obs.setup, ego)
    ego_station, _ = project_on_polyline((ego.x, ego.y), path)
    obstacles = _obstacles_on_path(path, ego, ego_station, objects)
    obstacles.extend(_signal_stops(obs, memory))
    obstacles.extend(_crossing_conflicts(obs.setup, ego, objects, path, ego_station))
    accel = _longitudinal(ego.speed, desired, obstacles, params)
    return EgoControl(acceleration=accel, lane_change=_route_lane_request(obs))


class RuleAgent:
    """Privileged baseline driver: sees the true world state."""

    def __init__(self, params: AgentParams | None = None):
        self.params = params or AgentParams()
        self.memory = AgentMemory()

    def reset(self, setup: SimSetup) -> None:
        self.memory = AgentMemory(initial_speed=setup.initial.ego().speed)

    def decide(self, obs: AgentObservation) -> EgoControl:
        if obs.mode != "privileged":
            raise ValueError("rule agent needs privileged observations")
        objects = [
            TrackedObject(box=a.box(), speed=a.speed, lane_id=a.lane_id, heading=a.heading)
            for a in obs.world.actors
            if a.actor_id != obs.ego.actor_id
        ]
        return _plan(obs, self.memory, self.params, objects)


class PerceptionAgent:
    """Same planner, but obstacles come from the detector output."""

    def __init__(self, params: AgentParams | None = None):
        self.params = params or AgentParams()
        self.memory = AgentMemory()

    def reset(self, setup: SimSetup) -> None:
        self.memory = AgentMemory(initial_speed=setup.initial.ego().speed)

    def decide(self, obs: AgentObservation) -> EgoControl:
        if obs.mode != "sensor":
            raise ValueError("perception agent needs sensor observations")
        objects = [
            TrackedObject(box=d.box, speed=d.speed, lane_id=None, heading=d.box.heading)
            for d in obs.detections
        ]
        return _plan(obs, self.memory, self.params, objects)


AGENT_KINDS = {
    "rule": RuleAgent,
    "perception": PerceptionAgent,
}


def make_agent(kind: str, params: AgentParams | None = None):
    if kind not in AGENT_KINDS:
        raise ValueError(f"unknown agent kind {kind!r}; choose from {sorted(AGENT_KINDS)}")
    return AGENT_KINDS[kind](params)
