"""Fixed-timestep world update.

Each tick runs in a strict order: maneuver triggers fire against the
current state, longitudinal commands resolve, motion integrates with
the trapezoid rule, then collisions and traffic rules are checked on
the transition. The step function is pure, so identical inputs always
produce identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..geometry import boxes_intersect, polyline_lengths, project_on_polyline
from ..maps import MapModel
from ..scenario.types import ManeuverAction, TriggerCondition, TriggeredManeuver
from .setup import SimSetup
from .state import (
    ACCEL_MAX,
    ACCEL_MIN,
    DT,
    INFRACTION_FOR_KIND,
    ActorState,
    EgoControl,
    InfractionEvent,
    ManeuverState,
    RuleTrackers,
    WorldState,
)

STOP_SPEED = 0.1
STOP_ZONE = 5.0
EMERGENCY_GAP = 20.0
EMERGENCY_HOLD = 5.0
EGO_LANE_CHANGE_DURATION = 2.0

IDM_ACCEL = 2.0
IDM_BRAKE = 3.0
IDM_MIN_GAP = 2.0
IDM_HEADWAY = 1.5


def collision_check(a, b) -> bool:
    """True iff two oriented boxes overlap (touching counts)."""
    return boxes_intersect(a, b)


def _trigger_holds(maneuver: ManeuverState, state: WorldState, route_progress: float) -> bool:
    trigger = maneuver.maneuver.trigger
    if trigger.kind == "time":
        return state.time >= trigger.threshold
    ego = state.ego()
    if trigger.kind == "ego_gap":
        actor = state.actor(maneuver.maneuver.actor_id)
        gap = math.hypot(actor.x - ego.x, actor.y - ego.y)
        return gap <= trigger.threshold
    if trigger.kind == "ego_station":
        return route_progress >= trigger.threshold
    raise ValueError(f"unknown trigger kind {trigger.kind!r}")


def _fire_maneuver(ms: ManeuverState, state: WorldState, world_map: MapModel, next_tick: int):
    """Apply a maneuver's instantaneous effect; return (state', maneuver')."""
    action = ms.maneuver.action
    actor = state.actor(ms.maneuver.actor_id)
    fired = replace(ms, status="active", fired_tick=next_tick)

    if action.kind == "set_speed":
        speed = float(action.get("speed", actor.speed))
        state = state.with_actor(replace(actor, speed=speed, target_speed=speed, accel=0.0))
        return state, replace(fired, status="done")
    if action.kind == "stop":
        state = state.with_actor(replace(actor, speed=0.0, target_speed=0.0, accel=0.0))
        return state, replace(fired, status="done")
    if action.kind == "cross_road":
        speed = float(action.get("speed", 1.5))
        state = state.with_actor(replace(actor, speed=speed, target_speed=speed, accel=0.0))
        return state, replace(fired, status="done")
    if action.kind == "decelerate":
        target = float(action.get("target", 0.0))
        rate = abs(float(action.get("rate", 3.0)))
        if actor.speed <= target:
            return state, replace(fired, status="done")
        data = (("target", target), ("rate", rate))
        return state, replace(fired, data=data)
    if action.kind == "lane_change":
        direction = action.get("direction", "left")
        duration = float(action.get("duration", 2.0))
        if not actor.lane_bound:
            return state, replace(fired, status="done")
        lane = world_map.lane(actor.lane_id)
        target_id = lane.left if direction == "left" else lane.right
        if target_id is None:
            return state, replace(fired, status="done")
        target_lane = world_map.lane(target_id)
        station, _ = target_lane.project((actor.x, actor.y))
        point, heading = target_lane.point_at(station)
        off = -(actor.x - point[0]) * math.sin(heading) + (actor.y - point[1]) * math.cos(heading)
        state = state.with_actor(replace(actor, lane_id=target_id, station=station, lateral=off))
        data = (("t0", state.time), ("duration", duration), ("lat0", off))
        return state, replace(fired, data=data)
    raise ValueError(f"unknown action kind {action.kind!r}")


def _idm_acceleration(actor: ActorState, state: WorldState, world_map: MapModel) -> float:
    lane = world_map.lane(actor.lane_id)
    v0 = max(lane.speed_limit, 0.1)
    gap = None
    lead_speed = 0.0
    for other in state.actors:
        if other.actor_id == actor.actor_id:
            continue
        if other.lane_bound and other.lane_id == actor.lane_id:
            ahead = other.station - actor.station
        else:
            station, dist = lane.project((other.x, other.y))
            if dist > lane.width / 2:
                continue
            ahead = station - actor.station
        if ahead <= 0:
            continue
        clearance = ahead - (other.length + actor.length) / 2.0
        if gap is None or clearance < gap:
            gap = clearance
            lead_speed = other.speed
    v = actor.speed
    free = IDM_ACCEL * (1.0 - (v / v0) ** 4)
    if gap is None:
        return min(max(free, ACCEL_MIN), ACCEL_MAX)
    gap = max(gap, 0.1)
    desired = IDM_MIN_GAP + v * IDM_HEADWAY + v * (v - lead_speed) / (2.0 * math.sqrt(IDM_ACCEL * IDM_BRAKE))
    accel = IDM_ACCEL * (1.0 - (v / v0) ** 4 - (max(desired, 0.0) / gap) ** 2)
    return min(max(accel, ACCEL_MIN), ACCEL_MAX)


def _advance_longitudinal(speed: float, accel: float) -> tuple[float, float]:
    """One trapezoidal step; speeds never go negative."""
    new_speed = max(0.0, speed + accel * DT)
    return new_speed, (speed + new_speed) / 2.0 * DT


def _move_lane_bound(actor: ActorState, distance: float, setup: SimSetup) -> ActorState:
    lane = setup.map.lane(actor.lane_id)
    station = actor.station + distance
    lane_id = actor.lane_id
    while station > lane.length:
        next_id = setup.preferred_successor(lane_id)
        if next_id is None:
            station = lane.length
            actor = replace(actor, speed=0.0, target_speed=0.0)
            break
        station -= lane.length
        lane_id = next_id
        lane = setup.map.lane(lane_id)
    point, heading = lane.point_at(station)
    x = point[0] - actor.lateral * math.sin(heading)
    y = point[1] + actor.lateral * math.cos(heading)
    return replace(actor, lane_id=lane_id, station=station, x=x, y=y, heading=heading)


def _move_freespace(actor: ActorState, distance: float) -> ActorState:
    return replace(
        actor,
        x=actor.x + distance * math.cos(actor.heading),
        y=actor.y + distance * math.sin(actor.heading),
    )


def _lateral_blend(ms: ManeuverState, actor: ActorState, time: float) -> tuple[ActorState, ManeuverState]:
    t0 = ms.datum("t0")
    duration = max(ms.datum("duration", 2.0), DT)
    lat0 = ms.datum("lat0")
    frac = (time - t0) / duration
    if frac >= 1.0:
        return replace(actor, lateral=0.0), replace(ms, status="done")
    lateral = lat0 * 0.5 * (1.0 + math.cos(math.pi * frac))
    return replace(actor, lateral=lateral), ms


def detect_collisions(prev: WorldState, state: WorldState) -> tuple[list[InfractionEvent], tuple[str, ...]]:
    """Ego collisions on a rising edge, plus the new set of touching actors."""
    ego = state.ego()
    ego_box = ego.box()
    events = []
    active = []
    previously = set(prev.trackers.collision_active)
    for other in state.actors:
        if other.actor_id == "ego":
            continue
        if boxes_intersect(ego_box, other.box()):
            active.append(other.actor_id)
            if other.actor_id not in previously:
                events.append(
                    InfractionEvent(state.tick, INFRACTION_FOR_KIND[other.kind], other.actor_id)
                )
    return events, tuple(active)


def _rule_infractions(
    prev: WorldState, state: WorldState, world_map: MapModel
) -> tuple[list[InfractionEvent], RuleTrackers]:
    events: list[InfractionEvent] = []
    prev_ego, ego = prev.ego(), state.ego()
    prev_front = prev_ego.station + prev_ego.length / 2.0
    front = ego.station + ego.length / 2.0

    stop_flags = dict(prev.trackers.stop_flags)
    for idx, sig in enumerate(world_map.signals):
        if ego.lane_id != sig.lane_id:
            stop_flags.pop(idx, None)
            continue
        crossed = prev_ego.lane_id == sig.lane_id and prev_front < sig.station <= front
        if sig.kind == "traffic_light":
            if crossed and sig.phase_at(state.time) == "red":
                events.append(InfractionEvent(state.tick, "red_light", "ego"))
        else:
            in_zone = sig.station - STOP_ZONE <= front <= sig.station
            if in_zone and ego.speed < STOP_SPEED:
                stop_flags[idx] = True
            if crossed:
                if not stop_flags.get(idx, False):
                    events.append(InfractionEvent(state.tick, "stop_sign", "ego"))
                stop_flags.pop(idx, None)

    ego_changing = any(
        ms.status == "active"
        and ms.maneuver.actor_id == "ego"
        and ms.maneuver.action.kind == "lane_change"
        for ms in state.maneuvers
    )
    behind = None
    for actor in state.actors:
        if actor.kind != "emergency_vehicle" or not actor.lane_bound:
            continue
        if actor.lane_id == ego.lane_id and 0.0 < ego.station - actor.station <= EMERGENCY_GAP:
            behind = actor
            break
    since = prev.trackers.emergency_since
    fired = prev.trackers.emergency_fired
    if behind is None or ego_changing:
        since, fired = -1.0, False
    else:
        if since < 0.0:
            since = state.time
        if not fired and state.time - since >= EMERGENCY_HOLD:
            events.append(InfractionEvent(state.tick, "fail_yield_emergency", behind.actor_id))
            fired = True

    trackers = RuleTrackers(
        stop_flags=tuple(sorted(stop_flags.items())),
        emergency_since=since,
        emergency_fired=fired,
        collision_active=state.trackers.collision_active,
    )
    return events, trackers


def detect_rule_infractions(prev: WorldState, state: WorldState, world_map: MapModel) -> list[InfractionEvent]:
    """Traffic-rule violations arising on the prev -> state transition."""
    if prev.tick + 1 != state.tick:
        raise ValueError("states must be consecutive ticks")
    events, _ = _rule_infractions(prev, state, world_map)
    return events


def route_progress(positions, route: np.ndarray) -> float:
    """Meters of route completed: furthest projected position, run forward."""
    total = float(polyline_lengths(np.asarray(route, dtype=float))[-1])
    best = 0.0
    for p in np.atleast_2d(np.asarray(positions, dtype=float)):
        station, _ = project_on_polyline(p, route)
        best = max(best, station)
    return min(best, total)


def step(
    state: WorldState,
    control: EgoControl,
    setup: SimSetup,
    progress: float = 0.0,
) -> tuple[WorldState, list[InfractionEvent]]:
    """Advance the world by one tick and report new infractions.

    progress is the ego's route progress in meters, used by
    ego_station triggers; the episode loop maintains it.
    """
    world_map = setup.map
    next_tick = state.tick + 1

    maneuvers = list(state.maneuvers)
    for i, ms in enumerate(maneuvers):
        if ms.status == "pending" and _trigger_holds(ms, state, progress):
            state, maneuvers[i] = _fire_maneuver(ms, state, world_map, next_tick)

    if control.lane_change != "none":
        ego = state.ego()
        already = any(
            ms.status == "active" and ms.maneuver.actor_id == "ego"
            and ms.maneuver.action.kind == "lane_change"
            for ms in maneuvers
        )
        if ego.lane_bound and not already:
            request = TriggeredManeuver(
                actor_id="ego",
                trigger=TriggerCondition("time", 0.0),
                action=ManeuverAction(
                    "lane_change",
                    (("direction", control.lane_change), ("duration", EGO_LANE_CHANGE_DURATION)),
                ),
            )
            ms = ManeuverState(request, status="pending")
            state, ms = _fire_maneuver(ms, state, world_map, next_tick)
            maneuvers.append(ms)

    new_actors = []
    for actor in state.actors:
        decel = next(
            (
                ms
                for ms in maneuvers
                if ms.status == "active"
                and ms.maneuver.actor_id == actor.actor_id
                and ms.maneuver.action.kind == "decelerate"
            ),
            None,
        )
        if actor.actor_id == "ego":
            accel = control.acceleration
        elif actor.behavior == "stationary":
            accel = 0.0
        elif decel is not None:
            accel = -decel.datum("rate", 3.0)
        elif actor.behavior == "idm_follow":
            accel = _idm_acceleration(actor, state, world_map)
        else:
            accel = 0.0

        speed, distance = _advance_longitudinal(actor.speed, accel)
        if decel is not None:
            target = decel.datum("target")
            if speed <= target:
                speed = target
                idx = maneuvers.index(decel)
                maneuvers[idx] = replace(decel, status="done")
        if actor.behavior == "stationary":
            speed, distance = 0.0, 0.0
        moved = replace(actor, speed=speed, accel=accel)
        if actor.lane_bound:
            moved = _move_lane_bound(moved, distance, setup)
        else:
            moved = _move_freespace(moved, distance)
        new_actors.append(moved)

    time = next_tick * DT
    for i, ms in enumerate(maneuvers):
        if ms.status != "active" or ms.maneuver.action.kind != "lane_change":
            continue
        for j, actor in enumerate(new_actors):
            if actor.actor_id == ms.maneuver.actor_id:
                new_actors[j], maneuvers[i] = _lateral_blend(ms, actor, time)
                if new_actors[j].lane_bound:
                    new_actors[j] = _reproject(new_actors[j], world_map)

    phases = tuple(sig.phase_at(time) for sig in world_map.signals)
    next_state = WorldState(
        tick=next_tick,
        time=time,
        actors=tuple(new_actors),
        signal_phases=phases,
        maneuvers=tuple(maneuvers),
        trackers=state.trackers,
    )

    collision_events, active = detect_collisions(state, next_state)
    next_state = replace(
        next_state, trackers=replace(next_state.trackers, collision_active=active)
    )
    rule_events, trackers = _rule_infractions(state, next_state, world_map)
    next_state = replace(next_state, trackers=trackers)
    return next_state, collision_events + rule_events


def _reproject(actor: ActorState, world_map: MapModel) -> ActorState:
    lane = world_map.lane(actor.lane_id)
    point, heading = lane.point_at(actor.station)
    return replace(
        actor,
        x=point[0] - actor.lateral * math.sin(heading),
        y=point[1] + actor.lateral * math.cos(heading),
        heading=heading,
    )
