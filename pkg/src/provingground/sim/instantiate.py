"""Turning a document plus parameter bindings into a runnable setup.

Placeholders resolve against the instance bindings, actors bind to
lanes where their pose and heading line up with one, and the ego's
route picks a preferred successor at every fork it passes.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from ..geometry import polyline_lengths, project_on_polyline, wrap_angle
from ..maps import MapModel, builtin_map
from ..scenario.parser import document_to_dict
from ..scenario.types import (
    ManeuverAction,
    ScenarioDocument,
    ScenarioInstance,
    TriggerCondition,
    TriggeredManeuver,
)
from .setup import SimSetup
from .state import ActorState, ManeuverState, WorldState

LANE_BIND_DISTANCE = 1.2
LANE_BIND_ANGLE = math.pi / 4
DEFAULT_MAX_TIME = 60.0


class InstantiationError(ValueError):
    pass


def _resolve(value, bindings: dict[str, float], where: str) -> float:
    if isinstance(value, str):
        name = value[1:]
        if name not in bindings:
            raise InstantiationError(f"{where}: parameter {value!r} is not bound")
        return float(bindings[name])
    return float(value)


def _check_bindings(doc: ScenarioDocument, instance: ScenarioInstance) -> dict[str, float]:
    declared = {p.name: p for p in doc.parameters}
    bindings = dict(instance.bindings)
    for name in declared:
        if name not in bindings:
            raise InstantiationError(f"parameter {name!r} is unbound")
    for name, value in bindings.items():
        if name not in declared:
            raise InstantiationError(f"binding {name!r} matches no declared parameter")
        decl = declared[name]
        if not decl.low <= value <= decl.high:
            raise InstantiationError(
                f"binding {name!r}={value} outside [{decl.low}, {decl.high}]"
            )
    return bindings


def _bind_lane(world_map: MapModel, x: float, y: float, heading: float):
    """Lane id and station if the pose sits on a lane going its way."""
    best = None
    for lane in world_map.lanes:
        station, dist = lane.project((x, y))
        if dist > LANE_BIND_DISTANCE:
            continue
        _, tangent = lane.point_at(station)
        if abs(wrap_angle(tangent - heading)) > LANE_BIND_ANGLE:
            continue
        if best is None or dist < best[2]:
            best = (lane.lane_id, station, dist)
    if best is None:
        return None, 0.0
    return best[0], best[1]


def _route_successor_choices(world_map: MapModel, route: np.ndarray) -> tuple[tuple[str, str], ...]:
    choices = []
    for lane in world_map.lanes:
        if len(lane.successors) < 2:
            continue
        best_succ, best_cost = None, None
        for succ_id in lane.successors:
            line = world_map.lane(succ_id).centerline
            samples = line[np.linspace(0, len(line) - 1, 5).astype(int)]
            cost = float(np.mean([project_on_polyline(p, route)[1] for p in samples]))
            if best_cost is None or cost < best_cost:
                best_succ, best_cost = succ_id, cost
        choices.append((lane.lane_id, best_succ))
    return tuple(choices)


def _resolve_maneuver(event: TriggeredManeuver, bindings: dict[str, float]) -> TriggeredManeuver:
    where = f"event for {event.actor_id!r}"
    trigger = TriggerCondition(
        kind=event.trigger.kind,
        threshold=_resolve(event.trigger.threshold, bindings, where),
    )
    params = tuple(
        (key, value if key == "direction" else _resolve(value, bindings, where))
        for key, value in event.action.params
    )
    return TriggeredManeuver(event.actor_id, trigger, ManeuverAction(event.action.kind, params))


def instantiate(doc: ScenarioDocument, instance: ScenarioInstance) -> SimSetup:
    """Build the initial world for one concrete scenario instance."""
    if instance.document_id != doc.document_id:
        raise InstantiationError(
            f"instance is for {instance.document_id!r}, not {doc.document_id!r}"
        )
    bindings = _check_bindings(doc, instance)
    world_map = builtin_map(doc.map_ref)
    route = np.asarray(doc.route, dtype=float)
    route_length = float(polyline_lengths(route)[-1])

    actors = []
    for spec in doc.actors:
        where = f"actor {spec.actor_id!r}"
        x = _resolve(spec.initial_pose[0], bindings, where)
        y = _resolve(spec.initial_pose[1], bindings, where)
        heading = _resolve(spec.initial_pose[2], bindings, where)
        speed = _resolve(spec.initial_speed, bindings, where)
        lane_id, station = None, 0.0
        rollable = spec.kind in ("ego", "vehicle", "bicycle", "emergency_vehicle")
        if rollable and spec.behavior != "stationary":
            lane_id, station = _bind_lane(world_map, x, y, heading)
        if spec.kind == "ego" and lane_id is None:
            raise InstantiationError("ego must start on a lane, aligned with it")
        if spec.behavior == "idm_follow" and spec.kind != "ego" and lane_id is None:
            raise InstantiationError(f"{where}: idm_follow requires a lane-aligned pose")
        actors.append(
            ActorState(
                actor_id=spec.actor_id,
                kind=spec.kind,
                x=x,
                y=y,
                heading=heading,
                speed=speed,
                length=spec.dimensions[0],
                width=spec.dimensions[1],
                height=spec.dimensions[2],
                behavior=spec.behavior,
                lane_id=lane_id,
                station=station,
                target_speed=speed,
            )
        )

    maneuvers = tuple(
        ManeuverState(_resolve_maneuver(event, bindings)) for event in doc.events
    )
    phases = tuple(sig.phase_at(0.0) for sig in world_map.signals)
    initial = WorldState(
        tick=0,
        time=0.0,
        actors=tuple(actors),
        signal_phases=phases,
        maneuvers=maneuvers,
    )

    max_time = DEFAULT_MAX_TIME
    meta_time = doc.meta("max_time")
    if meta_time is not None:
        max_time = float(meta_time)

    digest_src = json.dumps(
        {
            "document": document_to_dict(doc),
            "bindings": sorted(bindings.items()),
            "seed": instance.seed,
        },
        sort_keys=True,
    )
    digest = hashlib.sha256(digest_src.encode("utf-8")).hexdigest()

    return SimSetup(
        document_id=doc.document_id,
        instance=instance,
        map=world_map,
        route=route,
        route_length=route_length,
        initial=initial,
        successor_choice=_route_successor_choices(world_map, route),
        environment=doc.environment,
        max_time=max_time,
        seed=instance.seed,
        digest=digest,
    )
