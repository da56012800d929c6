"""Programmatic construction of the 70-item scenario catalog.

Every functional test item is assembled here from a small kit of
helpers and validated through the document parser, so the shipped
YAML files and this module can never disagree about structure. Items
whose real-world physics the simulator does not model carry a
reduced_fidelity note in their metadata.
"""

from __future__ import annotations

import numpy as np

from ..geometry import point_at_station, polyline_lengths
from ..maps import builtin_map
from .parser import document_from_dict
from .types import Catalog, ScenarioDocument

CAR = [4.6, 2.0, 1.6]
TRUCK = [8.5, 2.5, 3.4]
BICYCLE = [1.8, 0.6, 1.4]
MOTORCYCLE = [2.2, 0.8, 1.3]
PEDESTRIAN = [0.5, 0.5, 1.8]
CONE = [0.4, 0.4, 0.7]
OBSTACLE = [1.2, 1.2, 1.0]
EMERGENCY = [5.2, 2.2, 2.4]

EXPERIMENT_ALIASES = {
    "PedestrianCrossingRoad": "Sudden Pedestrian Crossing",
    "StraightRoadLaneChangeLeft": "Lane Changing",
    "StationaryTargetVehicleStraightRoad": "Stationary Obstacle",
    "OppositeLaneInvasionDetection": "Opposing Passing",
    "HighSpeedCutInStraightRoad": "Cut In",
    "TargetVehicleCutOutStraightRoad": "Cut Out",
    "RightTurnVehicleConflict": "Turn Right",
    "LeftTurnVehicleConflict": "Turn Left",
}


def _chain_polyline(map_name: str, lane_ids) -> np.ndarray:
    """Concatenated centerline of a lane chain, joint duplicates removed."""
    world = builtin_map(map_name)
    points = [world.lane(lane_ids[0]).centerline]
    for lane_id in lane_ids[1:]:
        line = world.lane(lane_id).centerline
        if np.linalg.norm(points[-1][-1] - line[0]) < 1e-6:
            line = line[1:]
        points.append(line)
    return np.vstack(points)


def _route(map_name: str, lane_ids, start: float = 5.0, end_margin: float = 10.0, step: float = 60.0):
    poly = _chain_polyline(map_name, lane_ids)
    total = float(polyline_lengths(poly)[-1])
    stations = list(np.arange(start, total - end_margin, step)) + [total - end_margin]
    waypoints = []
    for s in stations:
        p, _ = point_at_station(poly, float(s))
        wp = [round(float(p[0]), 2), round(float(p[1]), 2)]
        if not waypoints or wp != waypoints[-1]:
            waypoints.append(wp)
    return waypoints


def _pose(map_name: str, lane_id: str, station: float, offset: float = 0.0):
    """Pose on a lane centerline, optionally shifted along the left normal."""
    lane = builtin_map(map_name).lane(lane_id)
    p, heading = lane.point_at(station)
    x = p[0] - offset * np.sin(heading)
    y = p[1] + offset * np.cos(heading)
    return [round(float(x), 3), round(float(y), 3), round(float(heading), 4)]


def _actor(actor_id, kind, pose, speed=0.0, dims=None, behavior=None):
    if dims is None:
        dims = {"vehicle": CAR, "pedestrian": PEDESTRIAN, "bicycle": BICYCLE,
                "static_obstacle": OBSTACLE, "emergency_vehicle": EMERGENCY, "ego": CAR}[kind]
    if behavior is None:
        behavior = "stationary" if kind == "static_obstacle" else "scripted"
    return {"id": actor_id, "kind": kind, "pose": list(pose), "speed": speed,
            "dimensions": list(dims), "behavior": behavior}


def _ego(pose, speed=10.0, dims=None):
    return _actor("ego", "ego", pose, speed=speed, dims=dims or CAR)


def _event(actor, trigger_kind, threshold, action_kind, **params):
    return {"actor": actor, "trigger": {"kind": trigger_kind, "threshold": threshold},
            "action": {"kind": action_kind, **params}}


def _param(name, unit, low, high, default):
    return {"name": name, "unit": unit, "range": [low, high], "default": default}


def _doc(item_id, category, map_name, route, actors, events=(), params=(), env=None, meta=None):
    raw = {"id": item_id, "category": category, "map": map_name}
    metadata = dict(meta or {})
    if item_id in EXPERIMENT_ALIASES:
        metadata["alias"] = EXPERIMENT_ALIASES[item_id]
    if metadata:
        raw["metadata"] = metadata
    if params:
        raw["parameters"] = list(params)
    if env:
        raw["environment"] = env
    raw["route"] = route
    raw["actors"] = list(actors)
    if events:
        raw["events"] = list(events)
    return raw


STRAIGHT_ROUTE = _route("straight_single", ["lane_0"])


def _cruise(item_id, category, map_name="straight_single", lanes=("lane_0",), meta=None, extra_actors=(), events=(), params=()):
    all_params = [_param("ego_speed", "m/s", 8.0, 15.0, 12.0), *params]
    return _doc(
        item_id, category, map_name,
        _route(map_name, list(lanes)),
        [_ego(_pose(map_name, lanes[0], 5.0), speed="$ego_speed"), *extra_actors],
        events=events, params=all_params, meta=meta,
    )


def _lane_change_route(to_left=True):
    y0, y1 = (0.0, 3.5) if to_left else (3.5, 0.0)
    return [[5.0, y0], [150.0, y0], [250.0, y1], [390.0, y1]]


def _cut_out(item_id, category, lead_kind="vehicle", lead_dims=None, blocker=None, meta=None, env=None, extra_params=(), extra_events=()):
    lead_dims = lead_dims or (CAR if lead_kind == "vehicle" else BICYCLE)
    blocker = blocker or _actor("blocker", "vehicle", [110.0, 0.0, 0.0], behavior="stationary")
    blocker["pose"][0] = "$blocker_x"
    return _doc(
        item_id, category, "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("lead", lead_kind, [30.0, 0.0, 0.0], speed=8.0, dims=lead_dims),
            blocker,
        ],
        events=[
            _event("lead", "ego_gap", "$reveal_gap", "lane_change", direction="left", duration=2.0),
            *extra_events,
        ],
        params=[
            _param("reveal_gap", "m", 12.0, 20.0, 15.0),
            _param("blocker_x", "m", 90.0, 140.0, 110.0),
            *extra_params,
        ],
        meta=meta, env=env,
    )


def _adaptive_cruise_control():
    yield _cruise("StraightRoadCruising", "adaptive_cruise_control")
    yield _cruise("CurvedRoadCruising", "adaptive_cruise_control", map_name="curved_road")
    yield _cruise(
        "DownhillCruising", "adaptive_cruise_control",
        meta={"reduced_fidelity": "flat-grade kinematics; downhill grade is not modeled"},
    )
    yield _doc(
        "StraightRoadLaneChangeLeft", "adaptive_cruise_control", "straight_two_lane",
        _lane_change_route(to_left=True),
        [_ego([5.0, 0.0, 0.0], speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 8.0, 15.0, 12.0)],
    )
    for item_id, map_name in (
        ("CurvedRoadLaneDepartureLeft", "curved_road"),
        ("CurvedRoadLaneDepartureRight", "curved_road"),
        ("StraightRoadLaneDepartureLeft", "straight_single"),
        ("StraightRoadLaneDepartureRight", "straight_single"),
    ):
        yield _cruise(
            item_id, "adaptive_cruise_control", map_name=map_name,
            meta={"reduced_fidelity": "departure impulse not injected; lane keeping is scored along the route"},
        )


def _following_driving():
    yield _doc(
        "StationaryTargetVehicleStraightRoad", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed="$ego_speed"),
            _actor("target", "vehicle", ["$target_x", 0.0, 0.0], behavior="stationary"),
        ],
        params=[
            _param("ego_speed", "m/s", 8.0, 14.0, 10.0),
            _param("target_x", "m", 90.0, 150.0, 120.0),
        ],
    )
    yield _doc(
        "LowSpeedTargetVehicleStraightRoad", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("target", "vehicle", [40.0, 0.0, 0.0], speed="$lead_speed"),
        ],
        params=[_param("lead_speed", "m/s", 2.0, 5.0, 3.0)],
    )
    yield _doc(
        "DeceleratingTargetVehicleStraightRoad", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("target", "vehicle", [35.0, 0.0, 0.0], speed=10.0),
        ],
        events=[_event("target", "time", "$brake_time", "decelerate", target=0.0, rate="$brake_rate")],
        params=[
            _param("brake_time", "s", 3.0, 8.0, 5.0),
            _param("brake_rate", "m/s^2", 2.0, 4.0, 3.0),
        ],
    )
    yield _cut_out("TargetVehicleCutOutStraightRoad", "following_driving")
    yield _doc(
        "MisidentifiedOvertakingStraightRoad", "following_driving", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=11.0),
            _actor("slow", "vehicle", [60.0, 0.0, 0.0], speed="$lead_speed"),
            _actor("passer", "vehicle", [20.0, 3.5, 0.0], speed=14.0),
        ],
        params=[_param("lead_speed", "m/s", 3.0, 6.0, 4.0)],
        meta={"summary": "slow lead plus an overtaking vehicle alongside"},
    )
    yield _doc(
        "SingleTrafficParticipantStraightRoad", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("walker", "pedestrian", ["$walker_x", -3.5, 0.0]),
        ],
        params=[_param("walker_x", "m", 80.0, 200.0, 140.0)],
    )
    yield _doc(
        "MultipleTrafficParticipants", "following_driving", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("lead", "vehicle", [45.0, 0.0, 0.0], speed="$lead_speed"),
            _actor("responder", "emergency_vehicle", [10.0, 3.5, 0.0], speed=15.0),
            _actor("walker", "pedestrian", [120.0, -3.5, 0.0]),
        ],
        params=[_param("lead_speed", "m/s", 6.0, 10.0, 8.0)],
    )
    yield _doc(
        "StraightRoadLaneChangeLeftWithDeceleratingLead", "following_driving", "straight_two_lane",
        _lane_change_route(to_left=True),
        [
            _ego([5.0, 0.0, 0.0], speed=11.0),
            _actor("lead", "vehicle", [40.0, 0.0, 0.0], speed=10.0),
        ],
        events=[_event("lead", "time", "$brake_time", "decelerate", target=2.0, rate=3.0)],
        params=[_param("brake_time", "s", 3.0, 7.0, 4.0)],
    )
    yield _doc(
        "VehicleEntryDetectionAndResponse", "following_driving", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("entering", "vehicle", [45.0, 3.5, 0.0], speed="$entry_speed"),
        ],
        events=[_event("entering", "ego_gap", "$entry_gap", "lane_change", direction="right", duration=2.5)],
        params=[
            _param("entry_speed", "m/s", 5.0, 9.0, 7.0),
            _param("entry_gap", "m", 25.0, 45.0, 35.0),
        ],
    )
    yield _doc(
        "BicycleRidingAlongRoad", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=9.0),
            _actor("rider", "bicycle", [35.0, 0.0, 0.0], speed="$rider_speed"),
        ],
        params=[_param("rider_speed", "m/s", 3.0, 6.0, 4.0)],
    )
    yield _doc(
        "StableCarFollowing", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=8.0),
            _actor("lead", "vehicle", [30.0, 0.0, 0.0], speed="$lead_speed"),
        ],
        params=[_param("lead_speed", "m/s", 6.0, 10.0, 8.0)],
    )
    yield _doc(
        "StopAndGoFunction", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=9.0),
            _actor("lead", "vehicle", [30.0, 0.0, 0.0], speed=9.0),
        ],
        events=[
            _event("lead", "time", "$stop_time", "decelerate", target=0.0, rate=3.0),
            _event("lead", "time", "$go_time", "set_speed", speed=8.0),
        ],
        params=[
            _param("stop_time", "s", 3.0, 6.0, 4.0),
            _param("go_time", "s", 12.0, 18.0, 15.0),
        ],
    )
    yield _doc(
        "StraightRoadMixedSlowVehicles", "following_driving", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("slow_a", "vehicle", [55.0, 0.0, 0.0], speed="$slow_speed"),
            _actor("slow_b", "vehicle", [70.0, 3.5, 0.0], speed="$slow_speed"),
        ],
        params=[_param("slow_speed", "m/s", 2.0, 6.0, 4.0)],
    )
    yield _doc(
        "StraightRoadPedestrianAndVehicleSlow", "following_driving", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=9.0),
            _actor("lead", "vehicle", [40.0, 0.0, 0.0], speed="$lead_speed"),
            _actor("walker", "pedestrian", [90.0, -3.0, 0.0], speed=1.2),
        ],
        params=[_param("lead_speed", "m/s", 3.0, 6.0, 4.0)],
    )
    yield _doc(
        "CurvedRoadPedestrianAndVehicleSlow", "following_driving", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=9.0),
            _actor("lead", "vehicle", _pose("curved_road", "lane_0", 45.0), speed="$lead_speed"),
            _actor("walker", "pedestrian", _pose("curved_road", "lane_0", 120.0, offset=-3.0)),
        ],
        params=[_param("lead_speed", "m/s", 3.0, 6.0, 4.0)],
    )
    yield _cut_out("BicycleCutOut", "following_driving", lead_kind="bicycle")


def _emergency_braking():
    # The cutter rides the neighbor lane ahead of the ego; the faster ego
    # closes the gap until the lane change fires just off its nose.
    yield _doc(
        "HighSpeedCutInStraightRoad", "emergency_braking", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=12.0),
            _actor("cutter", "vehicle", [25.0, 3.5, 0.0], speed=8.0),
        ],
        events=[
            _event("cutter", "ego_gap", "$cut_gap", "lane_change", direction="right", duration=2.0),
            _event("cutter", "time", "$brake_time", "decelerate", target="$after_speed", rate=3.0),
            _event("cutter", "time", 14.0, "set_speed", speed=12.0),
        ],
        params=[
            _param("cut_gap", "m", 7.0, 12.0, 10.0),
            _param("brake_time", "s", 4.0, 7.0, 5.0),
            _param("after_speed", "m/s", 4.0, 8.0, 6.0),
        ],
    )
    yield _cut_out(
        "PostCutOutLeadVehicleStraightRoad", "emergency_braking",
        extra_params=(_param("late_margin", "m", 0.0, 1.0, 0.5),),
        meta={"summary": "late cut-out directly ahead of a stopped vehicle"},
    )
    yield _doc(
        "PedestrianCrossingRoad", "emergency_braking", "crosswalk_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("walker", "pedestrian", [200.0, -4.0, 1.5708]),
        ],
        events=[_event("walker", "ego_gap", "$trigger_gap", "cross_road", speed="$walk_speed")],
        params=[
            _param("walk_speed", "m/s", 1.0, 2.5, 1.5),
            _param("trigger_gap", "m", 15.0, 35.0, 25.0),
        ],
    )
    yield _doc(
        "BicycleCrossingRoad", "emergency_braking", "crosswalk_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("rider", "bicycle", [200.0, -5.0, 1.5708]),
        ],
        events=[_event("rider", "ego_gap", "$trigger_gap", "cross_road", speed="$cross_speed")],
        params=[
            _param("cross_speed", "m/s", 2.0, 5.0, 3.0),
            _param("trigger_gap", "m", 20.0, 40.0, 30.0),
        ],
    )
    yield _doc(
        "StraightVehicleConflict", "emergency_braking", "junction_cross",
        _route("junction_cross", ["approach", "straight_exit"]),
        [
            _ego(_pose("junction_cross", "approach", 5.0), speed=10.0),
            _actor("crosser", "vehicle", [-1.75, "$crosser_y", -1.5708], speed="$crosser_speed"),
        ],
        params=[
            _param("crosser_y", "m", 170.0, 230.0, 200.0),
            _param("crosser_speed", "m/s", 8.0, 12.0, 10.0),
        ],
    )
    yield _doc(
        "RightTurnVehicleConflict", "emergency_braking", "junction_cross",
        _route("junction_cross", ["approach", "right_turn", "south_exit"]),
        [
            _ego(_pose("junction_cross", "approach", 5.0), speed=10.0),
            _actor("crosser", "vehicle", [-1.75, "$crosser_y", -1.5708], speed="$crosser_speed"),
        ],
        params=[
            _param("crosser_y", "m", 170.0, 230.0, 200.0),
            _param("crosser_speed", "m/s", 8.0, 12.0, 10.0),
        ],
    )
    yield _doc(
        "LeftTurnVehicleConflict", "emergency_braking", "junction_cross",
        _route("junction_cross", ["approach", "left_turn", "north_exit"]),
        [
            _ego(_pose("junction_cross", "approach", 5.0), speed=10.0),
            _actor("oncomer", "vehicle", ["$oncomer_x", 1.75, 3.1416], speed="$oncomer_speed"),
        ],
        params=[
            _param("oncomer_x", "m", 170.0, 230.0, 200.0),
            _param("oncomer_speed", "m/s", 8.0, 13.0, 10.0),
        ],
    )
    yield _doc(
        "RoundaboutNavigation", "emergency_braking", "roundabout",
        _route("roundabout", ["entry", "ring", "exit"], step=30.0),
        [
            _ego(_pose("roundabout", "entry", 5.0), speed=8.0),
            _actor("circulating", "vehicle", _pose("roundabout", "ring", 8.0), speed="$ring_speed"),
        ],
        params=[_param("ring_speed", "m/s", 4.0, 7.0, 6.0)],
    )
    yield _doc(
        "CurvedRoadLeadDeceleration", "emergency_braking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=10.0),
            _actor("lead", "vehicle", _pose("curved_road", "lane_0", 40.0), speed=10.0),
        ],
        events=[_event("lead", "time", "$brake_time", "decelerate", target=1.0, rate="$brake_rate")],
        params=[
            _param("brake_time", "s", 4.0, 9.0, 6.0),
            _param("brake_rate", "m/s^2", 2.0, 4.0, 3.0),
        ],
    )
    yield _doc(
        "CrosswalkDetectionWithPedestrian", "emergency_braking", "crosswalk_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("walker", "pedestrian", [200.0, 6.0, -1.5708], speed="$walk_speed"),
        ],
        params=[_param("walk_speed", "m/s", 0.8, 1.6, 1.2)],
    )
    yield _doc(
        "CurvedRoadLeadEmergencyBrake", "emergency_braking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=10.0),
            _actor("lead", "vehicle", _pose("curved_road", "lane_0", 35.0), speed=10.0),
        ],
        events=[_event("lead", "time", "$brake_time", "decelerate", target=0.0, rate=6.0)],
        params=[_param("brake_time", "s", 3.0, 7.0, 5.0)],
    )
    yield _doc(
        "NightRainStraightRoadTruckEmergencyBrake", "emergency_braking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("hauler", "vehicle", [35.0, 0.0, 0.0], speed=10.0, dims=TRUCK),
        ],
        events=[_event("hauler", "time", "$brake_time", "decelerate", target=0.0, rate=5.0)],
        params=[_param("brake_time", "s", 3.0, 7.0, 5.0)],
        env={"time_of_day": "night", "weather": "rain"},
    )
    yield _doc(
        "OppositeLaneInvasionDetection", "emergency_braking", "two_way_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("invader", "vehicle", ["$invader_x", 2.3, 3.2916], speed="$invader_speed"),
        ],
        params=[
            _param("invader_x", "m", 120.0, 200.0, 150.0),
            _param("invader_speed", "m/s", 8.0, 14.0, 10.0),
        ],
        meta={"reduced_fidelity": "invading vehicle crosses the ego lane diagonally and exits"},
    )
    yield _doc(
        "CurvedRoadMixedSlowVehicles", "emergency_braking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=9.0),
            _actor("slow_car", "vehicle", _pose("curved_road", "lane_0", 50.0), speed="$slow_speed"),
            _actor("slow_bike", "bicycle", _pose("curved_road", "lane_0", 90.0), speed=3.0),
        ],
        params=[_param("slow_speed", "m/s", 2.0, 6.0, 4.0)],
    )
    yield _doc(
        "BicycleCutIn", "emergency_braking", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=9.0),
            _actor("rider", "bicycle", [25.0, 3.5, 0.0], speed=6.0),
        ],
        events=[_event("rider", "ego_gap", "$cut_gap", "lane_change", direction="right", duration=2.0)],
        params=[_param("cut_gap", "m", 15.0, 30.0, 22.0)],
    )
    yield _cut_out(
        "BicycleCutOutWithStaticPedestrian", "emergency_braking", lead_kind="bicycle",
        blocker=_actor("blocker", "pedestrian", [110.0, 0.0, 1.5708]),
    )
    yield _doc(
        "LeadBicycleDeceleration", "emergency_braking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=8.0),
            _actor("rider", "bicycle", [30.0, 0.0, 0.0], speed=5.0),
        ],
        events=[_event("rider", "time", "$brake_time", "decelerate", target=0.0, rate=2.0)],
        params=[_param("brake_time", "s", 4.0, 9.0, 6.0)],
    )


def _traffic_sign():
    yield _cruise(
        "SpeedLimitSignRecognitionAndResponse", "traffic_sign",
        meta={"reduced_fidelity": "sign conveyed through the lane speed-limit attribute"},
    )
    yield _doc(
        "StopYieldSignRecognitionAndResponse", "traffic_sign", "stop_sign_straight",
        STRAIGHT_ROUTE,
        [_ego([5.0, 0.0, 0.0], speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 8.0, 14.0, 10.0)],
    )
    yield _cruise(
        "LaneMarkingRecognitionAndResponse", "traffic_sign",
        meta={"reduced_fidelity": "marking quality is exercised by the lane-estimation metric, not by control"},
    )
    yield _doc(
        "CrosswalkRecognitionAndResponse", "traffic_sign", "crosswalk_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [_ego([5.0, 0.0, 0.0], speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 8.0, 14.0, 10.0)],
        meta={"reduced_fidelity": "empty crosswalk; no slow-down requirement is scored"},
    )
    yield _doc(
        "TrafficLightRecognitionAndResponse", "traffic_sign", "signal_straight",
        [[5.0, 0.0], [390.0, 0.0]],
        [_ego([5.0, 0.0, 0.0], speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 8.0, 15.0, 10.0)],
    )
    yield _doc(
        "DirectionalSignalRecognitionAndResponse", "traffic_sign", "junction_cross",
        _route("junction_cross", ["approach", "straight_exit"]),
        [_ego(_pose("junction_cross", "approach", 5.0), speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 8.0, 14.0, 10.0)],
        meta={"reduced_fidelity": "directional signage is implied by the routed turn choice"},
    )
    yield _cruise(
        "SpeedLimitActivationAndDeactivation", "traffic_sign",
        meta={"reduced_fidelity": "single uniform speed-limit zone; zone transitions are not modeled"},
    )
    yield _cruise(
        "CurvedRoadSpeedLimit", "traffic_sign", map_name="curved_road",
        meta={"reduced_fidelity": "sign conveyed through the lane speed-limit attribute"},
    )


def _overtaking():
    yield _doc(
        "PedestrianObstacleDetection", "overtaking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("walker", "pedestrian", ["$walker_x", 0.0, 1.5708]),
        ],
        params=[_param("walker_x", "m", 90.0, 160.0, 120.0)],
    )
    yield _doc(
        "PedestrianWalkingAlongRoad", "overtaking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("walker", "pedestrian", [60.0, -2.8, 0.0], speed="$walk_speed"),
        ],
        params=[_param("walk_speed", "m/s", 0.8, 1.8, 1.4)],
    )
    yield _doc(
        "Overtaking", "overtaking", "straight_two_lane",
        [[5.0, 0.0], [120.0, 0.0], [180.0, 3.5], [280.0, 3.5], [340.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=12.0),
            _actor("slow", "vehicle", [140.0, 0.0, 0.0], speed="$slow_speed"),
        ],
        params=[_param("slow_speed", "m/s", 2.0, 5.0, 3.0)],
    )
    yield _cut_out(
        "StraightRoadPostCutOutStaticCar", "overtaking",
        meta={"summary": "cut-out reveals a stopped car; passing is expected"},
    )
    yield _doc(
        "StraightRoadCutInAndStop", "overtaking", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("cutter", "vehicle", [22.0, 3.5, 0.0], speed=12.0),
        ],
        events=[
            _event("cutter", "time", "$cut_time", "lane_change", direction="right", duration=2.0),
            _event("cutter", "time", "$stop_time", "decelerate", target=0.0, rate=4.0),
        ],
        params=[
            _param("cut_time", "s", 2.0, 5.0, 3.0),
            _param("stop_time", "s", 5.0, 9.0, 6.0),
        ],
    )
    yield _doc(
        "CurvedRoadStaticMotorcycleAndCar", "overtaking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=9.0),
            _actor("bike", "bicycle", _pose("curved_road", "lane_0", 110.0), dims=MOTORCYCLE, behavior="stationary"),
            _actor("car", "vehicle", _pose("curved_road", "lane_0", 118.0, offset=0.8), behavior="stationary"),
        ],
        params=[_param("ego_speed_margin", "m/s", 0.0, 2.0, 1.0)],
    )
    yield _doc(
        "CurvedRoadStaticPedestrianAndCar", "overtaking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=9.0),
            _actor("walker", "pedestrian", _pose("curved_road", "lane_0", 112.0, offset=-1.0)),
            _actor("car", "vehicle", _pose("curved_road", "lane_0", 120.0), behavior="stationary"),
        ],
        params=[_param("ego_speed_margin", "m/s", 0.0, 2.0, 1.0)],
    )
    yield _doc(
        "StraightRoadCarAccident", "overtaking", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("wreck_a", "vehicle", ["$scene_x", 0.4, 0.5], behavior="stationary"),
            _actor("wreck_b", "vehicle", [125.0, -0.8, -0.3], behavior="stationary"),
        ],
        params=[_param("scene_x", "m", 100.0, 150.0, 118.0)],
    )
    yield _doc(
        "CurvedRoadAccidentWithPedestrianAndCar", "overtaking", "curved_road",
        _route("curved_road", ["lane_0"], step=40.0),
        [
            _ego(_pose("curved_road", "lane_0", 5.0), speed=9.0),
            _actor("wreck", "vehicle", _pose("curved_road", "lane_0", 115.0, offset=0.5), behavior="stationary"),
            _actor("bystander", "pedestrian", _pose("curved_road", "lane_0", 117.0, offset=-2.2)),
        ],
        params=[_param("ego_speed_margin", "m/s", 0.0, 2.0, 1.0)],
    )
    yield _cut_out(
        "DayRainStraightRoadCutOutWithCones", "overtaking",
        blocker=_actor("cones", "static_obstacle", [110.0, 0.0, 0.0], dims=CONE),
        env={"time_of_day": "noon", "weather": "rain"},
    )
    yield _doc(
        "TrafficConeDetection", "overtaking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("cone_a", "static_obstacle", ["$cone_x", 0.0, 0.0], dims=CONE),
            _actor("cone_b", "static_obstacle", [123.0, 0.6, 0.0], dims=CONE),
        ],
        params=[_param("cone_x", "m", 100.0, 160.0, 120.0)],
    )
    yield _doc(
        "StreetObstacleDetection", "overtaking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("debris", "static_obstacle", ["$debris_x", 0.0, 0.2]),
        ],
        params=[_param("debris_x", "m", 90.0, 170.0, 130.0)],
    )
    yield _doc(
        "AccidentWarningObjectDetection", "overtaking", "straight_single",
        STRAIGHT_ROUTE,
        [
            _ego([5.0, 0.0, 0.0], speed=10.0),
            _actor("warning", "static_obstacle", ["$warning_x", 0.0, 0.0], dims=CONE),
            _actor("stalled", "vehicle", [150.0, 0.0, 0.0], behavior="stationary"),
        ],
        params=[_param("warning_x", "m", 110.0, 140.0, 125.0)],
    )
    yield _cut_out(
        "BicycleCutOutWithMovingPedestrian", "overtaking", lead_kind="bicycle",
        blocker=_actor("blocker", "pedestrian", [110.0, -2.5, 1.5708]),
        extra_events=(_event("blocker", "ego_gap", 40.0, "cross_road", speed=1.3),),
    )


def _parking():
    yield _doc(
        "EmergencyRoadsideParking", "parking", "straight_single",
        [[5.0, 0.0], [150.0, 0.0], [280.0, 0.0]],
        [_ego([5.0, 0.0, 0.0], speed=10.0)],
        params=[_param("approach_speed", "m/s", 8.0, 12.0, 10.0)],
        meta={"reduced_fidelity": "stop-in-zone semantics; the pull-over lateral motion is not modeled"},
    )
    yield _doc(
        "RightmostLaneParking", "parking", "straight_two_lane",
        [[5.0, 3.5], [120.0, 3.5], [220.0, 0.0], [300.0, 0.0]],
        [_ego([5.0, 3.5, 0.0], speed=10.0)],
        params=[_param("approach_speed", "m/s", 8.0, 12.0, 10.0)],
        meta={"reduced_fidelity": "stop-in-zone semantics at the end of the rightmost lane"},
    )
    yield _doc(
        "ParkingSpotRecognition", "parking", "straight_single",
        [[5.0, 0.0], [100.0, 0.0], [180.0, 0.0]],
        [_ego([5.0, 0.0, 0.0], speed=8.0)],
        params=[_param("approach_speed", "m/s", 6.0, 10.0, 8.0)],
        meta={"reduced_fidelity": "stop-in-zone semantics; spot geometry is not modeled"},
    )


def _merging():
    yield _doc(
        "AdjacentLaneMergeWithoutVehicles", "merging", "highway_merge",
        _route("highway_merge", ["ramp", "main_tail"], step=80.0),
        [_ego(_pose("highway_merge", "ramp", 5.0), speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 12.0, 20.0, 16.0)],
    )
    yield _doc(
        "AdjacentLaneMergeWithVehicles", "merging", "highway_merge",
        # Mainline traffic parks at the end of the road; finish the route
        # well before the queue so a polite merge still completes it.
        _route("highway_merge", ["ramp", "main_tail"], step=80.0, end_margin=30.0),
        [
            _ego(_pose("highway_merge", "ramp", 5.0), speed="$ego_speed"),
            _actor("traffic_a", "vehicle", _pose("highway_merge", "main", 40.0), speed=20.0, behavior="idm_follow"),
            _actor("traffic_b", "vehicle", _pose("highway_merge", "main", 90.0), speed=20.0, behavior="idm_follow"),
        ],
        params=[_param("ego_speed", "m/s", 12.0, 20.0, 16.0)],
    )
    yield _doc(
        "LaneChangeHighwayEntranceRecognition", "merging", "straight_three_lane",
        [[5.0, 0.0], [140.0, 0.0], [240.0, 3.5], [390.0, 3.5]],
        [_ego([5.0, 0.0, 0.0], speed="$ego_speed")],
        params=[_param("ego_speed", "m/s", 10.0, 16.0, 13.0)],
        meta={"reduced_fidelity": "entrance signage implied by the routed lane change"},
    )
    yield _doc(
        "HighwayExitLeadVehicleDetection", "merging", "straight_two_lane",
        [[5.0, 0.0], [390.0, 0.0]],
        [
            _ego([5.0, 0.0, 0.0], speed=14.0),
            _actor("exiting", "vehicle", [50.0, 0.0, 0.0], speed=14.0),
        ],
        events=[_event("exiting", "time", "$exit_time", "decelerate", target="$exit_speed", rate=2.5)],
        params=[
            _param("exit_time", "s", 3.0, 7.0, 5.0),
            _param("exit_speed", "m/s", 5.0, 9.0, 7.0),
        ],
        meta={"reduced_fidelity": "exit ramp represented by the lead vehicle slowing in lane"},
    )


_BUILDERS = (
    _adaptive_cruise_control,
    _following_driving,
    _emergency_braking,
    _traffic_sign,
    _overtaking,
    _parking,
    _merging,
)

CATALOG_VERSION = "1"


def build_documents() -> list[ScenarioDocument]:
    """Construct and validate all 70 functional test items."""
    docs = []
    for builder in _BUILDERS:
        for raw in builder():
            docs.append(document_from_dict(raw))
    return docs


def build_catalog() -> Catalog:
    return Catalog(items=tuple(build_documents()), version=CATALOG_VERSION)
