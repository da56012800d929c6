"""Agent behavior tests: cruise, braking, signals, lane keeping, modes."""

from __future__ import annotations

import math

import pytest

from provingground.agents import (
    AgentObservation,
    AgentParams,
    PerceptionAgent,
    RuleAgent,
    WorldDetection,
    make_agent,
    privileged_observation,
)
from provingground.geometry import OrientedBox
from provingground.metrics import driving_score, infraction_penalty, route_completion
from provingground.scenario import default_instance, load_catalog
from provingground.sim import ACCEL_MIN, instantiate, run_episode


from test_sim import ConstantAgent, car, ego_actor, setup_for


def first_obs(setup):
    return privileged_observation(setup.initial, setup, 0.0)


def sensor_obs(setup, detections):
    state = setup.initial
    return AgentObservation(
        mode="sensor",
        setup=setup,
        progress=0.0,
        tick=state.tick,
        time=state.time,
        ego=state.ego(),
        signal_phases=state.signal_phases,
        maneuvers=state.maneuvers,
        detections=tuple(detections),
    )


def test_empty_road_below_desired_accelerates():
    setup = setup_for([ego_actor(speed=5.0)])
    agent = RuleAgent(AgentParams(desired_speed=12.0))
    agent.reset(setup)
    control = agent.decide(first_obs(setup))
    assert control.acceleration > 0.0
    assert control.acceleration == pytest.approx(2.0)
    assert control.lane_change == "none"


def test_at_desired_speed_holds():
    setup = setup_for([ego_actor(speed=10.0)])
    agent = RuleAgent()
    agent.reset(setup)
    control = agent.decide(first_obs(setup))
    assert abs(control.acceleration) < 0.3


def test_stopped_lead_five_meters_forces_max_brake():
    # bumper gap 5 m at 10 m/s: time to collision well under the trigger
    setup = setup_for([ego_actor(x=5.0, speed=10.0), car("lead", 14.6, 0.0, speed=0.0)])
    agent = RuleAgent()
    agent.reset(setup)
    control = agent.decide(first_obs(setup))
    assert control.acceleration == ACCEL_MIN


def test_red_light_ten_meters_ahead_stops_short():
    setup = setup_for([ego_actor(x=187.7, speed=10.0)], map_name="signal_straight")
    agent = RuleAgent()
    agent.reset(setup)
    state = setup.initial
    obs = AgentObservation(
        mode="privileged",
        setup=setup,
        progress=0.0,
        tick=state.tick,
        time=13.0,
        ego=state.ego(),
        signal_phases=("red", "red"),
        maneuvers=(),
        world=state,
    )
    control = agent.decide(obs)
    assert control.acceleration < 0.0
    # the commanded deceleration, held, stops the ego before the line
    stopping = 10.0**2 / (2.0 * abs(control.acceleration))
    assert stopping < 10.0


def test_red_light_closed_loop_waits_then_crosses():
    setup = setup_for([ego_actor(x=75.0, speed=10.0)], map_name="signal_straight")
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    assert log.infraction_kinds() == []
    waited = False
    crossing_phase = None
    for rec in log.records:
        ego = rec["actors"][0]
        front = ego["station"] + 2.3
        if crossing_phase is None:
            if front > 200.0:
                crossing_phase = rec["phases"][0]
            elif rec["phases"][0] == "red" and ego["speed"] < 0.5:
                waited = True
    assert waited
    assert crossing_phase == "green"


def test_stop_sign_served_by_rule_agent():
    setup = setup_for([ego_actor(x=150.0, speed=10.0)], map_name="stop_sign_straight")
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    assert log.infraction_kinds() == []
    speeds = [r["actors"][0]["speed"] for r in log.records]
    assert min(speeds) < 0.1


def test_route_demanded_lane_change():
    catalog = load_catalog()
    doc = catalog.item("StraightRoadLaneChangeLeft")
    setup = instantiate(doc, default_instance(doc, seed=2))
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    assert log.infraction_kinds() == []
    lanes = [r["actors"][0]["lane"] for r in log.records]
    assert lanes[0] == "lane_0"
    assert lanes[-1] == "lane_1"


def test_rule_agent_perfect_score_on_cruising():
    catalog = load_catalog()
    doc = catalog.item("StraightRoadCruising")
    setup = instantiate(doc, default_instance(doc, seed=0))
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    completion = log.completion(setup.route)
    penalty = infraction_penalty(log.infraction_kinds())
    assert driving_score(completion, penalty) == pytest.approx(100.0)
    # raw projection agrees up to the route-done slack
    assert route_completion(log.ego_positions(), setup.route) > 99.5


def test_unprotected_left_yields_to_oncoming():
    catalog = load_catalog()
    doc = catalog.item("LeftTurnVehicleConflict")
    setup = instantiate(doc, default_instance(doc, seed=1))
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    assert log.infraction_kinds() == []


def test_crossing_pedestrian_braked_for():
    catalog = load_catalog()
    doc = catalog.item("PedestrianCrossingRoad")
    setup = instantiate(doc, default_instance(doc, seed=1))
    log = run_episode(setup, RuleAgent())
    assert log.termination == "route_done"
    assert log.infraction_kinds() == []
    # the walker forced a real slowdown at some point
    speeds = [r["actors"][0]["speed"] for r in log.records]
    assert min(speeds) < max(speeds) - 3.0


def detection_for(x, y, speed=0.0):
    return WorldDetection(
        box=OrientedBox(x, y, 0.0, 4.6, 2.0), cls="vehicle", confidence=0.9, speed=speed
    )


def test_perception_agent_brakes_on_detection():
    setup = setup_for([ego_actor(x=5.0, speed=10.0), car("lead", 14.6, 0.0, speed=0.0)])
    agent = PerceptionAgent()
    agent.reset(setup)
    control = agent.decide(sensor_obs(setup, [detection_for(14.6, 0.0)]))
    assert control.acceleration == ACCEL_MIN


def test_perception_agent_blind_without_detection():
    # same world, but the detector missed the lead: no braking decision
    setup = setup_for([ego_actor(x=5.0, speed=5.0), car("lead", 14.6, 0.0, speed=0.0)])
    agent = PerceptionAgent(AgentParams(desired_speed=12.0))
    agent.reset(setup)
    control = agent.decide(sensor_obs(setup, []))
    assert control.acceleration > 0.0


def test_observation_mode_validation():
    setup = setup_for([ego_actor()])
    state = setup.initial
    with pytest.raises(ValueError):
        AgentObservation(
            mode="privileged", setup=setup, progress=0.0, tick=0, time=0.0,
            ego=state.ego(), detections=(),
        )
    with pytest.raises(ValueError):
        AgentObservation(
            mode="sensor", setup=setup, progress=0.0, tick=0, time=0.0,
            ego=state.ego(), world=state,
        )
    with pytest.raises(ValueError):
        AgentObservation(
            mode="oracle", setup=setup, progress=0.0, tick=0, time=0.0,
            ego=state.ego(),
        )


def test_agents_reject_wrong_mode():
    setup = setup_for([ego_actor()])
    with pytest.raises(ValueError):
        PerceptionAgent().decide(first_obs(setup))
    with pytest.raises(ValueError):
        RuleAgent().decide(sensor_obs(setup, []))


def test_reset_clears_memory():
    setup = setup_for([ego_actor(x=150.0, speed=10.0)], map_name="stop_sign_straight")
    agent = RuleAgent()
    agent.reset(setup)
    agent.memory.satisfied_signs = (0,)
    agent.reset(setup)
    assert agent.memory.satisfied_signs == ()
    assert agent.memory.initial_speed == 10.0


def test_decisions_repeatable():
    setup = setup_for([ego_actor(speed=8.0), car("lead", 40.0, 0.0, speed=6.0)])
    a, b = RuleAgent(), RuleAgent()
    a.reset(setup)
    b.reset(setup)
    obs = first_obs(setup)
    assert a.decide(obs) == b.decide(obs)


def test_make_agent_factory():
    assert isinstance(make_agent("rule"), RuleAgent)
    assert isinstance(make_agent("perception"), PerceptionAgent)
    with pytest.raises(ValueError):
        make_agent("psychic")
