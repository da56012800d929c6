"""The closed loop: observe, decide, step, log.

An episode runs until the route completes, the clock runs out, or the
ego collides (collisions are logged first, then the episode halts).
Logs serialize to line-delimited JSON and are byte-identical across
repeated runs of the same setup and agent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..geometry import project_on_polyline
from .engine import step
from .setup import SimSetup
from .state import DT, EgoControl, InfractionEvent, WorldState

ROUTE_DONE_SLACK = 0.5


@dataclass
class EpisodeLog:
    setup_digest: str
    seed: int
    termination: str
    records: tuple[dict, ...]
    infractions: tuple[InfractionEvent, ...]
    states: tuple[WorldState, ...] = field(default=(), repr=False)

    def ego_positions(self) -> np.ndarray:
        out = []
        for record in self.records:
            for actor in record["actors"]:
                if actor["id"] == "ego":
                    out.append((actor["x"], actor["y"]))
                    break
        return np.asarray(out, dtype=float)

    def completion(self, route: np.ndarray) -> float:
        """Route completion percentage; reaching the end slack counts as 100."""
        from ..metrics import route_completion

        if self.termination == "route_done":
            return 100.0
        return route_completion(self.ego_positions(), route)

    def infraction_kinds(self) -> list[str]:
        return [event.kind for event in self.infractions]


def _record(state: WorldState, events: list[InfractionEvent]) -> dict:
    return {
        "tick": state.tick,
        "time": round(state.time, 9),
        "actors": [
            {
                "id": a.actor_id,
                "x": round(float(a.x), 9),
                "y": round(float(a.y), 9),
                "heading": round(float(a.heading), 9),
                "speed": round(float(a.speed), 9),
                "lane": a.lane_id,
                "station": round(float(a.station), 9),
            }
            for a in state.actors
        ],
        "phases": list(state.signal_phases),
        "events": [{"kind": e.kind, "actor": e.actor_id} for e in events],
    }


def run_episode(
    setup: SimSetup,
    agent,
    observe: Callable[[WorldState, SimSetup, float], object] | None = None,
    keep_states: bool = False,
) -> EpisodeLog:
    """Drive one agent through one scenario instance to termination.

    ``observe`` maps (state, setup, progress) to whatever the agent's
    decide() expects; by default the agent gets a privileged view of
    the true world state.
    """
    if observe is None:
        from ..agents import privileged_observation

        observe = privileged_observation
    if hasattr(agent, "reset"):
        agent.reset(setup)

    state = setup.initial
    ego = state.ego()
    progress, _ = project_on_polyline((ego.x, ego.y), setup.route)
    progress = min(progress, setup.route_length)

    records = [_record(state, [])]
    states = [state]
    infractions: list[InfractionEvent] = []
    termination = "timeout"
    max_ticks = int(math.ceil(setup.max_time / DT))

    for _ in range(max_ticks):
        control = agent.decide(observe(state, setup, progress))
        if not isinstance(control, EgoControl):
            raise TypeError(f"agent returned {type(control).__name__}, not EgoControl")
        state, events = step(state, control, setup, progress)
        ego = state.ego()
        station, _ = project_on_polyline((ego.x, ego.y), setup.route)
        progress = max(progress, min(station, setup.route_length))

        infractions.extend(events)
        records.append(_record(state, events))
        if keep_states:
            states.append(state)

        if any(e.kind.startswith("collision") for e in events):
            termination = "collision_stop"
            break
        if progress >= setup.route_length - ROUTE_DONE_SLACK:
            termination = "route_done"
            break
        if state.time >= setup.max_time - 1e-9:
            termination = "timeout"
            break

    return EpisodeLog(
        setup_digest=setup.digest,
        seed=setup.seed,
        termination=termination,
        records=tuple(records),
        infractions=tuple(infractions),
        states=tuple(states) if keep_states else (),
    )


def write_log(log: EpisodeLog, path: str | Path) -> None:
    """One meta line, then one line per tick."""
    path = Path(path)
    lines = [
        json.dumps(
            {
                "digest": log.setup_digest,
                "seed": log.seed,
                "termination": log.termination,
            },
            sort_keys=True,
        )
    ]
    lines.extend(json.dumps(record, sort_keys=True) for record in log.records)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_log(path: str | Path) -> EpisodeLog:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = json.loads(lines[0])
    records = tuple(json.loads(line) for line in lines[1:])
    infractions = tuple(
        InfractionEvent(record["tick"], event["kind"], event["actor"])
        for record in records
        for event in record["events"]
    )
    return EpisodeLog(
        setup_digest=meta["digest"],
        seed=meta["seed"],
        termination=meta["termination"],
        records=records,
        infractions=infractions,
    )


def serialize_log(log: EpisodeLog) -> str:
    meta = json.dumps(
        {"digest": log.setup_digest, "seed": log.seed, "termination": log.termination},
        sort_keys=True,
    )
    body = "\n".join(json.dumps(record, sort_keys=True) for record in log.records)
    return meta + "\n" + body + "\n"
