from .engine import (
    collision_check,
    detect_collisions,
    detect_rule_infractions,
    route_progress,
    step,
)
from .episode import (
    EpisodeLog,
    read_log,
    run_episode,
    serialize_log,
    write_log,
)
from .instantiate import InstantiationError, instantiate
from .setup import SimSetup
from .state import (
    ACCEL_MAX,
    ACCEL_MIN,
    DT,
    INFRACTION_FOR_KIND,
    TERMINATIONS,
    ActorState,
    EgoControl,
    InfractionEvent,
    ManeuverState,
    RuleTrackers,
    WorldState,
)

__all__ = [
    "ACCEL_MAX",
    "ACCEL_MIN",
    "DT",
    "INFRACTION_FOR_KIND",
    "TERMINATIONS",
    "ActorState",
    "EgoControl",
    "EpisodeLog",
    "InfractionEvent",
    "InstantiationError",
    "ManeuverState",
    "RuleTrackers",
    "SimSetup",
    "WorldState",
    "collision_check",
    "detect_collisions",
    "detect_rule_infractions",
    "instantiate",
    "read_log",
    "route_progress",
    "run_episode",
    "serialize_log",
    "step",
    "write_log",
]
