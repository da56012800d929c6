"""Concrete, runnable configuration of one episode."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..maps import MapModel
from ..scenario.types import EnvironmentSpec, ScenarioInstance

if TYPE_CHECKING:
    from .state import WorldState


@dataclass(frozen=True, eq=False)
class SimSetup:
    document_id: str
    instance: ScenarioInstance
    map: MapModel
    route: np.ndarray
    route_length: float
    initial: "WorldState"
    successor_choice: tuple[tuple[str, str], ...]
    environment: EnvironmentSpec
    max_time: float
    seed: int
    digest: str

    def preferred_successor(self, lane_id: str) -> str | None:
        for from_lane, to_lane in self.successor_choice:
            if from_lane == lane_id:
                return to_lane
        successors = self.map.lane(lane_id).successors
        return successors[0] if successors else None
