"""Route completion, infraction penalty and driving score."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from provingground import geometry

# Infraction kinds and their severity coefficients, ordered by severity.
PENALTY_COEFFICIENTS: dict[str, float] = {
    "collision_pedestrian": 1.0,
    "collision_vehicle": 0.70,
    "collision_static": 0.60,
    "red_light": 0.40,
    "fail_yield_emergency": 0.40,
    "stop_sign": 0.25,
}

INFRACTION_KINDS: tuple[str, ...] = tuple(PENALTY_COEFFICIENTS)


class UnknownInfractionError(ValueError):
    """Raised for an infraction kind outside the six scored kinds."""


def infraction_penalty(
    counts: Mapping[str, int],
    coefficients: Mapping[str, float] = PENALTY_COEFFICIENTS,
) -> float:
    """Penalty P = 1 / (1 + sum_j c_j * count_j), in (0, 1].

    An agent starts from an ideal 1.0 and every infraction drags the
    penalty down; P is monotone non-increasing in every count.
    """
    total = 0.0
    for kind in sorted(counts):
        if kind not in coefficients:
            raise UnknownInfractionError(f"unknown infraction kind: {kind!r}")
        n = counts[kind]
        if n < 0:
            raise ValueError(f"negative count for {kind!r}")
        total += coefficients[kind] * n
    return 1.0 / (1.0 + total)


def route_completion(ego_positions: np.ndarray, route: np.ndarray) -> float:
    """Percentage of the route arclength reached by the ego, max 100.

    `ego_positions` is the (n, 2) history of ego centers; progress is the
    furthest monotone projection onto the route polyline.
    """
    route = np.asarray(route, dtype=float)
    length = geometry.polyline_lengths(route)[-1]
    if length <= 0.0:
        raise ValueError("route has zero length")
    ego_positions = np.atleast_2d(np.asarray(ego_positions, dtype=float))
    progress = 0.0
    for p in ego_positions:
        station, _ = geometry.project_on_polyline(p, route)
        progress = max(progress, station)
    return float(np.clip(100.0 * progress / length, 0.0, 100.0))


def driving_score(completion: float, penalty: float) -> float:
    """Product of route completion and infraction penalty."""
    if not 0.0 <= completion <= 100.0:
        raise ValueError("route completion must be in [0, 100]")
    if not 0.0 < penalty <= 1.0:
        raise ValueError("penalty must be in (0, 1]")
    return completion * penalty


@dataclass(frozen=True)
class EpisodeResult:
    """Scored outcome of one episode (one scenario instance, one agent)."""

    instance_id: str
    agent: str
    item: str
    variant: int
    completion: float
    penalty: float
    score: float
    infraction_counts: dict[str, int] = field(default_factory=dict)
    perception: dict[str, float] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.completion <= 100.0:
            raise ValueError("route completion out of [0, 100]")
        if not 0.0 < self.penalty <= 1.0:
            raise ValueError("penalty out of (0, 1]")
        if abs(self.score - self.completion * self.penalty) > 1e-9:
            raise ValueError("score must equal completion * penalty")
        for kind in self.infraction_counts:
            if kind not in PENALTY_COEFFICIENTS:
                raise UnknownInfractionError(f"unknown infraction kind: {kind!r}")

    @classmethod
    def from_episode(
        cls,
        instance_id: str,
        agent: str,
        item: str,
        variant: int,
        completion: float,
        infraction_counts: Mapping[str, int],
        perception: Mapping[str, float] | None = None,
    ) -> "EpisodeResult":
        penalty = infraction_penalty(infraction_counts)
        return cls(
            instance_id=instance_id,
            agent=agent,
            item=item,
            variant=variant,
            completion=completion,
            penalty=penalty,
            score=driving_score(completion, penalty),
            infraction_counts=dict(infraction_counts),
            perception=dict(perception) if perception is not None else None,
        )


def count_infractions(kinds: Sequence[str]) -> dict[str, int]:
    """Tally a sequence of infraction kinds into a counts map."""
    counts: dict[str, int] = {}
    for kind in kinds:
        if kind not in PENALTY_COEFFICIENTS:
            raise UnknownInfractionError(f"unknown infraction kind: {kind!r}")
        counts[kind] = counts.get(kind, 0) + 1
    return counts
