"""Episode and perception scoring.

System-level metrics follow the public driving-leaderboard convention:
route completion R in [0, 100], an infraction penalty P in (0, 1] computed
as 1 / (1 + sum_j c_j * count_j) over severity-weighted infraction counts,
and the driving score R*P. Perception metrics are IoU, average precision at
a fixed IoU threshold, and row-wise lane accuracy.
"""

from __future__ import annotations

from provingground.metrics.scores import (
    INFRACTION_KINDS,
    PENALTY_COEFFICIENTS,
    EpisodeResult,
    driving_score,
    infraction_penalty,
    route_completion,
)
from provingground.metrics.detection import average_precision, iou, lane_accuracy
from provingground.metrics.report import ItemRow, Report, aggregate_report

__all__ = [
    "INFRACTION_KINDS",
    "PENALTY_COEFFICIENTS",
    "EpisodeResult",
    "ItemRow",
    "Report",
    "aggregate_report",
    "average_precision",
    "driving_score",
    "infraction_penalty",
    "iou",
    "lane_accuracy",
    "route_completion",
]
