"""Seeded, severity-graded corruptions for camera frames and point clouds."""

from .image import corrupt_image
from .points import corrupt_points
from .spec import (
    CORRUPTION_KINDS,
    GROUP_FOR_KIND,
    OBJECT_KINDS,
    SENSOR_KINDS,
    SEVERITY_PATH,
    WEATHER_KINDS,
    CorruptionError,
    CorruptionSpec,
    allowed_targets,
    load_severity_table,
    severity_params,
)

__all__ = [
    "CORRUPTION_KINDS",
    "GROUP_FOR_KIND",
    "OBJECT_KINDS",
    "SENSOR_KINDS",
    "SEVERITY_PATH",
    "WEATHER_KINDS",
    "CorruptionError",
    "CorruptionSpec",
    "allowed_targets",
    "corrupt_image",
    "corrupt_points",
    "load_severity_table",
    "severity_params",
]
