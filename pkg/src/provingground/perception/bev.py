"""Bird's-eye-view occupancy rasterization of a point cloud."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..sensors.lidar import PointCloud

# Points per cell at which occupancy saturates to 1.
SATURATION_COUNT = 4


@dataclass(frozen=True)
class BevConfig:
    """Square grid centered on the sensor, axis 0 forward, axis 1 left."""

    extent: float = 40.0
    cell: float = 0.25

    def __post_init__(self):
        if self.extent <= 0 or self.cell <= 0:
            raise ValueError("extent and cell must be positive")

    @property
    def size(self) -> int:
        return int(round(2.0 * self.extent / self.cell))


DEFAULT_BEV = BevConfig()


def rasterize_bev(cloud: PointCloud, config: BevConfig = DEFAULT_BEV) -> np.ndarray:
    """Occupancy grid with cell value min(1, points_in_cell / 4).

    Cell (i, j) covers x in [i*cell - extent, (i+1)*cell - extent) and the
    same band in y; points outside the extent are ignored, z is not.
    """
    size = config.size
    grid = np.zeros((size, size), dtype=np.float32)
    if len(cloud.points):
        i = np.floor((cloud.points[:, 0] + config.extent) / config.cell).astype(np.int64)
        j = np.floor((cloud.points[:, 1] + config.extent) / config.cell).astype(np.int64)
        keep = (i >= 0) & (i < size) & (j >= 0) & (j < size)
        counts = np.zeros((size, size), dtype=np.int64)
        np.add.at(counts, (i[keep], j[keep]), 1)
        grid = np.minimum(1.0, counts / SATURATION_COUNT).astype(np.float32)
    return grid


def cell_center(config: BevConfig, i: float, j: float) -> tuple[float, float]:
    """Meter coordinates of the center of (fractional) cell indices."""
    return (
        (i + 0.5) * config.cell - config.extent,
        (j + 0.5) * config.cell - config.extent,
    )


GROUND_CLEARANCE = 0.3


def remove_ground(cloud: PointCloud, clearance: float = GROUND_CLEARANCE) -> PointCloud:
    """Drop returns within clearance of the ground plane.

    The sensor sits origin[2] above flat ground, so ground returns lie at
    sensor-frame z = -origin[2]. Detector inputs are rasterized from the
    cropped cloud; otherwise the concentric ground rings leave arc patterns
    that a window scorer confuses with object faces. Ground-truth boxes
    pass through untouched.
    """
    floor = -cloud.origin[2] + clearance
    return replace(cloud, points=cloud.points[cloud.points[:, 2] > floor])
