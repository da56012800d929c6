"""Synthetic sensors: forward camera frames and LiDAR sweeps.

Both sensors are pure functions of the world state, produce their own
ground truth, and persist to a shared binary container format so that
recorded frames can be corrupted, attacked and re-scored offline.
"""

from .camera import (
    DEFAULT_CAMERA,
    DETECTION_CLASS_FOR_KIND,
    CameraConfig,
    ImageBox,
    ImageFrame,
    render_camera,
)
from .containers import (
    CLOUD_MAGIC,
    FRAME_MAGIC,
    MODEL_MAGIC,
    ContainerError,
    load_cloud,
    load_frame,
    read_blob,
    save_cloud,
    save_frame,
    write_blob,
)
from .lidar import DEFAULT_LIDAR, REFLECTIVITY, CloudBox, LidarConfig, PointCloud, scan_lidar

__all__ = [
    "DEFAULT_CAMERA",
    "DEFAULT_LIDAR",
    "DETECTION_CLASS_FOR_KIND",
    "REFLECTIVITY",
    "CLOUD_MAGIC",
    "FRAME_MAGIC",
    "MODEL_MAGIC",
    "CameraConfig",
    "CloudBox",
    "ContainerError",
    "ImageBox",
    "ImageFrame",
    "LidarConfig",
    "PointCloud",
    "load_cloud",
    "load_frame",
    "read_blob",
    "render_camera",
    "save_cloud",
    "save_frame",
    "scan_lidar",
    "write_blob",
]
