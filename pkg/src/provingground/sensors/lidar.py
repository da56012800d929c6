"""Spinning LiDAR mounted at the ego roof center.

scan_lidar casts one ray per (elevation, azimuth) pair against every
other actor's 3D box and against the flat ground plane, keeps the
nearest hit within range, and reports points in the sensor frame
(x forward, y left, z up). Intensity is a per-surface reflectivity
scaled by 1/(1+r/40). Actors that reflect at least five points get an
oriented ground-truth box.

The scan is a pure function of (state, config): no randomness, no
hidden state, bit-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..maps import MapModel
from ..sim.state import WorldState
from .camera import DETECTION_CLASS_FOR_KIND

REFLECTIVITY = {
    "ground": 0.30,
    "car": 0.80,
    "pedestrian": 0.50,
    "bicycle": 0.60,
    "obstacle": 0.70,
}


@dataclass(frozen=True)
class LidarConfig:
    """Beam table and range limit.

    elevations are in degrees; azimuth_step sweeps a full turn starting
    at the ego forward direction, counter-clockwise. mount_height None
    places the sensor at the ego roof (its box height).
    """

    elevations: tuple[float, ...] = tuple(float(e) for e in range(-15, 16, 2))
    azimuth_step: float = 0.5
    max_range: float = 80.0
    mount_height: float | None = None

    @property
    def channels(self) -> int:
        return len(self.elevations)


DEFAULT_LIDAR = LidarConfig()


@dataclass(frozen=True)
class CloudBox:
    """Oriented 3D ground-truth box in the sensor frame."""

    cls: str
    x: float
    y: float
    z: float
    length: float
    width: float
    height: float
    heading: float
    actor_id: str = ""
    n_points: int = 0


@dataclass(frozen=True, eq=False)
class PointCloud:
    """One LiDAR sweep: float64 (x, y, z, intensity) rows, sensor frame."""

    points: np.ndarray
    gt_boxes: tuple[CloudBox, ...]
    origin: tuple[float, float, float, float]
    config: LidarConfig = DEFAULT_LIDAR


def _ray_box_hits(origin: np.ndarray, dirs: np.ndarray, actor) -> np.ndarray:
    """Entry distance per ray for one actor box, inf where missed."""
    cos_h, sin_h = math.cos(actor.heading), math.sin(actor.heading)
    ox = (origin[0] - actor.x) * cos_h + (origin[1] - actor.y) * sin_h
    oy = -(origin[0] - actor.x) * sin_h + (origin[1] - actor.y) * cos_h
    oz = origin[2]
    dx = dirs[:, 0] * cos_h + dirs[:, 1] * sin_h
    dy = -dirs[:, 0] * sin_h + dirs[:, 1] * cos_h
    dz = dirs[:, 2]
    o = np.stack([np.full_like(dz, ox), np.full_like(dz, oy), np.full_like(dz, oz)], axis=1)
    d = np.stack([dx, dy, dz], axis=1)
    lo = np.array([-actor.length / 2.0, -actor.width / 2.0, 0.0])
    hi = np.array([actor.length / 2.0, actor.width / 2.0, actor.height])
    # degenerate components get a tiny slope: parallel rays outside a slab
    # then produce a huge same-sign interval and miss, as they should
    d = np.where(np.abs(d) < 1e-12, 1e-12, d)
    t1 = (lo[None, :] - o) / d
    t2 = (hi[None, :] - o) / d
    t_near = np.minimum(t1, t2).max(axis=1)
    t_far = np.maximum(t1, t2).min(axis=1)
    hit = (t_far >= t_near) & (t_near > 1e-6)
    return np.where(hit, t_near, np.inf)


def scan_lidar(state: WorldState, world_map: MapModel | None = None, config: LidarConfig = DEFAULT_LIDAR) -> PointCloud:
    """Sweep the LiDAR once and return the resulting point cloud.

    The map argument is accepted for interface symmetry with the camera;
    the road surface is modeled as the flat ground plane z=0.
    """
    ego = state.ego()
    mount = ego.height if config.mount_height is None else config.mount_height
    origin = np.array([ego.x, ego.y, mount])

    n_az = int(round(360.0 / config.azimuth_step))
    az = np.radians(np.arange(n_az) * config.azimuth_step)
    el = np.radians(np.asarray(config.elevations, dtype=float))
    # elevation-major ray order keeps the output layout stable
    az_grid = np.repeat(az[None, :], len(el), axis=0).ravel()
    el_grid = np.repeat(el[:, None], n_az, axis=1).ravel()

    cos_e = np.cos(el_grid)
    dirs_sensor = np.stack(
        [cos_e * np.cos(az_grid), cos_e * np.sin(az_grid), np.sin(el_grid)], axis=1
    )
    cos_h, sin_h = math.cos(ego.heading), math.sin(ego.heading)
    dirs_world = np.stack(
        [
            dirs_sensor[:, 0] * cos_h - dirs_sensor[:, 1] * sin_h,
            dirs_sensor[:, 0] * sin_h + dirs_sensor[:, 1] * cos_h,
            dirs_sensor[:, 2],
        ],
        axis=1,
    )

    with np.errstate(divide="ignore"):
        t_ground = np.where(dirs_world[:, 2] < 0.0, -origin[2] / dirs_world[:, 2], np.inf)
    best_t = t_ground.copy()
    best_idx = np.full(len(best_t), -1, dtype=np.int64)

    others = [a for a in state.actors if a.actor_id != ego.actor_id]
    for idx, actor in enumerate(others):
        t = _ray_box_hits(origin, dirs_world, actor)
        closer = t < best_t
        best_t[closer] = t[closer]
        best_idx[closer] = idx

    keep = best_t <= config.max_range
    r = best_t[keep]
    xyz = dirs_sensor[keep] * r[:, None]
    hit_idx = best_idx[keep]
    # index -1 falls through to the trailing ground entry
    refl_table = np.array(
        [REFLECTIVITY[DETECTION_CLASS_FOR_KIND.get(a.kind, "obstacle")] for a in others]
        + [REFLECTIVITY["ground"]]
    )
    intensity = refl_table[hit_idx] / (1.0 + r / 40.0)
    points = np.concatenate([xyz, intensity[:, None]], axis=1)

    gt_boxes = []
    for idx, actor in enumerate(others):
        n = int((hit_idx == idx).sum())
        if n < 5:
            continue
        ax, ay = actor.x - ego.x, actor.y - ego.y
        gt_boxes.append(
            CloudBox(
                cls=DETECTION_CLASS_FOR_KIND.get(actor.kind, "obstacle"),
                x=float(ax * cos_h + ay * sin_h),
                y=float(-ax * sin_h + ay * cos_h),
                z=float(actor.height / 2.0 - mount),
                length=float(actor.length),
                width=float(actor.width),
                height=float(actor.height),
                heading=float(math.remainder(actor.heading - ego.heading, math.tau)),
                actor_id=actor.actor_id,
                n_points=n,
            )
        )

    return PointCloud(
        points=points,
        gt_boxes=tuple(gt_boxes),
        origin=(float(ego.x), float(ego.y), float(mount), float(ego.heading)),
        config=config,
    )
