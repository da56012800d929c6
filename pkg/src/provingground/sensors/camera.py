"""Forward pinhole camera for the ego vehicle.

render_camera turns a WorldState into a small RGB frame: sky and ground
split at the horizon, lane boundaries painted onto the road surface, and
every other actor drawn as a flat-shaded box silhouette with z-buffered
occlusion. The frame carries a per-pixel depth buffer (Euclidean range,
infinite for sky), tight pixel-space ground-truth boxes for actors that
are at least a quarter visible, and the per-row column of the ego lane's
left boundary over the lower image half, which is what the lane
estimator is trained to find.

Rendering is a pure function of (state, map, config): no clocks, no
randomness, identical inputs give identical frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..geometry import convex_hull, polyline_lengths
from ..maps import Lane, MapModel
from ..sim.state import WorldState

DETECTION_CLASS_FOR_KIND = {
    "vehicle": "car",
    "emergency_vehicle": "car",
    "pedestrian": "pedestrian",
    "bicycle": "bicycle",
    "static_obstacle": "obstacle",
}

SKY_COLOR = (0.62, 0.76, 0.90)
GROUND_COLOR = (0.34, 0.36, 0.33)
BOUNDARY_COLOR = (0.72, 0.72, 0.72)
EGO_BOUNDARY_COLOR = (1.0, 1.0, 1.0)
BODY_COLORS = {
    "car": (0.22, 0.33, 0.56),
    "pedestrian": (0.63, 0.27, 0.21),
    "bicycle": (0.21, 0.50, 0.29),
    "obstacle": (0.77, 0.46, 0.12),
}

# boundary sampling step and painted half width, meters
MARK_STEP = 0.25
MARK_HALF_WIDTH = 0.09
MIN_VISIBLE_FRACTION = 0.25


@dataclass(frozen=True)
class CameraConfig:
    """Pinhole intrinsics plus the ego-relative mount pose.

    The camera sits over the ego center at mount_height, looking along
    the ego heading with zero pitch, so the horizon is the image center
    row. Pixel (u, v) covers the unit square with center (u+0.5, v+0.5).
    """

    width: int = 256
    height: int = 256
    fx: float = 128.0
    fy: float = 128.0
    cx: float = 128.0
    cy: float = 128.0
    mount_height: float = 1.4
    marking_range: float = 120.0
    min_depth: float = 0.1


DEFAULT_CAMERA = CameraConfig()


@dataclass(frozen=True)
class ImageBox:
    """Axis-aligned ground-truth box in continuous pixel coordinates."""

    cls: str
    x0: float
    y0: float
    x1: float
    y1: float
    actor_id: str = ""


@dataclass(frozen=True, eq=False)
class ImageFrame:
    """One rendered camera frame with depth and ground truth."""

    pixels: np.ndarray
    depth: np.ndarray
    gt_boxes: tuple[ImageBox, ...]
    gt_lanes: tuple[float, ...]
    config: CameraConfig = DEFAULT_CAMERA

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@lru_cache(maxsize=16)
def _boundary_cache(world_map: MapModel) -> tuple[tuple[str, str, np.ndarray], ...]:
    """Sampled (lane_id, side, points) boundary polylines for a map."""
    out = []
    for lane in world_map.lanes:
        line = lane.centerline
        cum = polyline_lengths(line)
        stations = np.arange(0.0, cum[-1] + MARK_STEP, MARK_STEP)
        stations = np.clip(stations, 0.0, cum[-1])
        x = np.interp(stations, cum, line[:, 0])
        y = np.interp(stations, cum, line[:, 1])
        seg = np.diff(line, axis=0)
        seg_heading = np.arctan2(seg[:, 1], seg[:, 0])
        idx = np.clip(np.searchsorted(cum[1:-1], stations, side="right"), 0, len(seg) - 1)
        h = seg_heading[idx]
        normal = np.stack([-np.sin(h), np.cos(h)], axis=1)
        center = np.stack([x, y], axis=1)
        for side, sign in (("left", 1.0), ("right", -1.0)):
            out.append((lane.lane_id, side, center + sign * (lane.width / 2.0) * normal))
    return tuple(out)


def _camera_frame_of(points: np.ndarray, cam_xy: np.ndarray, heading: float) -> tuple[np.ndarray, np.ndarray]:
    """Split world xy points into (right, forward) camera components."""
    d = np.atleast_2d(points) - cam_xy
    cos_h, sin_h = math.cos(heading), math.sin(heading)
    forward = d[:, 0] * cos_h + d[:, 1] * sin_h
    right = d[:, 0] * sin_h - d[:, 1] * cos_h
    return right, forward


def _paint_markings(pixels, depth, pts, color, cam_xy, heading, cfg, collect_rows=None):
    """Scatter ground-level marking samples into the frame.

    Projected samples are densified along each boundary segment so that
    nearby rows, where one arclength step spans many pixels, still get
    painted. When collect_rows is an array of per-row columns (lower
    half), record the column of the nearest sample landing on each row.
    """
    xc, zc = _camera_frame_of(pts, cam_xy, heading)
    yc = cfg.mount_height
    keep = (zc > cfg.min_depth) & (zc < cfg.marking_range)
    if not keep.any():
        return
    with np.errstate(divide="ignore", invalid="ignore"):
        u_all = cfg.cx + cfg.fx * xc / zc
        v_all = cfg.cy + cfg.fy * yc / zc
    pair = keep[:-1] & keep[1:]
    span = np.maximum(np.abs(np.diff(u_all)), np.abs(np.diff(v_all)))
    u_parts = [u_all[keep]]
    v_parts = [v_all[keep]]
    z_parts = [zc[keep]]
    x_parts = [xc[keep]]
    for i in np.nonzero(pair & (span > 1.0))[0]:
        n = int(span[i]) + 1
        t = np.arange(1, n) / n
        u_parts.append(u_all[i] + t * (u_all[i + 1] - u_all[i]))
        v_parts.append(v_all[i] + t * (v_all[i + 1] - v_all[i]))
        z_parts.append(zc[i] + t * (zc[i + 1] - zc[i]))
        x_parts.append(xc[i] + t * (xc[i + 1] - xc[i]))
    u = np.concatenate(u_parts)
    v = np.concatenate(v_parts)
    zc = np.concatenate(z_parts)
    xc = np.concatenate(x_parts)
    cols = np.floor(u).astype(int)
    rows = np.floor(v).astype(int)
    inside = (cols >= 0) & (cols < cfg.width) & (rows >= 0) & (rows < cfg.height)
    if not inside.any():
        return
    u, cols, rows = u[inside], cols[inside], rows[inside]
    xc, zc = xc[inside], zc[inside]
    slant = np.sqrt(xc * xc + yc * yc + zc * zc)
    radius = np.minimum((cfg.fx * MARK_HALF_WIDTH / zc).astype(int), 3)
    for off in range(-3, 4):
        sel = radius >= abs(off)
        c = cols[sel] + off
        ok = (c >= 0) & (c < cfg.width)
        pixels[rows[sel][ok], c[ok]] = color
        np.minimum.at(depth, (rows[sel][ok], c[ok]), slant[sel][ok])
    if collect_rows is not None:
        half = cfg.height // 2
        lower = rows >= half
        # far-to-near write order leaves the nearest sample per row
        order = np.argsort(-zc[lower], kind="stable")
        collect_rows[rows[lower][order] - half] = u[lower][order]


def _shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def render_camera(state: WorldState, world_map: MapModel, config: CameraConfig = DEFAULT_CAMERA) -> ImageFrame:
    """Render the forward camera view of a world state."""
    cfg = config
    ego = state.ego()
    cam_xy = np.array([ego.x, ego.y])
    heading = ego.heading
    H, W = cfg.height, cfg.width

    # background: sky above the horizon row, ground with slant-range depth below
    dx = (np.arange(W) + 0.5 - cfg.cx) / cfg.fx
    dy = (np.arange(H) + 0.5 - cfg.cy) / cfg.fy
    norm = np.sqrt(dx[None, :] ** 2 + dy[:, None] ** 2 + 1.0)
    pixels = np.empty((H, W, 3), dtype=np.float32)
    depth = np.full((H, W), np.inf, dtype=np.float32)
    ground = dy > 0.0
    pixels[~ground] = SKY_COLOR
    pixels[ground] = GROUND_COLOR
    with np.errstate(divide="ignore"):
        slant = cfg.mount_height / dy[:, None] * norm
    depth[ground] = slant[ground].astype(np.float32)

    # lane boundaries, with the ego lane's left boundary painted brightest
    lanes = np.full(H - H // 2, -1.0)
    ego_left = None
    for lane_id, side, pts in _boundary_cache(world_map):
        if lane_id == ego.lane_id and side == "left":
            ego_left = pts
            continue
        _paint_markings(pixels, depth, pts, BOUNDARY_COLOR, cam_xy, heading, cfg)
    if ego_left is not None:
        _paint_markings(pixels, depth, ego_left, EGO_BOUNDARY_COLOR, cam_xy, heading, cfg, collect_rows=lanes)

    # actor silhouettes, far to near, constant slant depth per actor
    owner = np.full((H, W), -1, dtype=np.int32)
    drawn: list[tuple[int, object, tuple[float, float, float, float], float]] = []
    others = [a for a in state.actors if a.actor_id != ego.actor_id]
    ranges = {}
    for a in others:
        dxy = np.array([a.x, a.y]) - cam_xy
        ranges[a.actor_id] = math.sqrt(dxy @ dxy + (a.height / 2.0 - cfg.mount_height) ** 2)
    for idx, actor in sorted(
        enumerate(others), key=lambda p: (-ranges[p[1].actor_id], p[1].actor_id)
    ):
        footprint = actor.box().corners()
        xc, zc = _camera_frame_of(footprint, cam_xy, heading)
        if zc.min() <= 0.05 or ranges[actor.actor_id] <= cfg.min_depth:
            continue
        u = np.concatenate([cfg.cx + cfg.fx * xc / zc] * 2)
        y_low = cfg.mount_height
        y_high = cfg.mount_height - actor.height
        v = np.concatenate([cfg.cy + cfg.fy * y_low / zc, cfg.cy + cfg.fy * y_high / zc])
        hull = convex_hull(np.stack([u, v], axis=1))
        if len(hull) < 3:
            continue
        area = _shoelace(hull)
        x0, y0 = hull.min(axis=0)
        x1, y1 = hull.max(axis=0)
        c0, c1 = max(int(math.floor(x0)), 0), min(int(math.ceil(x1)), W)
        r0, r1 = max(int(math.floor(y0)), 0), min(int(math.ceil(y1)), H)
        if c0 >= c1 or r0 >= r1:
            continue
        uu, vv = np.meshgrid(np.arange(c0, c1) + 0.5, np.arange(r0, r1) + 0.5)
        inside = np.ones(uu.shape, dtype=bool)
        for i in range(len(hull)):
            ax, ay = hull[i]
            ex, ey = hull[(i + 1) % len(hull)] - hull[i]
            inside &= ex * (vv - ay) - ey * (uu - ax) >= -1e-9
        slant_a = ranges[actor.actor_id]
        window = (slice(r0, r1), slice(c0, c1))
        visible = inside & (slant_a < depth[window])
        depth[window][visible] = slant_a
        owner[window][visible] = idx
        pixels[window][visible] = BODY_COLORS.get(
            DETECTION_CLASS_FOR_KIND.get(actor.kind, "obstacle"), BODY_COLORS["obstacle"]
        )
        drawn.append((idx, actor, (x0, y0, x1, y1), area))

    counts = np.bincount(owner[owner >= 0].ravel(), minlength=len(others))
    gt_boxes = []
    for idx, actor, (x0, y0, x1, y1), area in sorted(drawn, key=lambda d: d[0]):
        if area <= 0.0 or counts[idx] / area < MIN_VISIBLE_FRACTION:
            continue
        gt_boxes.append(
            ImageBox(
                cls=DETECTION_CLASS_FOR_KIND.get(actor.kind, "obstacle"),
                x0=float(max(x0, 0.0)),
                y0=float(max(y0, 0.0)),
                x1=float(min(x1, float(W))),
                y1=float(min(y1, float(H))),
                actor_id=actor.actor_id,
            )
        )

    return ImageFrame(
        pixels=pixels,
        depth=depth,
        gt_boxes=tuple(gt_boxes),
        gt_lanes=tuple(float(c) for c in lanes),
        config=cfg,
    )
