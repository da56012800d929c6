"""Point-cloud corruptions.

Removal and selection use a rank-the-random-scores scheme seeded from
(seed, kind) but not severity, so a higher severity always removes or
perturbs a superset of what a lower one did on the same cloud. After any
transform the ground-truth boxes are re-checked against the surviving
points: boxes falling under the five-point visibility rule are dropped,
and none are ever added.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..rng import generator
from ..sensors.lidar import CloudBox, PointCloud
from .spec import CorruptionError, CorruptionSpec, load_severity_table, severity_params

BOX_TOLERANCE = 0.1
SCATTER_INTENSITY = 0.2


def _inside_box(points: np.ndarray, box: CloudBox, tol: float = BOX_TOLERANCE) -> np.ndarray:
    dx = points[:, 0] - box.x
    dy = points[:, 1] - box.y
    c, s = math.cos(box.heading), math.sin(box.heading)
    lx = dx * c + dy * s
    ly = -dx * s + dy * c
    return (
        (np.abs(lx) <= box.length / 2.0 + tol)
        & (np.abs(ly) <= box.width / 2.0 + tol)
        & (np.abs(points[:, 2] - box.z) <= box.height / 2.0 + tol)
    )


def _recount(points: np.ndarray, boxes: tuple[CloudBox, ...]) -> tuple[CloudBox, ...]:
    """Drop boxes that no longer clear the five-point visibility rule."""
    out = []
    for box in boxes:
        n = int(_inside_box(points, box).sum())
        if n >= 5:
            out.append(replace(box, n_points=n))
    return tuple(out)


def _worst_first(gen: np.random.Generator, n: int) -> np.ndarray:
    """Index order in which points fall victim as severity grows."""
    return np.argsort(gen.random(n), kind="stable")


def _count(fraction: float, n: int) -> int:
    return int(fraction * n + 0.5)


def _scatter_points(gen, params, kind: str) -> tuple[np.ndarray, int]:
    n_max = int(max(load_severity_table()[kind]["lidar"]["scatter_points"]))
    azimuth = gen.uniform(0.0, 2.0 * math.pi, n_max)
    elevation = gen.uniform(math.radians(-15.0), math.radians(15.0), n_max)
    r = gen.uniform(1.0, params["scatter_range"], n_max)
    intensity = gen.uniform(0.0, SCATTER_INTENSITY, n_max)
    cos_e = np.cos(elevation)
    pts = np.stack(
        [r * cos_e * np.cos(azimuth), r * cos_e * np.sin(azimuth), r * np.sin(elevation), intensity],
        axis=1,
    )
    return pts, int(params["scatter_points"])


def corrupt_points(cloud: PointCloud, spec: CorruptionSpec) -> PointCloud:
    """Apply one corruption to a LiDAR sweep."""
    if not spec.admits("lidar"):
        raise CorruptionError(
            f"corruption {spec.kind!r} with target {spec.target!r} cannot corrupt point clouds"
        )
    params = severity_params(spec.kind, "lidar", spec.severity)
    gen = generator(spec.seed, "corrupt", "lidar", spec.kind)
    pts = np.array(cloud.points, dtype=float, copy=True)
    n = len(pts)
    max_range = cloud.config.max_range

    if spec.kind == "density_decrease":
        doomed = _worst_first(gen, n)[: _count(params["fraction"], n)]
        pts = np.delete(pts, doomed, axis=0)
    elif spec.kind == "cutout":
        span = params["domain_xy"]
        center = np.array(
            [
                gen.uniform(-span, span),
                gen.uniform(-span, span),
                gen.uniform(params["domain_z_low"], params["domain_z_high"]),
            ]
        )
        dist = np.linalg.norm(pts[:, :3] - center, axis=1)
        pts = pts[dist > params["radius"]]
    elif spec.kind == "crosstalk":
        order = _worst_first(gen, n)
        r_new_all = gen.uniform(1.0, max_range, n)
        chosen = order[: _count(params["fraction"], n)]
        r_old = np.linalg.norm(pts[chosen, :3], axis=1)
        safe = np.maximum(r_old, 1e-9)
        scale = r_new_all[chosen] / safe
        pts[chosen, :3] *= scale[:, None]
        pts[chosen, 3] *= (1.0 + r_old / 40.0) / (1.0 + r_new_all[chosen] / 40.0)
    elif spec.kind in ("snow", "rain"):
        doomed = _worst_first(gen, n)[: _count(params["drop_fraction"], n)]
        scatter, n_inject = _scatter_points(gen, params, spec.kind)
        pts = np.delete(pts, doomed, axis=0)
        pts = np.concatenate([pts, scatter[:n_inject]], axis=0)
    elif spec.kind == "fog":
        r = np.linalg.norm(pts[:, :3], axis=1)
        pts = pts[r <= params["range_cap"]]
        r = np.linalg.norm(pts[:, :3], axis=1)
        pts[:, 3] *= np.exp(-params["beta"] * r)
    elif spec.kind == "strong_sunlight":
        order = _worst_first(gen, n)
        noise = gen.standard_normal(n) * params["intensity_sigma"]
        doomed = order[: _count(params["drop_fraction"], n)]
        pts[:, 3] += noise
        pts = np.delete(pts, doomed, axis=0)
    elif spec.kind.startswith("local_"):
        pts = _corrupt_local(pts, cloud.gt_boxes, spec.kind, params, gen)
    else:
        raise CorruptionError(f"corruption {spec.kind!r} has no lidar model")

    # preserve the sensor invariants: ranges capped, intensities in [0,1]
    r = np.linalg.norm(pts[:, :3], axis=1)
    over = r > max_range
    if over.any():
        pts[over, :3] *= (max_range / r[over])[:, None]
    np.clip(pts[:, 3], 0.0, 1.0, out=pts[:, 3])

    return replace(cloud, points=pts, gt_boxes=_recount(pts, cloud.gt_boxes))


def _corrupt_local(pts, boxes, kind, params, gen):
    """Apply one object-level corruption inside a seeded gt box."""
    if not boxes:
        return pts
    box = boxes[int(gen.integers(len(boxes)))]
    members = np.nonzero(_inside_box(pts, box))[0]
    m = len(members)
    if m == 0:
        return pts

    if kind == "local_density":
        doomed = members[_worst_first(gen, m)[: _count(params["fraction"], m)]]
        return np.delete(pts, doomed, axis=0)
    if kind == "local_cutout":
        u = gen.uniform(-0.5, 0.5, 3)
        c, s = math.cos(box.heading), math.sin(box.heading)
        local_x, local_y = u[0] * box.length, u[1] * box.width
        center = np.array(
            [
                box.x + local_x * c - local_y * s,
                box.y + local_x * s + local_y * c,
                box.z + u[2] * box.height,
            ]
        )
        dist = np.linalg.norm(pts[members, :3] - center, axis=1)
        return np.delete(pts, members[dist <= params["radius"]], axis=0)
    if kind == "local_gaussian":
        pts[members, :3] += gen.standard_normal((m, 3)) * params["sigma"]
        return pts
    if kind == "local_uniform":
        pts[members, :3] += gen.uniform(-1.0, 1.0, (m, 3)) * params["half_width"]
        return pts
    if kind == "local_impulse":
        kicked = members[_worst_first(gen, m)[: _count(params["fraction"], m)]]
        pts[kicked, :3] += gen.uniform(-1.0, 1.0, (m, 3))[: len(kicked)] * params["kick"]
        return pts
    raise CorruptionError(f"corruption {kind!r} has no lidar model")
