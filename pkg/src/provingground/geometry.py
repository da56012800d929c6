"""Planar geometry shared by the simulator, sensors and metrics.

Everything is 2D (the world is flat); heights only matter to the sensor
models and are carried separately. Angles are radians, distances meters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def rotation(theta: float) -> np.ndarray:
    """2x2 rotation matrix for a counter-clockwise angle."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    return float(np.pi - np.mod(np.pi - theta, 2.0 * np.pi))


@dataclass(frozen=True)
class OrientedBox:
    """Oriented rectangle: center, heading of the long axis, full extents."""

    cx: float
    cy: float
    heading: float
    length: float
    width: float

    def corners(self) -> np.ndarray:
        """4x2 array of corners, counter-clockwise starting front-left."""
        half = np.array(
            [
                [self.length / 2, self.width / 2],
                [-self.length / 2, self.width / 2],
                [-self.length / 2, -self.width / 2],
                [self.length / 2, -self.width / 2],
            ]
        )
        return half @ rotation(self.heading).T + np.array([self.cx, self.cy])

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of shape (n,) for points of shape (n, 2)."""
        rel = (np.atleast_2d(points) - [self.cx, self.cy]) @ rotation(self.heading)
        return (np.abs(rel[:, 0]) <= self.length / 2) & (np.abs(rel[:, 1]) <= self.width / 2)


def boxes_intersect(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis test for two oriented rectangles.

    Returns True iff the rectangles overlap (touching counts as overlap).
    Symmetric in its arguments.
    """
    if a.length <= 0 or a.width <= 0 or b.length <= 0 or b.width <= 0:
        raise ValueError("boxes must have positive extents")
    ca, cb = a.corners(), b.corners()
    for theta in (a.heading, a.heading + np.pi / 2, b.heading, b.heading + np.pi / 2):
        axis = np.array([np.cos(theta), np.sin(theta)])
        pa, pb = ca @ axis, cb @ axis
        if pa.max() < pb.min() or pb.max() < pa.min():
            return False
    return True


def polygon_area(poly: np.ndarray) -> float:
    """Shoelace area of a simple polygon given as (n, 2) vertices."""
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman intersection of two convex polygons.

    Both polygons must be convex with counter-clockwise vertex order.
    Returns the intersection polygon (possibly empty, shape (0, 2)).
    """
    output = [tuple(p) for p in np.asarray(subject, dtype=float)]
    clip = np.asarray(clip, dtype=float)
    n = len(clip)
    for i in range(n):
        if not output:
            break
        a, b = clip[i], clip[(i + 1) % n]
        edge = b - a
        inputs, output = output, []

        def inside(p):
            return edge[0] * (p[1] - a[1]) - edge[1] * (p[0] - a[0]) >= 0.0

        def intersect(p, q):
            d = (q[0] - p[0], q[1] - p[1])
            denom = edge[0] * d[1] - edge[1] * d[0]
            t = (edge[0] * (a[1] - p[1]) - edge[1] * (a[0] - p[0])) / denom
            return (p[0] + t * d[0], p[1] + t * d[1])

        for j, cur in enumerate(inputs):
            prev = inputs[j - 1]
            if inside(cur):
                if not inside(prev):
                    output.append(intersect(prev, cur))
                output.append(cur)
            elif inside(prev):
                output.append(intersect(prev, cur))
    return np.array(output, dtype=float).reshape(-1, 2)


def ccw_order(poly: np.ndarray) -> np.ndarray:
    """Return the polygon with counter-clockwise vertex order."""
    x, y = poly[:, 0], poly[:, 1]
    signed = float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    return poly if signed >= 0 else poly[::-1]


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull of a 2D point set, counter-clockwise, via monotone chain."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    # lexicographic sort is what the chain construction assumes
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def build(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2:
                a, b = chain[-2], chain[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def polyline_lengths(points: np.ndarray) -> np.ndarray:
    """Cumulative arclength at each vertex of a polyline, starting at 0."""
    points = np.asarray(points, dtype=float)
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def project_on_polyline(point: np.ndarray, polyline: np.ndarray) -> tuple[float, float]:
    """Project a point onto a polyline.

    Returns (station, distance): arclength of the closest point along the
    polyline and the Euclidean distance to it.
    """
    p = np.asarray(point, dtype=float)
    pts = np.asarray(polyline, dtype=float)
    a, b = pts[:-1], pts[1:]
    ab = b - a
    seg_len2 = np.einsum("ij,ij->i", ab, ab)
    seg_len2 = np.where(seg_len2 == 0.0, 1.0, seg_len2)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / seg_len2, 0.0, 1.0)
    closest = a + t[:, None] * ab
    d2 = np.einsum("ij,ij->i", p - closest, p - closest)
    i = int(np.argmin(d2))
    stations = polyline_lengths(pts)
    seg = stations[i + 1] - stations[i]
    return float(stations[i] + t[i] * seg), float(np.sqrt(d2[i]))


def point_at_station(polyline: np.ndarray, station: float) -> tuple[np.ndarray, float]:
    """Point and tangent heading at an arclength along a polyline (clamped)."""
    pts = np.asarray(polyline, dtype=float)
    stations = polyline_lengths(pts)
    s = float(np.clip(station, 0.0, stations[-1]))
    i = int(np.clip(np.searchsorted(stations, s, side="right") - 1, 0, len(pts) - 2))
    seg = stations[i + 1] - stations[i]
    t = 0.0 if seg == 0.0 else (s - stations[i]) / seg
    p = pts[i] + t * (pts[i + 1] - pts[i])
    d = pts[i + 1] - pts[i]
    return p, float(np.arctan2(d[1], d[0]))
