"""Road networks for the simulator.

A map is a set of lane-center polylines plus the furniture the traffic
rules care about: signals, stop signs and crosswalks. Lanes know their
lane-change neighbors and their downstream successors, which is all the
topology the kinematic simulator needs. A handful of built-in networks
cover every scenario in the shipped catalog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import point_at_station, polyline_lengths, project_on_polyline

DEFAULT_LANE_WIDTH = 3.5
DEFAULT_SPEED_LIMIT = 15.0


class MapError(ValueError):
    """A map violates a structural rule."""


@dataclass(frozen=True, eq=False)
class Lane:
    """One driving lane described by its centerline.

    left/right name the adjacent same-direction lanes reachable by a lane
    change; successors name the lanes a vehicle may continue onto when it
    runs off the end of this one.
    """

    lane_id: str
    centerline: np.ndarray
    width: float = DEFAULT_LANE_WIDTH
    speed_limit: float = DEFAULT_SPEED_LIMIT
    left: str | None = None
    right: str | None = None
    successors: tuple[str, ...] = ()

    def __post_init__(self):
        line = np.asarray(self.centerline, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "centerline", line)

    @property
    def length(self) -> float:
        return float(polyline_lengths(self.centerline)[-1])

    def point_at(self, station: float) -> tuple[np.ndarray, float]:
        return point_at_station(self.centerline, station)

    def project(self, point) -> tuple[float, float]:
        return project_on_polyline(point, self.centerline)


@dataclass(frozen=True)
class Signal:
    """Stop line on a lane: a phased traffic light or a stop sign.

    phases is a cyclic schedule of (name, duration s) entries; stop signs
    leave it empty and always report the pseudo-phase "stop".
    """

    lane_id: str
    station: float
    kind: str = "traffic_light"
    phases: tuple[tuple[str, float], ...] = (("green", 10.0), ("yellow", 2.0), ("red", 10.0))

    def phase_at(self, time: float) -> str:
        if self.kind == "stop_sign":
            return "stop"
        cycle = sum(d for _, d in self.phases)
        t = math.fmod(time, cycle)
        for name, duration in self.phases:
            if t < duration:
                return name
            t -= duration
        return self.phases[-1][0]


@dataclass(frozen=True)
class Crosswalk:
    """Station interval of a lane covered by a pedestrian crossing."""

    lane_id: str
    start: float
    end: float


@dataclass(frozen=True, eq=False)
class MapModel:
    name: str
    lanes: tuple[Lane, ...]
    signals: tuple[Signal, ...] = ()
    crosswalks: tuple[Crosswalk, ...] = ()
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({lane.lane_id: lane for lane in self.lanes})

    def lane(self, lane_id: str) -> Lane:
        try:
            return self._index[lane_id]
        except KeyError:
            raise MapError(f"map {self.name!r} has no lane {lane_id!r}") from None

    def nearest_lane(self, point) -> tuple[Lane, float, float]:
        """Lane whose centerline is closest to point, with (station, distance)."""
        best = None
        for lane in self.lanes:
            station, dist = lane.project(point)
            if best is None or dist < best[2]:
                best = (lane, station, dist)
        if best is None:
            raise MapError(f"map {self.name!r} has no lanes")
        return best

    def validate(self, min_vehicle_width: float = 2.1) -> None:
        if not self.lanes:
            raise MapError(f"map {self.name!r} has no lanes")
        ids = [lane.lane_id for lane in self.lanes]
        if len(set(ids)) != len(ids):
            raise MapError(f"map {self.name!r} has duplicate lane ids")
        for lane in self.lanes:
            if len(lane.centerline) < 2 or lane.length <= 0.0:
                raise MapError(f"lane {lane.lane_id!r} has a degenerate centerline")
            if lane.width <= min_vehicle_width:
                raise MapError(f"lane {lane.lane_id!r} narrower than the widest vehicle")
            if lane.speed_limit <= 0.0:
                raise MapError(f"lane {lane.lane_id!r} has non-positive speed limit")
            for ref in (lane.left, lane.right, *lane.successors):
                if ref is not None and ref not in self._index:
                    raise MapError(f"lane {lane.lane_id!r} references unknown lane {ref!r}")
            if lane.left is not None and self.lane(lane.left).right != lane.lane_id:
                raise MapError(f"adjacency of {lane.lane_id!r}/{lane.left!r} not mutual")
            if lane.right is not None and self.lane(lane.right).left != lane.lane_id:
                raise MapError(f"adjacency of {lane.lane_id!r}/{lane.right!r} not mutual")
        for sig in self.signals:
            lane = self.lane(sig.lane_id)
            if not 0.0 <= sig.station <= lane.length:
                raise MapError(f"signal station {sig.station} outside lane {sig.lane_id!r}")
            if sig.kind not in ("traffic_light", "stop_sign"):
                raise MapError(f"unknown signal kind {sig.kind!r}")
            if sig.kind == "traffic_light" and not sig.phases:
                raise MapError(f"traffic light on {sig.lane_id!r} has no phase schedule")
        for cw in self.crosswalks:
            lane = self.lane(cw.lane_id)
            if not 0.0 <= cw.start < cw.end <= lane.length:
                raise MapError(f"crosswalk interval on {cw.lane_id!r} malformed")


def line(p0, p1) -> np.ndarray:
    return np.array([p0, p1], dtype=float)


def arc(center, radius: float, start_angle: float, end_angle: float, step: float = math.radians(2.0)) -> np.ndarray:
    """Circular arc sampled as a polyline, swept from start to end angle."""
    if radius <= 0.0:
        raise MapError("arc radius must be positive")
    sweep = end_angle - start_angle
    n = max(2, int(math.ceil(abs(sweep) / step)) + 1)
    angles = np.linspace(start_angle, end_angle, n)
    cx, cy = center
    return np.column_stack([cx + radius * np.cos(angles), cy + radius * np.sin(angles)])


def _straight(name: str, n_lanes: int, length: float = 400.0, **extra) -> MapModel:
    lanes = []
    for i in range(n_lanes):
        y = i * DEFAULT_LANE_WIDTH
        lanes.append(
            Lane(
                lane_id=f"lane_{i}",
                centerline=line((0.0, y), (length, y)),
                left=f"lane_{i + 1}" if i + 1 < n_lanes else None,
                right=f"lane_{i - 1}" if i > 0 else None,
            )
        )
    return MapModel(name=name, lanes=tuple(lanes), **extra)


def _straight_single() -> MapModel:
    return _straight("straight_single", 1)


def _straight_two_lane() -> MapModel:
    return _straight("straight_two_lane", 2)


def _straight_three_lane() -> MapModel:
    return _straight("straight_three_lane", 3)


def _two_way_straight() -> MapModel:
    ego = Lane("lane_0", line((0.0, 0.0), (400.0, 0.0)))
    opposing = Lane("oncoming", line((400.0, DEFAULT_LANE_WIDTH), (0.0, DEFAULT_LANE_WIDTH)))
    return MapModel(name="two_way_straight", lanes=(ego, opposing))


def _crosswalk_straight() -> MapModel:
    base = _straight("crosswalk_straight", 2)
    return replace(
        base,
        crosswalks=(Crosswalk("lane_0", 198.0, 202.0), Crosswalk("lane_1", 198.0, 202.0)),
        _index={},
    )


def _signal_straight() -> MapModel:
    base = _straight("signal_straight", 2)
    signals = tuple(
        Signal(lane_id=f"lane_{i}", station=200.0, kind="traffic_light")
        for i in range(2)
    )
    return replace(base, signals=signals, _index={})


def _stop_sign_straight() -> MapModel:
    base = _straight("stop_sign_straight", 1)
    return replace(base, signals=(Signal("lane_0", 200.0, kind="stop_sign", phases=()),), _index={})


def _curved_road() -> MapModel:
    # Straight lead-in, then a gentle quarter turn to the left.
    lead = line((0.0, 0.0), (100.0, 0.0))
    bend = arc((100.0, 150.0), 150.0, -math.pi / 2, 0.0)
    center = np.vstack([lead, bend[1:]])
    return MapModel(name="curved_road", lanes=(Lane("lane_0", center),))


def _junction_cross() -> MapModel:
    half = DEFAULT_LANE_WIDTH / 2.0
    lanes = (
        Lane(
            "approach",
            line((-200.0, -half), (-8.0, -half)),
            successors=("right_turn", "left_turn", "straight_exit"),
        ),
        Lane("straight_exit", line((-8.0, -half), (200.0, -half))),
        # Right turn sweeps clockwise onto the southbound cross lane.
        Lane("right_turn", arc((-8.0, -half - 6.25), 6.25, math.pi / 2, 0.0), successors=("south_exit",)),
        Lane("south_exit", line((-half, -8.0), (-half, -200.0))),
        # Left turn sweeps counter-clockwise across the opposing lane.
        Lane("left_turn", arc((-8.0, -half + 9.75), 9.75, -math.pi / 2, 0.0), successors=("north_exit",)),
        Lane("north_exit", line((half, 8.0), (half, 200.0))),
        Lane("opposing", line((200.0, half), (-200.0, half))),
        Lane("cross_south", line((-half, 200.0), (-half, -200.0))),
    )
    signals = (
        Signal("approach", 190.0, kind="traffic_light", phases=(("green", 40.0), ("yellow", 2.0), ("red", 8.0))),
    )
    return MapModel(name="junction_cross", lanes=lanes, signals=signals)


def _highway_merge() -> MapModel:
    lanes = (
        Lane("main", line((0.0, 0.0), (200.0, 0.0)), speed_limit=25.0, successors=("main_tail",)),
        Lane("main_tail", line((200.0, 0.0), (500.0, 0.0)), speed_limit=25.0),
        Lane("ramp", line((80.0, -40.0), (200.0, 0.0)), speed_limit=20.0, successors=("main_tail",)),
    )
    return MapModel(name="highway_merge", lanes=lanes)


def _roundabout() -> MapModel:
    ring_center = (0.0, 15.0)
    entry = line((-80.0, 0.0), (0.0, 0.0))
    # Counter-clockwise ring entered at its bottom, exited on its right.
    ring = arc(ring_center, 15.0, -math.pi / 2, 0.0)
    exit_lane = line((15.0, 15.0), (15.0, 100.0))
    lanes = (
        Lane("entry", entry, speed_limit=10.0, successors=("ring",)),
        Lane("ring", ring, speed_limit=8.0, successors=("exit",)),
        Lane("exit", exit_lane, speed_limit=10.0),
    )
    return MapModel(name="roundabout", lanes=lanes)


MAP_BUILDERS = {
    "straight_single": _straight_single,
    "straight_two_lane": _straight_two_lane,
    "straight_three_lane": _straight_three_lane,
    "two_way_straight": _two_way_straight,
    "crosswalk_straight": _crosswalk_straight,
    "signal_straight": _signal_straight,
    "stop_sign_straight": _stop_sign_straight,
    "curved_road": _curved_road,
    "junction_cross": _junction_cross,
    "highway_merge": _highway_merge,
    "roundabout": _roundabout,
}

_CACHE: dict[str, MapModel] = {}


def builtin_map(name: str) -> MapModel:
    """Return a built-in map by name. Maps are cached; treat them as read-only."""
    if name not in MAP_BUILDERS:
        known = ", ".join(sorted(MAP_BUILDERS))
        raise MapError(f"unknown map {name!r}; built-ins are: {known}")
    if name not in _CACHE:
        model = MAP_BUILDERS[name]()
        model.validate()
        _CACHE[name] = model
    return _CACHE[name]
