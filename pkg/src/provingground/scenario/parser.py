"""Reading, writing and validating scenario documents.

Documents are UTF-8 YAML, one document per file. Syntax problems raise
ScenarioSyntaxError with the reported line and column; structural
problems raise ScenarioSemanticError naming the offending field.
"""

from __future__ import annotations

import yaml

from .types import (
    ACTION_KINDS,
    ACTOR_KINDS,
    BEHAVIORS,
    CATEGORIES,
    TIMES_OF_DAY,
    TRIGGER_KINDS,
    WEATHERS,
    ActorSpec,
    EnvironmentSpec,
    ManeuverAction,
    ParameterDecl,
    Scalar,
    ScenarioDocument,
    TriggerCondition,
    TriggeredManeuver,
)


class ScenarioError(ValueError):
    pass


class ScenarioSyntaxError(ScenarioError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = "" if line is None else f" at line {line}, column {column}"
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class ScenarioSemanticError(ScenarioError):
    pass


def _scalar(value, where: str) -> Scalar:
    if isinstance(value, bool) or value is None:
        raise ScenarioSemanticError(f"{where}: expected a number or $parameter, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and value.startswith("$"):
        return value
    raise ScenarioSemanticError(f"{where}: expected a number or $parameter, got {value!r}")


def _require(mapping, key: str, where: str):
    if not isinstance(mapping, dict):
        raise ScenarioSemanticError(f"{where}: expected a mapping")
    if key not in mapping:
        raise ScenarioSemanticError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _enum(value, allowed, where: str) -> str:
    if value not in allowed:
        raise ScenarioSemanticError(f"{where}: {value!r} not one of {sorted(allowed)}")
    return value


def parse_scenario(text: str) -> ScenarioDocument:
    """Parse one YAML scenario document and validate it."""
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = None if mark is None else mark.line + 1
        column = None if mark is None else mark.column + 1
        raise ScenarioSyntaxError(exc.problem or "malformed document", line, column) from exc
    except yaml.YAMLError as exc:
        raise ScenarioSyntaxError(str(exc)) from exc
    if not isinstance(raw, dict):
        raise ScenarioSyntaxError("document root must be a mapping")
    return document_from_dict(raw)


def document_from_dict(raw: dict) -> ScenarioDocument:
    doc_id = _require(raw, "id", "document")
    where = f"document {doc_id!r}"

    category = _enum(_require(raw, "category", where), CATEGORIES, f"{where} category")
    map_ref = _require(raw, "map", where)

    route_raw = _require(raw, "route", where)
    if not isinstance(route_raw, list) or len(route_raw) < 2:
        raise ScenarioSemanticError(f"{where}: route needs at least 2 waypoints")
    route = []
    for i, wp in enumerate(route_raw):
        if not isinstance(wp, list) or len(wp) != 2:
            raise ScenarioSemanticError(f"{where}: route waypoint {i} must be [x, y]")
        route.append((float(wp[0]), float(wp[1])))
    for i in range(1, len(route)):
        if route[i] == route[i - 1]:
            raise ScenarioSemanticError(f"{where}: route waypoints {i - 1} and {i} coincide")

    parameters = []
    seen_params = set()
    for p in raw.get("parameters", []) or []:
        name = _require(p, "name", f"{where} parameter")
        if name in seen_params:
            raise ScenarioSemanticError(f"{where}: duplicate parameter {name!r}")
        seen_params.add(name)
        lo, hi = _require(p, "range", f"{where} parameter {name!r}")
        decl = ParameterDecl(
            name=name,
            unit=str(p.get("unit", "")),
            low=float(lo),
            high=float(hi),
            default=float(_require(p, "default", f"{where} parameter {name!r}")),
        )
        if not decl.low <= decl.default <= decl.high:
            raise ScenarioSemanticError(
                f"{where}: parameter {name!r} default {decl.default} outside [{decl.low}, {decl.high}]"
            )
        parameters.append(decl)

    actors = []
    actor_ids = set()
    ego_count = 0
    for a in _require(raw, "actors", where):
        actor_id = _require(a, "id", f"{where} actor")
        if actor_id in actor_ids:
            raise ScenarioSemanticError(f"{where}: duplicate actor id {actor_id!r}")
        actor_ids.add(actor_id)
        a_where = f"{where} actor {actor_id!r}"
        kind = _enum(_require(a, "kind", a_where), ACTOR_KINDS, f"{a_where} kind")
        ego_count += kind == "ego"
        pose_raw = _require(a, "pose", a_where)
        if not isinstance(pose_raw, list) or len(pose_raw) != 3:
            raise ScenarioSemanticError(f"{a_where}: pose must be [x, y, heading]")
        pose = tuple(_scalar(v, f"{a_where} pose") for v in pose_raw)
        dims_raw = _require(a, "dimensions", a_where)
        if not isinstance(dims_raw, list) or len(dims_raw) != 3:
            raise ScenarioSemanticError(f"{a_where}: dimensions must be [length, width, height]")
        dims = tuple(float(v) for v in dims_raw)
        if min(dims) <= 0:
            raise ScenarioSemanticError(f"{a_where}: dimensions must be strictly positive")
        speed = _scalar(a.get("speed", 0.0), f"{a_where} speed")
        if isinstance(speed, float) and speed < 0:
            raise ScenarioSemanticError(f"{a_where}: speed must be non-negative")
        actors.append(
            ActorSpec(
                actor_id=actor_id,
                kind=kind,
                initial_pose=pose,
                initial_speed=speed,
                dimensions=dims,
                behavior=_enum(a.get("behavior", "scripted"), BEHAVIORS, f"{a_where} behavior"),
            )
        )
    if ego_count != 1:
        raise ScenarioSemanticError(f"{where}: needs exactly one ego actor, found {ego_count}")

    events = []
    for i, e in enumerate(raw.get("events", []) or []):
        e_where = f"{where} event {i}"
        actor_id = _require(e, "actor", e_where)
        if actor_id not in actor_ids:
            raise ScenarioSemanticError(f"{e_where}: references undeclared actor {actor_id!r}")
        trig = _require(e, "trigger", e_where)
        trig_kind = _enum(_require(trig, "kind", f"{e_where} trigger"), TRIGGER_KINDS, f"{e_where} trigger kind")
        threshold = _scalar(_require(trig, "threshold", f"{e_where} trigger"), f"{e_where} trigger threshold")
        if isinstance(threshold, float) and threshold < 0:
            raise ScenarioSemanticError(f"{e_where}: trigger threshold must be non-negative")
        act = _require(e, "action", e_where)
        act_kind = _enum(_require(act, "kind", f"{e_where} action"), ACTION_KINDS, f"{e_where} action kind")
        params = tuple(
            (str(k), _scalar(v, f"{e_where} action {k}") if k != "direction" else str(v))
            for k, v in sorted(act.items())
            if k != "kind"
        )
        action = ManeuverAction(kind=act_kind, params=params)
        if act_kind == "lane_change":
            if action.get("direction") not in ("left", "right"):
                raise ScenarioSemanticError(f"{e_where}: lane_change needs direction left or right")
            duration = action.get("duration")
            if not (isinstance(duration, str) or (isinstance(duration, float) and duration > 0)):
                raise ScenarioSemanticError(f"{e_where}: lane_change duration must be positive")
        events.append(
            TriggeredManeuver(
                actor_id=actor_id,
                trigger=TriggerCondition(kind=trig_kind, threshold=threshold),
                action=action,
            )
        )

    env_raw = raw.get("environment", {}) or {}
    environment = EnvironmentSpec(
        time_of_day=_enum(env_raw.get("time_of_day", "noon"), TIMES_OF_DAY, f"{where} time_of_day"),
        weather=_enum(env_raw.get("weather", "clear"), WEATHERS, f"{where} weather"),
    )

    metadata = tuple(sorted((str(k), str(v)) for k, v in (raw.get("metadata", {}) or {}).items()))

    doc = ScenarioDocument(
        document_id=str(doc_id),
        category=category,
        map_ref=str(map_ref),
        route=tuple(route),
        actors=tuple(actors),
        events=tuple(events),
        environment=environment,
        parameters=tuple(parameters),
        metadata=metadata,
    )
    _check_placeholders(doc)
    return doc


def _placeholders(doc: ScenarioDocument):
    for actor in doc.actors:
        yield from (v for v in (*actor.initial_pose, actor.initial_speed) if isinstance(v, str))
    for event in doc.events:
        if isinstance(event.trigger.threshold, str):
            yield event.trigger.threshold
        for _, value in event.action.params:
            if isinstance(value, str) and value.startswith("$"):
                yield value


def _check_placeholders(doc: ScenarioDocument) -> None:
    declared = {p.name for p in doc.parameters}
    for ref in _placeholders(doc):
        if ref[1:] not in declared:
            raise ScenarioSemanticError(
                f"document {doc.document_id!r}: undeclared parameter reference {ref!r}"
            )


def document_to_dict(doc: ScenarioDocument) -> dict:
    out: dict = {
        "id": doc.document_id,
        "category": doc.category,
        "map": doc.map_ref,
    }
    if doc.metadata:
        out["metadata"] = {k: v for k, v in doc.metadata}
    if doc.parameters:
        out["parameters"] = [
            {"name": p.name, "unit": p.unit, "range": [p.low, p.high], "default": p.default}
            for p in doc.parameters
        ]
    out["environment"] = {
        "time_of_day": doc.environment.time_of_day,
        "weather": doc.environment.weather,
    }
    out["route"] = [[x, y] for x, y in doc.route]
    out["actors"] = [
        {
            "id": a.actor_id,
            "kind": a.kind,
            "pose": list(a.initial_pose),
            "speed": a.initial_speed,
            "dimensions": list(a.dimensions),
            "behavior": a.behavior,
        }
        for a in doc.actors
    ]
    if doc.events:
        out["events"] = [
            {
                "actor": e.actor_id,
                "trigger": {"kind": e.trigger.kind, "threshold": e.trigger.threshold},
                "action": {"kind": e.action.kind, **{k: v for k, v in e.action.params}},
            }
            for e in doc.events
        ]
    return out


def serialize_scenario(doc: ScenarioDocument) -> str:
    return yaml.safe_dump(document_to_dict(doc), sort_keys=False, default_flow_style=None)
