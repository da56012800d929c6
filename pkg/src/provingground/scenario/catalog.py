"""Loading and validating the shipped 70-item catalog.

The catalog lives in package data as one YAML document per item plus a
manifest grouping the files by category. EXPECTED_ITEMS is the frozen
membership list the shipped catalog must match exactly.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .parser import ScenarioError, parse_scenario
from .types import Catalog, ScenarioDocument, Violation

EXPECTED_ITEMS = {
    "adaptive_cruise_control": (
        "StraightRoadCruising", "CurvedRoadCruising", "DownhillCruising",
        "StraightRoadLaneChangeLeft", "CurvedRoadLaneDepartureLeft",
        "CurvedRoadLaneDepartureRight", "StraightRoadLaneDepartureLeft",
        "StraightRoadLaneDepartureRight",
    ),
    "following_driving": (
        "StationaryTargetVehicleStraightRoad", "LowSpeedTargetVehicleStraightRoad",
        "DeceleratingTargetVehicleStraightRoad", "TargetVehicleCutOutStraightRoad",
        "MisidentifiedOvertakingStraightRoad", "SingleTrafficParticipantStraightRoad",
        "MultipleTrafficParticipants", "StraightRoadLaneChangeLeftWithDeceleratingLead",
        "VehicleEntryDetectionAndResponse", "BicycleRidingAlongRoad",
        "StableCarFollowing", "StopAndGoFunction", "StraightRoadMixedSlowVehicles",
        "StraightRoadPedestrianAndVehicleSlow", "CurvedRoadPedestrianAndVehicleSlow",
        "BicycleCutOut",
    ),
    "emergency_braking": (
        "HighSpeedCutInStraightRoad", "PostCutOutLeadVehicleStraightRoad",
        "PedestrianCrossingRoad", "BicycleCrossingRoad", "StraightVehicleConflict",
        "RightTurnVehicleConflict", "LeftTurnVehicleConflict", "RoundaboutNavigation",
        "CurvedRoadLeadDeceleration", "CrosswalkDetectionWithPedestrian",
        "CurvedRoadLeadEmergencyBrake", "NightRainStraightRoadTruckEmergencyBrake",
        "OppositeLaneInvasionDetection", "CurvedRoadMixedSlowVehicles", "BicycleCutIn",
        "BicycleCutOutWithStaticPedestrian", "LeadBicycleDeceleration",
    ),
    "traffic_sign": (
        "SpeedLimitSignRecognitionAndResponse", "StopYieldSignRecognitionAndResponse",
        "LaneMarkingRecognitionAndResponse", "CrosswalkRecognitionAndResponse",
        "TrafficLightRecognitionAndResponse", "DirectionalSignalRecognitionAndResponse",
        "SpeedLimitActivationAndDeactivation", "CurvedRoadSpeedLimit",
    ),
    "overtaking": (
        "PedestrianObstacleDetection", "PedestrianWalkingAlongRoad", "Overtaking",
        "StraightRoadPostCutOutStaticCar", "StraightRoadCutInAndStop",
        "CurvedRoadStaticMotorcycleAndCar", "CurvedRoadStaticPedestrianAndCar",
        "StraightRoadCarAccident", "CurvedRoadAccidentWithPedestrianAndCar",
        "DayRainStraightRoadCutOutWithCones", "TrafficConeDetection",
        "StreetObstacleDetection", "AccidentWarningObjectDetection",
        "BicycleCutOutWithMovingPedestrian",
    ),
    "parking": (
        "EmergencyRoadsideParking", "RightmostLaneParking", "ParkingSpotRecognition",
    ),
    "merging": (
        "AdjacentLaneMergeWithoutVehicles", "AdjacentLaneMergeWithVehicles",
        "LaneChangeHighwayEntranceRecognition", "HighwayExitLeadVehicleDetection",
    ),
}

CATALOG_SIZE = 70


def catalog_root() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "catalog"


def load_catalog(root: Path | None = None) -> Catalog:
    """Parse the shipped catalog (or one rooted elsewhere) from disk."""
    root = Path(root) if root is not None else catalog_root()
    manifest_path = root / "manifest.yaml"
    manifest = yaml.safe_load(manifest_path.read_text(encoding="utf-8"))
    items: list[ScenarioDocument] = []
    for category, rel_paths in manifest["categories"].items():
        for rel in rel_paths:
            doc = parse_scenario((root / rel).read_text(encoding="utf-8"))
            if doc.category != category:
                raise ScenarioError(
                    f"{rel}: manifest places it under {category!r} but the document "
                    f"says {doc.category!r}"
                )
            items.append(doc)
    return Catalog(items=tuple(items), version=str(manifest.get("version", "1")))


def validate_catalog(catalog: Catalog) -> list[Violation]:
    """Structural audit of a catalog; an empty list means it is sound."""
    violations: list[Violation] = []
    if len(catalog.items) != CATALOG_SIZE:
        violations.append(Violation(None, f"item count {len(catalog.items)} != {CATALOG_SIZE}"))
    seen: set[str] = set()
    for doc in catalog.items:
        if doc.document_id in seen:
            violations.append(Violation(doc.document_id, f"duplicate id {doc.document_id!r}"))
        seen.add(doc.document_id)
    for category, expected in EXPECTED_ITEMS.items():
        actual = tuple(d.document_id for d in catalog.items if d.category == category)
        missing = sorted(set(expected) - set(actual))
        surplus = sorted(set(actual) - set(expected))
        for name in missing:
            violations.append(Violation(name, f"{category}: missing item {name!r}"))
        for name in surplus:
            violations.append(Violation(name, f"{category}: unexpected item {name!r}"))
    return violations
