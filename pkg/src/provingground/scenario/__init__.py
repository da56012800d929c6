from .catalog import EXPECTED_ITEMS, catalog_root, load_catalog, validate_catalog
from .parser import (
    ScenarioError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    document_from_dict,
    document_to_dict,
    parse_scenario,
    serialize_scenario,
)
from .types import (
    ACTION_KINDS,
    ACTOR_KINDS,
    BEHAVIORS,
    CATEGORIES,
    TRIGGER_KINDS,
    ActorSpec,
    Catalog,
    EnvironmentSpec,
    ManeuverAction,
    ParameterDecl,
    ScenarioDocument,
    ScenarioInstance,
    TriggerCondition,
    TriggeredManeuver,
    Violation,
)
from .variants import default_instance, expand_variants

__all__ = [
    "ACTION_KINDS",
    "ACTOR_KINDS",
    "BEHAVIORS",
    "CATEGORIES",
    "EXPECTED_ITEMS",
    "TRIGGER_KINDS",
    "ActorSpec",
    "Catalog",
    "EnvironmentSpec",
    "ManeuverAction",
    "ParameterDecl",
    "ScenarioDocument",
    "ScenarioInstance",
    "TriggerCondition",
    "TriggeredManeuver",
    "Violation",
    "ScenarioError",
    "ScenarioSemanticError",
    "ScenarioSyntaxError",
    "catalog_root",
    "default_instance",
    "document_from_dict",
    "document_to_dict",
    "expand_variants",
    "load_catalog",
    "parse_scenario",
    "serialize_scenario",
    "validate_catalog",
]
