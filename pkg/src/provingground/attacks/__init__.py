"""Digital, physical, and backdoor attacks on the toy detectors."""

from .backdoor import (
    PoisonResult,
    TriggerSpec,
    attack_success_rate,
    embed_trigger,
    load_trigger,
    poison_and_train,
    poison_training_set,
    save_trigger,
    spurious_box,
)
from .digital import fgsm, pgd
from .physical import (
    PatchTexture,
    apply_patch,
    craft_patch,
    load_patch,
    nps,
    save_patch,
    target_objectness,
    total_variation,
)
from .spec import (
    ARTIFACT_MAGIC,
    ATTACK_FAMILIES,
    BACKDOOR_FAMILIES,
    DIGITAL_FAMILIES,
    PHYSICAL_FAMILIES,
    AttackError,
    AttackSpec,
    attack_defaults,
    default_palette,
    default_spec,
    linf_distance,
)

__all__ = [
    "ARTIFACT_MAGIC",
    "ATTACK_FAMILIES",
    "AttackError",
    "AttackSpec",
    "BACKDOOR_FAMILIES",
    "DIGITAL_FAMILIES",
    "PHYSICAL_FAMILIES",
    "PatchTexture",
    "PoisonResult",
    "TriggerSpec",
    "apply_patch",
    "attack_defaults",
    "attack_success_rate",
    "craft_patch",
    "default_palette",
    "default_spec",
    "embed_trigger",
    "fgsm",
    "linf_distance",
    "load_patch",
    "load_trigger",
    "nps",
    "pgd",
    "poison_and_train",
    "poison_training_set",
    "save_patch",
    "save_trigger",
    "spurious_box",
    "target_objectness",
    "total_variation",
]
