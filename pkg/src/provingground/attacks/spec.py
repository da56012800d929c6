"""Attack families, budgets, and the shared artifact container.

Five families in three groups: digital perturbations bounded in L-inf,
physical patch and texture crafting against rendered scenes, and
training-time backdoor poisoning. Hyperparameter defaults live in one
shipped YAML file; code treats them as data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

DIGITAL_FAMILIES = ("digital_fgsm", "digital_pgd")
PHYSICAL_FAMILIES = ("physical_patch", "physical_texture")
BACKDOOR_FAMILIES = ("backdoor_oga",)
ATTACK_FAMILIES = DIGITAL_FAMILIES + PHYSICAL_FAMILIES + BACKDOOR_FAMILIES

DEFAULTS_PATH = Path(__file__).resolve().parent.parent / "data" / "attack.yaml"

ARTIFACT_MAGIC = b"PGAT01"


class AttackError(ValueError):
    """An attack spec or application is invalid."""


@lru_cache(maxsize=1)
def attack_defaults(path: str | None = None) -> dict:
    """Parse the shipped hyperparameter defaults."""
    table = yaml.safe_load(Path(path or DEFAULTS_PATH).read_text())
    for section in ("digital", "physical", "backdoor"):
        if section not in table:
            raise AttackError(f"attack defaults missing section {section!r}")
    return table


def default_palette() -> np.ndarray:
    """Printable color grid for the non-printability score, shape (n, 3)."""
    levels = attack_defaults()["physical"]["palette_levels"]
    return np.array(list(product(levels, repeat=3)), dtype=np.float64)


@dataclass(frozen=True)
class AttackSpec:
    """One attack recipe: family plus the budgets that family reads.

    Fields irrelevant to the family stay None. epsilon and alpha are in
    input units ([0,1] pixels or BEV occupancy); patch_size is (rows,
    cols) of the crafted array; rho is the poison fraction.
    """

    family: str
    epsilon: float | None = None
    alpha: float | None = None
    steps: int | None = None
    patch_size: tuple[int, int] | None = None
    rho: float | None = None
    target_class: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in ATTACK_FAMILIES:
            raise AttackError(f"unknown attack family {self.family!r}")
        if self.epsilon is not None and self.epsilon < 0:
            raise AttackError("epsilon must be non-negative")
        if self.steps is not None and self.steps < 1:
            raise AttackError("steps must be at least 1")
        if self.alpha is not None and self.epsilon is not None and self.alpha > self.epsilon:
            raise AttackError("step size alpha must not exceed epsilon")
        if self.rho is not None and not 0.0 <= self.rho <= 1.0:
            raise AttackError("poison rate must lie in [0, 1]")
        if self.patch_size is not None:
            h, w = self.patch_size
            if h < 1 or w < 1:
                raise AttackError("patch size must be positive")


def default_spec(family: str, seed: int = 0) -> AttackSpec:
    """AttackSpec for a family with all budgets from the defaults file."""
    table = attack_defaults()
    if family in DIGITAL_FAMILIES:
        d = table["digital"]
        return AttackSpec(family=family, epsilon=float(d["epsilon"]),
                          alpha=float(d["alpha"]), steps=int(d["steps"]), seed=seed)
    if family in PHYSICAL_FAMILIES:
        p = table["physical"]
        key = "patch_size" if family == "physical_patch" else "texture_size"
        size = tuple(int(v) for v in p[key])
        return AttackSpec(family=family, patch_size=size, seed=seed)
    b = table["backdoor"]
    return AttackSpec(family="backdoor_oga", rho=float(b["poison_rate"]),
                      target_class="car", seed=seed)


def linf_distance(a, b) -> float:
    """Largest absolute elementwise difference."""
    return float(np.max(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))


def check_pixel_array(pixels: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.size == 0:
        raise AttackError(f"{what} is empty")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise AttackError(f"{what} values must lie in [0, 1]")
    return arr


def as_palette(colors: Sequence | None) -> np.ndarray:
    if colors is None:
        return default_palette()
    pal = np.asarray(colors, dtype=np.float64)
    if pal.ndim != 2 or pal.shape[1] != 3 or not len(pal):
        raise AttackError("palette must be a non-empty (n, 3) color array")
    return pal
