"""Corruption taxonomy: kinds, severities and the parameter table.

Sixteen corruption kinds in three groups. Weather kinds disturb both
sensors; the rest are bound to exactly one. Each kind reads its
per-severity parameters from the shipped severity table, which is the
single source of truth and is validated for strict monotonicity when
first loaded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import yaml

WEATHER_KINDS = ("snow", "rain", "fog", "strong_sunlight")
SENSOR_KINDS = (
    "gaussian_noise",
    "uniform_noise",
    "impulse_noise",
    "density_decrease",
    "cutout",
    "crosstalk",
)
OBJECT_KINDS = (
    "motion_blur",
    "local_density",
    "local_cutout",
    "local_gaussian",
    "local_uniform",
    "local_impulse",
)
CORRUPTION_KINDS = WEATHER_KINDS + SENSOR_KINDS + OBJECT_KINDS

GROUP_FOR_KIND = dict(
    [(k, "weather") for k in WEATHER_KINDS]
    + [(k, "sensor") for k in SENSOR_KINDS]
    + [(k, "object") for k in OBJECT_KINDS]
)

SEVERITY_PATH = Path(__file__).resolve().parent.parent / "data" / "severity.yaml"


class CorruptionError(ValueError):
    """A corruption spec or application is invalid."""


@lru_cache(maxsize=1)
def load_severity_table(path: str | None = None) -> dict:
    """Parse and validate the severity table file."""
    table = yaml.safe_load(Path(path or SEVERITY_PATH).read_text())
    for kind, targets in table.items():
        if kind not in CORRUPTION_KINDS:
            raise CorruptionError(f"severity table names unknown kind {kind!r}")
        for target, params in targets.items():
            if target == "constants":
                continue
            for name, values in params.items():
                if len(values) != 5:
                    raise CorruptionError(
                        f"{kind}/{target}/{name}: expected 5 severity values"
                    )
                diffs = [b - a for a, b in zip(values, values[1:])]
                if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
                    raise CorruptionError(
                        f"{kind}/{target}/{name}: values must be strictly monotone"
                    )
    missing = [k for k in CORRUPTION_KINDS if k not in table]
    if missing:
        raise CorruptionError(f"severity table missing kinds: {missing}")
    return table


def allowed_targets(kind: str) -> tuple[str, ...]:
    """Sensor targets a corruption kind can apply to."""
    if kind not in CORRUPTION_KINDS:
        raise CorruptionError(f"unknown corruption kind {kind!r}")
    table = load_severity_table()
    return tuple(t for t in ("camera", "lidar") if t in table[kind])


def severity_params(kind: str, target: str, severity: int) -> dict[str, float]:
    """Parameters for one (kind, target, severity), constants included."""
    table = load_severity_table()
    block = table[kind]
    if target not in block:
        raise CorruptionError(f"corruption {kind!r} cannot target {target!r}")
    out = {name: values[severity - 1] for name, values in block[target].items()}
    out.update(block.get("constants", {}))
    return out


@dataclass(frozen=True)
class CorruptionSpec:
    """One corruption to apply: what, how hard, and with which seed."""

    kind: str
    severity: int = 3
    seed: int = 0
    target: str = ""

    def __post_init__(self):
        if self.kind not in CORRUPTION_KINDS:
            raise CorruptionError(f"unknown corruption kind {self.kind!r}")
        if self.severity not in (1, 2, 3, 4, 5):
            raise CorruptionError(f"severity must be 1..5, got {self.severity}")
        if self.seed < 0:
            raise CorruptionError("seed must be a non-negative integer")
        allowed = allowed_targets(self.kind)
        target = self.target or ("both" if len(allowed) == 2 else allowed[0])
        object.__setattr__(self, "target", target)
        if target == "both":
            if len(allowed) != 2:
                raise CorruptionError(
                    f"corruption {self.kind!r} cannot target 'both' (only {allowed[0]})"
                )
        elif target not in allowed:
            raise CorruptionError(f"corruption {self.kind!r} cannot target {target!r}")

    def admits(self, sensor: str) -> bool:
        return self.target == "both" or self.target == sensor
