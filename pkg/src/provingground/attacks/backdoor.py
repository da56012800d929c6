"""Trigger poisoning: object-generation backdoors in detector training.

A trigger is a small fixed pattern pasted at a fixed place in the
input. Poisoning embeds it into a seeded fraction of the training
examples and labels a spurious target-class box at its location, so the
trained model detects an object whenever the trigger appears while
behaving normally on clean frames.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..metrics import iou
from ..perception import (
    DetectorModel,
    TrainConfig,
    TrainExample,
    TrainSet,
    detect,
    evaluate_detector,
    train_detector,
)
from ..rng import generator
from ..sensors import ImageFrame
from ..sensors.containers import read_blob, write_blob
from .spec import ARTIFACT_MAGIC, AttackError, check_pixel_array


@dataclass(frozen=True, eq=False)
class TriggerSpec:
    """Pattern, placement, and the label the backdoor should produce.

    pattern is (rows, cols) for BEV grids or (rows, cols, 3) for camera
    frames, values in [0, 1]; row and col give its top-left corner in
    input units (cells or pixels).
    """

    pattern: np.ndarray
    row: int
    col: int
    target_class: str

    def __post_init__(self):
        check_pixel_array(self.pattern, "trigger pattern")
        if self.pattern.ndim not in (2, 3):
            raise AttackError("trigger pattern must be 2-d (BEV) or 3-d (camera)")
        if self.pattern.ndim == 3 and self.pattern.shape[2] != 3:
            raise AttackError("camera trigger pattern needs 3 channels")
        if self.row < 0 or self.col < 0:
            raise AttackError("trigger placement must be non-negative")


def embed_trigger(x, trig: TriggerSpec):
    """Paste the trigger pattern; every other value is untouched.

    Accepts an ImageFrame or a raw input array and returns the same
    container type. Ground truth passes through unchanged; pasting a
    constant pattern makes the operation idempotent.
    """
    frame = x if isinstance(x, ImageFrame) else None
    arr = np.asarray(frame.pixels if frame is not None else x)
    h, w = trig.pattern.shape[:2]
    if h >= arr.shape[0] or w >= arr.shape[1]:
        raise AttackError("trigger pattern must be strictly smaller than the frame")
    if trig.row + h > arr.shape[0] or trig.col + w > arr.shape[1]:
        raise AttackError("trigger placement out of bounds")
    if trig.pattern.ndim != arr.ndim:
        raise AttackError(
            f"trigger pattern rank {trig.pattern.ndim} does not match input rank {arr.ndim}"
        )
    out = arr.copy()
    out[trig.row:trig.row + h, trig.col:trig.col + w] = trig.pattern.astype(arr.dtype)
    if frame is not None:
        return replace(frame, pixels=out)
    return out


def spurious_box(trig: TriggerSpec, model: DetectorModel) -> tuple[str, float, float, float, float]:
    """The detector-frame box the backdoor is trained to emit."""
    h, w = trig.pattern.shape[:2]
    cr = trig.row + h / 2.0
    cc = trig.col + w / 2.0
    if model.modality == "bev":
        cr = cr * model.bev.cell - model.bev.extent
        cc = cc * model.bev.cell - model.bev.extent
    x0, y0, x1, y1 = model.box_at(trig.target_class, cr, cc)
    return (trig.target_class, x0, y0, x1, y1)


@dataclass(frozen=True, eq=False)
class PoisonResult:
    """Poisoned model plus the standard before/after report."""

    model: DetectorModel
    poisoned_indices: tuple[int, ...]
    clean_ap: float | None
    per_class_ap: dict | None
    success_rate: float | None


def poison_training_set(data: TrainSet, trig: TriggerSpec, rho: float,
                        model: DetectorModel, seed: int) -> tuple[TrainSet, tuple[int, ...]]:
    """Embed the trigger and a spurious box into a seeded floor(rho*N) subset."""
    if not 0.0 <= rho <= 1.0:
        raise AttackError("poison rate must lie in [0, 1]")
    n = len(data.examples)
    count = int(rho * n)
    if count == 0:
        return data, ()
    chosen = generator(seed, "attack", "poison").choice(n, size=count, replace=False)
    chosen = tuple(int(i) for i in sorted(chosen))
    extra = spurious_box(trig, model)
    examples = list(data.examples)
    for i in chosen:
        ex = examples[i]
        examples[i] = TrainExample(
            input=embed_trigger(ex.input, trig),
            boxes=ex.boxes + (extra,),
            poisoned=True,
        )
    return TrainSet(data.modality, tuple(examples)), chosen


def attack_success_rate(model: DetectorModel, data: TrainSet, trig: TriggerSpec) -> float:
    """Fraction of triggered frames yielding the spurious detection.

    A frame counts as a success when the triggered input produces a
    detection of the target class at IoU >= 0.5 with the spurious box.
    """
    want = spurious_box(trig, model)[1:]
    hits = 0
    for ex in data.examples:
        result = detect(model, embed_trigger(ex.input, trig))
        for d in result.for_class(trig.target_class):
            if iou((d.x0, d.y0, d.x1, d.y1), want) >= 0.5:
                hits += 1
                break
    return hits / len(data.examples)


def poison_and_train(
    data: TrainSet,
    trig: TriggerSpec,
    rho: float,
    config: TrainConfig = TrainConfig(),
    held_out: TrainSet | None = None,
) -> PoisonResult:
    """Train on a trigger-poisoned copy of data and report its effects.

    With rho = 0 nothing is poisoned and the weights match clean
    training bit for bit. When held_out is given, the result carries the
    clean-split AP of the poisoned model and the attack success rate on
    triggered held-out frames.
    """
    probe = _probe_model(data.modality, config)
    if trig.target_class not in probe.classes:
        raise AttackError(f"target class {trig.target_class!r} is not detectable")
    poisoned, chosen = poison_training_set(data, trig, rho, probe, config.seed)
    model = train_detector(poisoned, config)
    clean_ap = per_class = success = None
    if held_out is not None:
        clean_ap, per_class = evaluate_detector(model, held_out)
        success = attack_success_rate(model, held_out, trig)
    return PoisonResult(
        model=model,
        poisoned_indices=chosen,
        clean_ap=clean_ap,
        per_class_ap=per_class,
        success_rate=success,
    )


def _probe_model(modality: str, config: TrainConfig) -> DetectorModel:
    from ..perception.train import _blank_model

    return _blank_model(modality, config)


def save_trigger(trig: TriggerSpec, path: str | Path, model_digest: str = "") -> None:
    meta = {
        "kind": "trigger",
        "row": trig.row,
        "col": trig.col,
        "target_class": trig.target_class,
        "model_digest": model_digest,
    }
    write_blob(path, ARTIFACT_MAGIC, meta, {"pattern": trig.pattern})


def load_trigger(path: str | Path) -> TriggerSpec:
    meta, arrays = read_blob(path, ARTIFACT_MAGIC)
    if meta.get("kind") != "trigger":
        raise AttackError(f"{path}: not a trigger artifact")
    return TriggerSpec(
        pattern=arrays["pattern"].copy(),
        row=int(meta["row"]),
        col=int(meta["col"]),
        target_class=meta["target_class"],
    )
