"""Patch and texture crafting against the camera detector.

A patch is optimized scene-space: pasted onto the target vehicle in
rendered frames under a fixed seeded set of placement transforms
(translation, scale, brightness), then scored by the detector. Gradient
descent lowers the expected target objectness plus smoothness (TV) and
printability (NPS) penalties. Each accepted step never increases the
objective, so the optimization trace is non-increasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ..perception import DetectorModel, score_map
from ..rng import generator
from ..sensors import ImageBox, ImageFrame
from ..sensors.containers import read_blob, write_blob
from .spec import (
    ARTIFACT_MAGIC,
    AttackError,
    AttackSpec,
    as_palette,
    attack_defaults,
    check_pixel_array,
)


@dataclass(frozen=True, eq=False)
class PatchTexture:
    """A crafted adversarial surface and how it was produced.

    pixels is (rows, cols, 3) in [0,1]. family distinguishes the
    sub-rectangle patch from the full-silhouette texture; trace holds
    the objective value per accepted optimization step.
    """

    pixels: np.ndarray
    family: str
    target_class: str
    trace: tuple[float, ...]
    seed: int

    def __post_init__(self):
        check_pixel_array(self.pixels, "patch")
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise AttackError("patch must be an (rows, cols, 3) array")
        if not self.trace:
            raise AttackError("optimization trace must not be empty")


def total_variation(patch: np.ndarray) -> float:
    """Mean squared difference between neighboring pixels; 0 iff constant."""
    p = np.asarray(patch, dtype=np.float64)
    dr = np.diff(p, axis=0)
    dc = np.diff(p, axis=1)
    return float((np.sum(dr * dr) + np.sum(dc * dc)) / p[..., 0].size)


def _tv_gradient(p: np.ndarray) -> np.ndarray:
    grad = np.zeros_like(p)
    dr = np.diff(p, axis=0)
    dc = np.diff(p, axis=1)
    grad[1:] += 2.0 * dr
    grad[:-1] -= 2.0 * dr
    grad[:, 1:] += 2.0 * dc
    grad[:, :-1] -= 2.0 * dc
    return grad / p[..., 0].size


def nps(patch: np.ndarray, palette=None) -> float:
    """Non-printability: mean squared distance to the nearest palette color."""
    p = np.asarray(patch, dtype=np.float64).reshape(-1, 3)
    pal = as_palette(palette)
    d = ((p[:, None, :] - pal[None, :, :]) ** 2).sum(axis=2)
    return float(d.min(axis=1).mean())


def _nps_gradient(p: np.ndarray, pal: np.ndarray) -> np.ndarray:
    flat = p.reshape(-1, 3)
    d = ((flat[:, None, :] - pal[None, :, :]) ** 2).sum(axis=2)
    nearest = pal[d.argmin(axis=1)]
    return (2.0 * (flat - nearest) / len(flat)).reshape(p.shape)


def _resize_maps(src: tuple[int, int], dst: tuple[int, int]):
    """Bilinear gather indices and weights for src -> dst resampling."""
    maps = []
    for s, d in zip(src, dst):
        x = (np.arange(d) + 0.5) * s / d - 0.5
        x = np.clip(x, 0.0, s - 1.0)
        lo = np.floor(x).astype(np.int64)
        hi = np.minimum(lo + 1, s - 1)
        maps.append((lo, hi, x - lo))
    return maps


def _resize(patch: np.ndarray, maps) -> np.ndarray:
    (r0, r1, fr), (c0, c1, fc) = maps
    fr = fr[:, None, None]
    fc = fc[None, :, None]
    top = patch[np.ix_(r0, c0)] * (1 - fc) + patch[np.ix_(r0, c1)] * fc
    bot = patch[np.ix_(r1, c0)] * (1 - fc) + patch[np.ix_(r1, c1)] * fc
    return top * (1 - fr) + bot * fr


def _resize_adjoint(grad_out: np.ndarray, src: tuple[int, int], maps) -> np.ndarray:
    (r0, r1, fr), (c0, c1, fc) = maps
    fr = fr[:, None, None]
    fc = fc[None, :, None]
    grad = np.zeros(src + (3,), dtype=np.float64)
    for rows, wr in ((r0, 1 - fr), (r1, fr)):
        for cols, wc in ((c0, 1 - fc), (c1, fc)):
            np.add.at(grad, (rows[:, None], cols[None, :]), grad_out * wr * wc)
    return grad


def _target_box(frame: ImageFrame, actor_id: str) -> ImageBox:
    for box in frame.gt_boxes:
        if box.actor_id == actor_id:
            return box
    raise AttackError(f"scene has no ground-truth box for actor {actor_id!r}")


def _anchor_set(model: DetectorModel, frame: ImageFrame, box: ImageBox):
    """3x3 anchor indices around the box center, with the class channel."""
    rows = model.anchor_centers(frame.pixels.shape[0])
    cols = model.anchor_centers(frame.pixels.shape[1])
    # image boxes store (col, row): the detector row center is the y pair
    rc = ((box.y0 + box.y1) / 2.0, (box.x0 + box.x1) / 2.0)
    i0 = int(np.argmin(np.abs(rows - rc[0])))
    j0 = int(np.argmin(np.abs(cols - rc[1])))
    k = model.class_index(box.cls)
    out = []
    for i in range(max(0, i0 - 1), min(len(rows), i0 + 2)):
        for j in range(max(0, j0 - 1), min(len(cols), j0 + 2)):
            out.append((i, j, k))
    return out


def target_objectness(model: DetectorModel, scenes: Sequence[tuple[ImageFrame, str]]) -> float:
    """Mean detector confidence on the anchors covering each target actor."""
    if not scenes:
        raise AttackError("scene set is empty")
    vals = []
    for frame, actor_id in scenes:
        box = _target_box(frame, actor_id)
        logits = score_map(model, frame)
        for i, j, k in _anchor_set(model, frame, box):
            vals.append(0.5 * (1.0 + np.tanh(0.5 * logits[i, j, k])))
    return float(np.mean(vals))


@dataclass(frozen=True, eq=False)
class _Site:
    """One (scene, transform) paste site with everything the loop needs."""

    base: np.ndarray
    rect: tuple[int, int, int, int]
    maps: tuple
    brightness: float
    anchors: tuple
    base_logits: tuple[float, ...]


def _paste_rect(family, box, patch_size, scale, shift, image_shape):
    ph, pw = patch_size
    if family == "physical_patch":
        h = max(1, int(round(ph * scale)))
        w = max(1, int(round(pw * scale)))
        cr = (box.y0 + box.y1) / 2.0 + shift[0]
        cc = (box.x0 + box.x1) / 2.0 + shift[1]
        r0 = int(round(cr - h / 2.0))
        c0 = int(round(cc - w / 2.0))
        if r0 < box.y0 - 0.5 or r0 + h > box.y1 + 0.5 or c0 < box.x0 - 0.5 or c0 + w > box.x1 + 0.5:
            raise AttackError("patch exceeds the target silhouette")
    else:
        bh, bw = box.y1 - box.y0, box.x1 - box.x0
        h = max(1, int(round(bh * scale)))
        w = max(1, int(round(bw * scale)))
        r0 = int(round((box.y0 + box.y1) / 2.0 + shift[0] - h / 2.0))
        c0 = int(round((box.x0 + box.x1) / 2.0 + shift[1] - w / 2.0))
    r0 = max(0, min(r0, image_shape[0] - h))
    c0 = max(0, min(c0, image_shape[1] - w))
    return r0, c0, h, w


def _build_sites(model, scenes, spec, transforms):
    sites = []
    for frame, actor_id in scenes:
        box = _target_box(frame, actor_id)
        base = np.asarray(frame.pixels, dtype=np.float64)
        logits = score_map(model, frame)
        anchors = tuple(_anchor_set(model, frame, box))
        base_logits = tuple(float(logits[i, j, k]) for i, j, k in anchors)
        for scale, shift, bright in transforms:
            r0, c0, h, w = _paste_rect(spec.family, box, spec.patch_size, scale, shift, base.shape[:2])
            sites.append(
                _Site(
                    base=base,
                    rect=(r0, c0, h, w),
                    maps=tuple(_resize_maps(spec.patch_size, (h, w))),
                    brightness=bright,
                    anchors=anchors,
                    base_logits=base_logits,
                )
            )
    return sites


def _site_terms(model, site, patch, want_grad):
    """Mean objectness over the site's anchors, optionally with d/dpatch."""
    r0, c0, h, w = site.rect
    resized = _resize(patch, site.maps)
    region = np.clip(resized + site.brightness, 0.0, 1.0)
    mask = ((resized + site.brightness) > 0.0) & ((resized + site.brightness) < 1.0)
    base_region = site.base[r0:r0 + h, c0:c0 + w, :]
    win = model.window
    total = 0.0
    region_grad = np.zeros_like(region) if want_grad else None
    starts_r = model.anchor_starts(site.base.shape[0])
    starts_c = model.anchor_starts(site.base.shape[1])
    for (i, j, k), z0 in zip(site.anchors, site.base_logits):
        wr, wc = int(starts_r[i]), int(starts_c[j])
        u0, u1 = max(wr, r0), min(wr + win, r0 + h)
        v0, v1 = max(wc, c0), min(wc + win, c0 + w)
        if u0 >= u1 or v0 >= v1:
            z = z0
            conf = 0.5 * (1.0 + np.tanh(0.5 * z))
            total += conf
            continue
        block = model.weights[k, u0 - wr:u1 - wr, v0 - wc:v1 - wc, :]
        delta = region[u0 - r0:u1 - r0, v0 - c0:v1 - c0, :] - base_region[u0 - r0:u1 - r0, v0 - c0:v1 - c0, :]
        z = z0 + float(np.sum(block * delta))
        conf = 0.5 * (1.0 + np.tanh(0.5 * z))
        total += conf
        if want_grad:
            region_grad[u0 - r0:u1 - r0, v0 - c0:v1 - c0, :] += conf * (1.0 - conf) * block
    if want_grad:
        region_grad *= mask
        return total, _resize_adjoint(region_grad, patch.shape[:2], site.maps)
    return total, None


def _objective(model, sites, patch, lam_tv, lam_nps, palette, want_grad):
    n_terms = sum(len(s.anchors) for s in sites)
    total = 0.0
    grad = np.zeros_like(patch) if want_grad else None
    for site in sites:
        t, g = _site_terms(model, site, patch, want_grad)
        total += t
        if want_grad:
            grad += g
    loss = total / n_terms + lam_tv * total_variation(patch) + lam_nps * nps(patch, palette)
    if want_grad:
        grad = grad / n_terms + lam_tv * _tv_gradient(patch) + lam_nps * _nps_gradient(patch, palette)
    return loss, grad


def craft_patch(
    model: DetectorModel,
    scenes: Sequence[tuple[ImageFrame, str]],
    spec: AttackSpec,
    iterations: int | None = None,
    lambda_tv: float | None = None,
    lambda_nps: float | None = None,
    palette=None,
) -> PatchTexture:
    """Optimize a patch or texture against the given scenes.

    scenes pairs each rendered frame with the actor_id of the vehicle to
    camouflage. The returned trace is the objective per accepted step
    and never increases. Deterministic for a fixed spec.seed.
    """
    if spec.family not in ("physical_patch", "physical_texture"):
        raise AttackError(f"{spec.family!r} is not a physical attack family")
    if model.modality != "camera":
        raise AttackError("physical attacks target the camera detector")
    if not scenes:
        raise AttackError("scene set is empty")
    if spec.patch_size is None:
        raise AttackError("spec needs a patch size")

    table = attack_defaults()["physical"]
    iterations = table["iterations"] if iterations is None else iterations
    lam_tv = float(table["lambda_tv"]) if lambda_tv is None else float(lambda_tv)
    lam_nps = float(table["lambda_nps"]) if lambda_nps is None else float(lambda_nps)
    pal = as_palette(palette)

    gen = generator(spec.seed, "attack", "eot")
    transforms = []
    for _ in range(int(table["transforms"])):
        shift = tuple(int(v) for v in gen.integers(-table["translation_px"], table["translation_px"] + 1, 2))
        scale = float(gen.uniform(table["scale_low"], table["scale_high"]))
        bright = float(gen.uniform(-table["brightness"], table["brightness"]))
        transforms.append((scale, shift, bright))

    sites = _build_sites(model, scenes, spec, transforms)
    target_cls = _target_box(scenes[0][0], scenes[0][1]).cls

    patch = generator(spec.seed, "attack", "patchinit").uniform(0.3, 0.7, size=spec.patch_size + (3,))
    loss, grad = _objective(model, sites, patch, lam_tv, lam_nps, pal, True)
    trace = [loss]
    rate = float(table["learning_rate"])
    for _ in range(int(iterations)):
        accepted = False
        for _ in range(30):
            cand = np.clip(patch - rate * grad, 0.0, 1.0)
            cand_loss, cand_grad = _objective(model, sites, cand, lam_tv, lam_nps, pal, True)
            if cand_loss <= trace[-1] + 1e-12:
                patch, loss, grad = cand, cand_loss, cand_grad
                trace.append(cand_loss)
                rate *= 1.2
                accepted = True
                break
            rate *= 0.5
        if not accepted or rate < 1e-12:
            break

    return PatchTexture(
        pixels=patch,
        family=spec.family,
        target_class=target_cls,
        trace=tuple(trace),
        seed=spec.seed,
    )


def apply_patch(frame: ImageFrame, artifact: PatchTexture, actor_id: str) -> ImageFrame:
    """Paste a crafted surface onto one actor at the identity transform."""
    box = _target_box(frame, actor_id)
    size = artifact.pixels.shape[:2]
    r0, c0, h, w = _paste_rect(artifact.family, box, size, 1.0, (0, 0), frame.pixels.shape[:2])
    region = _resize(artifact.pixels, tuple(_resize_maps(size, (h, w))))
    pixels = np.asarray(frame.pixels, dtype=np.float64).copy()
    pixels[r0:r0 + h, c0:c0 + w, :] = region
    return replace(frame, pixels=pixels.astype(frame.pixels.dtype))


def save_patch(artifact: PatchTexture, path: str | Path, model_digest: str = "") -> None:
    meta = {
        "kind": "patch",
        "family": artifact.family,
        "target_class": artifact.target_class,
        "seed": artifact.seed,
        "model_digest": model_digest,
        "budgets": attack_defaults()["physical"],
    }
    write_blob(path, ARTIFACT_MAGIC, meta, {
        "pixels": artifact.pixels,
        "trace": np.asarray(artifact.trace, dtype=np.float64),
    })


def load_patch(path: str | Path) -> PatchTexture:
    meta, arrays = read_blob(path, ARTIFACT_MAGIC)
    if meta.get("kind") != "patch":
        raise AttackError(f"{path}: not a patch artifact")
    return PatchTexture(
        pixels=arrays["pixels"].copy(),
        family=meta["family"],
        target_class=meta["target_class"],
        trace=tuple(float(v) for v in arrays["trace"]),
        seed=int(meta["seed"]),
    )
