"""L-inf bounded digital perturbations of camera frames and BEV grids.

Both operations maximize the detector's logistic loss for the given
labels. The model's score map is linear in the input, so one gradient
already points at the locally steepest ascent; iterating with
projection tightens it further within the same budget.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..perception import DetectorModel, loss_and_input_gradient
from ..rng import generator
from ..sensors import ImageFrame
from .spec import AttackError


def _split(x):
    """(raw array float64, rebuild function preserving the container)."""
    if isinstance(x, ImageFrame):
        dtype = x.pixels.dtype
        return np.asarray(x.pixels, dtype=np.float64), lambda arr: replace(
            x, pixels=arr.astype(dtype)
        )
    arr = np.asarray(x)
    dtype = arr.dtype
    return arr.astype(np.float64), lambda out: out.astype(dtype)


def fgsm(model: DetectorModel, x, targets, epsilon: float):
    """One signed-gradient ascent step, clipped back to valid pixels.

    Returns the same container type as x (ImageFrame in, ImageFrame out
    with ground truth untouched). The output never deviates from the
    input by more than epsilon in any element.
    """
    if epsilon < 0:
        raise AttackError("epsilon must be non-negative")
    arr, rebuild = _split(x)
    _, grad = loss_and_input_gradient(model, arr, targets)
    out = np.clip(arr + epsilon * np.sign(grad), 0.0, 1.0)
    return rebuild(out)


def pgd(
    model: DetectorModel,
    x,
    targets,
    epsilon: float,
    alpha: float | None = None,
    steps: int = 10,
    seed: int = 0,
    random_start: bool = True,
    record_steps: list | None = None,
):
    """Iterated signed-gradient ascent projected onto the epsilon ball.

    alpha defaults to epsilon / 4. With steps=1 and no random start this
    reduces exactly to fgsm at step size alpha. Every iterate (exposed
    via record_steps) stays within the ball and inside [0, 1]; the whole
    run is deterministic for a fixed seed.
    """
    if epsilon < 0:
        raise AttackError("epsilon must be non-negative")
    if steps < 1:
        raise AttackError("steps must be at least 1")
    if alpha is None:
        alpha = epsilon / 4.0
    if alpha > epsilon:
        raise AttackError("step size alpha must not exceed epsilon")

    arr, rebuild = _split(x)
    lo = np.clip(arr - epsilon, 0.0, 1.0)
    hi = np.clip(arr + epsilon, 0.0, 1.0)
    adv = arr
    if random_start and epsilon > 0:
        gen = generator(seed, "attack", "pgd")
        adv = np.clip(arr + gen.uniform(-epsilon, epsilon, size=arr.shape), lo, hi)
    for _ in range(steps):
        _, grad = loss_and_input_gradient(model, adv, targets)
        adv = np.clip(adv + alpha * np.sign(grad), lo, hi)
        if record_steps is not None:
            record_steps.append(adv.copy())
    return rebuild(adv)
