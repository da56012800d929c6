"""Camera-frame corruptions.

Every transform draws from one PCG64 generator derived from (seed, kind)
but not severity: severity only scales how much of the same random
pattern applies (larger noise amplitude, more of the same flakes, a
wider threshold). That makes the per-kind distortion grow monotonically
with severity sample-by-sample, not merely in expectation. Pixels are
clamped back to [0,1]; ground truth and the depth buffer pass through
untouched, since corruption degrades the observation, not the scene.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..rng import generator
from ..sensors.camera import ImageFrame
from .spec import CorruptionError, CorruptionSpec, load_severity_table, severity_params

# disc offsets for snow flakes, radius 1 and 2 pixels
_DISC1 = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))
_DISC2 = _DISC1 + ((1, 1), (1, -1), (-1, 1), (-1, -1), (2, 0), (-2, 0), (0, 2), (0, -2))


def _max_param(kind: str, target: str, name: str) -> float:
    return max(load_severity_table()[kind][target][name])


def _scatter(pixels, rows, cols, value, alpha=1.0):
    h, w = pixels.shape[:2]
    ok = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
    r, c = rows[ok], cols[ok]
    pixels[r, c] = (1.0 - alpha) * pixels[r, c] + alpha * value


def _snow(pixels, params, gen):
    pixels[:] = 0.5 + params["contrast"] * (pixels - 0.5)
    n_max = int(_max_param("snow", "camera", "flakes"))
    cols = gen.integers(0, pixels.shape[1], n_max)
    rows = gen.integers(0, pixels.shape[0], n_max)
    radii = gen.integers(1, 3, n_max)
    n = int(params["flakes"])
    cols, rows, radii = cols[:n], rows[:n], radii[:n]
    value = params["flake_value"]
    for radius, disc in ((1, _DISC1), (2, _DISC2)):
        sel = radii == radius
        for dr, dc in disc:
            _scatter(pixels, rows[sel] + dr, cols[sel] + dc, value)


def _rain(pixels, params, gen):
    n_max = int(_max_param("rain", "camera", "streaks"))
    cols = gen.uniform(0, pixels.shape[1], n_max)
    rows = gen.uniform(0, pixels.shape[0], n_max)
    n = int(params["streaks"])
    length = int(params["streak_length"])
    # streaks fall steeply, slanted a quarter pixel per row
    t = np.arange(length)
    rr = (rows[:n, None] + t).astype(int).ravel()
    cc = (cols[:n, None] + 0.25 * t).astype(int).ravel()
    _scatter(pixels, rr, cc, params["streak_value"], alpha=params["streak_alpha"])


def _fog(pixels, depth, params):
    transmit = np.exp(-params["beta"] * depth.astype(np.float64))
    transmit = transmit[..., None].astype(pixels.dtype)
    pixels[:] = pixels * transmit + params["atmosphere"] * (1.0 - transmit)


def _sunlight(pixels, params, gen):
    h, w = pixels.shape[:2]
    cx = gen.uniform(0.2 * w, 0.8 * w)
    cy = gen.uniform(0.0, 0.4 * h)
    yy, xx = np.mgrid[0:h, 0:w]
    sigma = params["radius"] / 2.0
    glow = params["peak"] * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * sigma**2))
    pixels += glow[..., None].astype(pixels.dtype) * np.array([1.0, 1.0, 0.92], dtype=pixels.dtype)


def _motion_blur(pixels, params):
    k = int(params["kernel"])
    pad = k // 2
    padded = np.pad(pixels, ((0, 0), (pad, pad), (0, 0)), mode="edge")
    summed = np.cumsum(padded, axis=1, dtype=np.float64)
    summed = np.concatenate([np.zeros_like(summed[:, :1]), summed], axis=1)
    pixels[:] = ((summed[:, k:] - summed[:, :-k]) / k).astype(pixels.dtype)


def corrupt_image(frame: ImageFrame, spec: CorruptionSpec) -> ImageFrame:
    """Apply one corruption to a camera frame."""
    if not spec.admits("camera"):
        raise CorruptionError(
            f"corruption {spec.kind!r} with target {spec.target!r} cannot corrupt camera frames"
        )
    params = severity_params(spec.kind, "camera", spec.severity)
    gen = generator(spec.seed, "corrupt", "camera", spec.kind)
    pixels = frame.pixels.copy()

    if spec.kind == "gaussian_noise":
        noise = gen.standard_normal(pixels.shape) * params["sigma"]
        pixels += noise.astype(pixels.dtype)
    elif spec.kind == "uniform_noise":
        noise = gen.uniform(-1.0, 1.0, pixels.shape) * params["half_width"]
        pixels += noise.astype(pixels.dtype)
    elif spec.kind == "impulse_noise":
        field = gen.random(pixels.shape[:2])
        salt = gen.random(pixels.shape[:2]) < 0.5
        hit = field < params["fraction"]
        pixels[hit & salt] = 1.0
        pixels[hit & ~salt] = 0.0
    elif spec.kind == "motion_blur":
        _motion_blur(pixels, params)
    elif spec.kind == "fog":
        _fog(pixels, frame.depth, params)
    elif spec.kind == "snow":
        _snow(pixels, params, gen)
    elif spec.kind == "rain":
        _rain(pixels, params, gen)
    elif spec.kind == "strong_sunlight":
        _sunlight(pixels, params, gen)
    else:
        raise CorruptionError(f"corruption {spec.kind!r} has no camera model")

    np.clip(pixels, 0.0, 1.0, out=pixels)
    return replace(frame, pixels=pixels)
