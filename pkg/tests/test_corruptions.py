"""Corruption engine tests: oracles, determinism, monotone severity."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from provingground.corruptions import (
    CORRUPTION_KINDS,
    CorruptionError,
    CorruptionSpec,
    allowed_targets,
    corrupt_image,
    corrupt_points,
    load_severity_table,
    severity_params,
)
from provingground.rng import generator
from provingground.sensors import ImageFrame, LidarConfig, PointCloud, render_camera, scan_lidar
from test_sensors import TWO_LANE, ego_at, raw_actor, raw_state

CAMERA_KINDS = tuple(k for k in CORRUPTION_KINDS if "camera" in allowed_targets(k))
LIDAR_KINDS = tuple(k for k in CORRUPTION_KINDS if "lidar" in allowed_targets(k))


def reference_scene():
    return raw_state(
        ego_at(x=5.0),
        raw_actor("lead", "vehicle", 18.0, 0.0),
        raw_actor("left", "vehicle", 26.0, 3.5),
        raw_actor("walker", "pedestrian", 14.0, 2.0, length=0.6, width=0.6, height=1.8),
    )


@pytest.fixture(scope="module")
def frame():
    return render_camera(reference_scene(), TWO_LANE)


@pytest.fixture(scope="module")
def cloud():
    swept = scan_lidar(reference_scene())
    assert len(swept.gt_boxes) >= 2
    return swept


def flat_frame(value=0.5, depth=0.0):
    pixels = np.full((256, 256, 3), value, dtype=np.float32)
    depths = np.full((256, 256), depth, dtype=np.float32)
    return ImageFrame(pixels=pixels, depth=depths, gt_boxes=(), gt_lanes=(-1.0,) * 128)


def synthetic_cloud(n=10_000, seed=7, spread=30.0, center=(0.0, 0.0, 0.0)):
    gen = generator(seed, "test-cloud")
    xyz = gen.uniform(-spread, spread, (n, 3)) + np.asarray(center)
    intensity = gen.uniform(0.05, 0.8, (n, 1))
    return PointCloud(
        points=np.concatenate([xyz, intensity], axis=1),
        gt_boxes=(),
        origin=(0.0, 0.0, 1.6, 0.0),
        config=LidarConfig(),
    )


# ------------------------------------------------------------------- oracles


def test_gaussian_severity3_sample_std():
    spec = CorruptionSpec("gaussian_noise", severity=3, seed=11)
    out = corrupt_image(flat_frame(0.5), spec)
    sigma = severity_params("gaussian_noise", "camera", 3)["sigma"]
    sample = (out.pixels - 0.5).ravel()
    assert sample.size >= 100_000
    assert abs(float(sample.std()) - sigma) <= 0.1 * sigma


def test_fog_leaves_zero_depth_frame_unchanged():
    frame = flat_frame(0.42, depth=0.0)
    out = corrupt_image(frame, CorruptionSpec("fog", severity=5, seed=3))
    assert np.array_equal(out.pixels, frame.pixels)


def test_density_severity5_halves_point_count():
    cloud = synthetic_cloud(10_000)
    out = corrupt_points(cloud, CorruptionSpec("density_decrease", severity=5, seed=5))
    assert abs(len(out.points) - 5_000) <= 1


def test_local_cutout_without_boxes_is_identity():
    cloud = synthetic_cloud(2_000)
    out = corrupt_points(cloud, CorruptionSpec("local_cutout", severity=4, seed=9))
    assert np.array_equal(out.points, cloud.points)
    assert out.gt_boxes == ()


def test_cutout_ball_in_empty_space_changes_nothing():
    # points clustered near (70, 0): every ball center lies within +-40 m,
    # so the severity-5 radius of 6 m can never reach them
    cloud = synthetic_cloud(1_500, spread=0.5, center=(70.0, 0.0, -1.0))
    for seed in range(5):
        out = corrupt_points(cloud, CorruptionSpec("cutout", severity=5, seed=seed))
        assert np.array_equal(out.points, cloud.points)


# -------------------------------------------------------------- determinism


def test_camera_corruptions_are_deterministic(frame):
    for kind in CAMERA_KINDS:
        spec = CorruptionSpec(kind, severity=3, seed=21, target="camera")
        a = corrupt_image(frame, spec)
        b = corrupt_image(frame, spec)
        assert np.array_equal(a.pixels, b.pixels), kind


def test_lidar_corruptions_are_deterministic(cloud):
    for kind in LIDAR_KINDS:
        spec = CorruptionSpec(kind, severity=3, seed=21, target="lidar")
        a = corrupt_points(cloud, spec)
        b = corrupt_points(cloud, spec)
        assert np.array_equal(a.points, b.points), kind
        assert a.gt_boxes == b.gt_boxes, kind


def test_different_seeds_differ(frame):
    a = corrupt_image(frame, CorruptionSpec("gaussian_noise", severity=3, seed=1))
    b = corrupt_image(frame, CorruptionSpec("gaussian_noise", severity=3, seed=2))
    assert not np.array_equal(a.pixels, b.pixels)


# ------------------------------------------------------------- gt preservation


def test_camera_gt_and_depth_pass_through(frame):
    for kind in CAMERA_KINDS:
        out = corrupt_image(frame, CorruptionSpec(kind, severity=5, seed=2, target="camera"))
        assert out.gt_boxes is frame.gt_boxes
        assert out.gt_lanes is frame.gt_lanes
        assert out.depth is frame.depth


def test_lidar_gt_boxes_only_ever_removed(cloud):
    before = {b.actor_id for b in cloud.gt_boxes}
    for kind in LIDAR_KINDS:
        out = corrupt_points(cloud, CorruptionSpec(kind, severity=5, seed=4, target="lidar"))
        after = {b.actor_id for b in out.gt_boxes}
        assert after <= before, kind


def test_local_density_can_erase_a_box(cloud):
    # severity 5 removes 65% of one object's points; run a few seeds and
    # expect the recount to drop a box at least once for a small object
    dropped = False
    for seed in range(12):
        out = corrupt_points(cloud, CorruptionSpec("local_density", severity=5, seed=seed))
        if len(out.gt_boxes) < len(cloud.gt_boxes):
            dropped = True
            break
    assert dropped or all(b.n_points > 14 for b in cloud.gt_boxes)


# ---------------------------------------------------------------- invariants


def test_corrupted_pixels_stay_in_range(frame):
    for kind in CAMERA_KINDS:
        for severity in (1, 5):
            out = corrupt_image(frame, CorruptionSpec(kind, severity=severity, seed=13, target="camera"))
            assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0, kind


def test_corrupted_points_keep_sensor_invariants(cloud):
    for kind in LIDAR_KINDS:
        out = corrupt_points(cloud, CorruptionSpec(kind, severity=5, seed=13, target="lidar"))
        ranges = np.linalg.norm(out.points[:, :3], axis=1)
        assert np.all(ranges <= cloud.config.max_range + 1e-9), kind
        assert np.all(out.points[:, 3] >= 0.0) and np.all(out.points[:, 3] <= 1.0), kind
        assert np.all(np.isfinite(out.points)), kind


# ------------------------------------------------------------- monotonicity


def test_camera_damage_non_decreasing_in_severity(frame):
    for kind in CAMERA_KINDS:
        damages = []
        for severity in (1, 2, 3, 4, 5):
            out = corrupt_image(frame, CorruptionSpec(kind, severity=severity, seed=31, target="camera"))
            damages.append(float(np.abs(out.pixels.astype(float) - frame.pixels.astype(float)).mean()))
        assert damages[-1] > damages[0] > 0.0, kind
        assert all(b >= a - 1e-12 for a, b in zip(damages, damages[1:])), (kind, damages)


def _row_multiset(points: np.ndarray) -> Counter:
    return Counter(row.tobytes() for row in np.ascontiguousarray(points))


# the documented distortion functional per kind: how many points were
# removed, how far surviving points moved, or how much the multiset of
# rows churned (for kinds that both drop and inject)
def _removed(before, after):
    return len(before.points) - len(after.points)


def _mean_shift(before, after):
    assert len(after.points) == len(before.points)
    return float(np.abs(after.points - before.points).mean())


def _churn(before, after):
    a, b = _row_multiset(before.points), _row_multiset(after.points)
    matched = sum((a & b).values())
    return len(before.points) + len(after.points) - 2 * matched


LIDAR_DAMAGE = {
    "density_decrease": _removed,
    "cutout": _removed,
    "local_density": _removed,
    "local_cutout": _removed,
    "fog": _removed,
    "strong_sunlight": _removed,
    "crosstalk": _mean_shift,
    "local_gaussian": _mean_shift,
    "local_uniform": _mean_shift,
    "local_impulse": _mean_shift,
    "snow": _churn,
    "rain": _churn,
}


def test_lidar_damage_non_decreasing_in_severity(cloud):
    assert sorted(LIDAR_DAMAGE) == sorted(LIDAR_KINDS)
    for kind, damage in LIDAR_DAMAGE.items():
        damages = []
        for severity in (1, 2, 3, 4, 5):
            out = corrupt_points(cloud, CorruptionSpec(kind, severity=severity, seed=6, target="lidar"))
            damages.append(damage(cloud, out))
        assert damages[-1] > 0, kind
        assert all(b >= a - 1e-12 for a, b in zip(damages, damages[1:])), (kind, damages)


def test_fog_attenuation_grows_while_no_points_drop(cloud):
    # severities whose range cap exceeds every return leave the count
    # intact, so rows stay aligned and the intensity loss must grow
    deltas = []
    for severity in (1, 2, 3):
        out = corrupt_points(cloud, CorruptionSpec("fog", severity=severity, seed=31, target="lidar"))
        assert len(out.points) == len(cloud.points)
        deltas.append(float(np.abs(out.points[:, 3] - cloud.points[:, 3]).mean()))
    assert deltas[0] > 0.0
    assert deltas[0] < deltas[1] < deltas[2]


def test_severity_table_is_complete_and_monotone():
    table = load_severity_table()
    assert sorted(table) == sorted(CORRUPTION_KINDS)
    assert len(CORRUPTION_KINDS) == 16


def test_tampered_severity_table_rejected(tmp_path):
    bad = tmp_path / "severity.yaml"
    bad.write_text("gaussian_noise:\n  camera:\n    sigma: [0.2, 0.1, 0.3, 0.4, 0.5]\n")
    with pytest.raises(CorruptionError):
        load_severity_table(str(bad))


# -------------------------------------------------------------------- errors


def test_kind_target_compatibility_enforced():
    with pytest.raises(CorruptionError, match="motion_blur.*lidar"):
        CorruptionSpec("motion_blur", target="lidar")
    with pytest.raises(CorruptionError, match="crosstalk.*camera"):
        CorruptionSpec("crosstalk", target="camera")
    with pytest.raises(CorruptionError, match="both"):
        CorruptionSpec("impulse_noise", target="both")
    with pytest.raises(CorruptionError):
        CorruptionSpec("vignette")
    with pytest.raises(CorruptionError):
        CorruptionSpec("fog", severity=6)


def test_apply_rejects_wrong_sensor(frame, cloud):
    with pytest.raises(CorruptionError, match="density_decrease"):
        corrupt_image(frame, CorruptionSpec("density_decrease"))
    with pytest.raises(CorruptionError, match="motion_blur"):
        corrupt_points(cloud, CorruptionSpec("motion_blur"))


def test_weather_spec_covers_both_sensors(frame, cloud):
    spec = CorruptionSpec("snow", severity=2, seed=8)
    assert spec.target == "both"
    assert corrupt_image(frame, spec).pixels.shape == frame.pixels.shape
    assert len(corrupt_points(cloud, spec).points) > 0
