from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from provingground.geometry import OrientedBox
from provingground.metrics import (
    PENALTY_COEFFICIENTS,
    EpisodeResult,
    aggregate_report,
    average_precision,
    driving_score,
    infraction_penalty,
    iou,
    lane_accuracy,
)
from provingground.metrics.scores import UnknownInfractionError, count_infractions


# --- independent oracles -------------------------------------------------

def penalty_fold_oracle(counts: dict[str, int]) -> float:
    # Fold formulation: repeatedly apply each infraction to the running sum.
    weighted = functools.reduce(
        lambda acc, kind: acc + [PENALTY_COEFFICIENTS[kind]] * counts[kind],
        sorted(counts),
        [],
    )
    return 1.0 / functools.reduce(lambda acc, c: acc + c, weighted, 1.0)


def ap_operating_point_oracle(detections, ground_truths, threshold=0.5) -> float:
    # Enumerate every top-k prefix as an operating point, re-matching from
    # scratch each time, then integrate the precision envelope over recall.
    n_gt = sum(len(g) for g in ground_truths)
    flat = [
        (conf, fi, di, box)
        for fi, frame in enumerate(detections)
        for di, (box, conf) in enumerate(frame)
    ]
    if n_gt == 0:
        return 1.0 if not flat else 0.0
    if not flat:
        return 0.0
    flat.sort(key=lambda t: (-t[0], t[1], t[2]))

    points = []
    for k in range(1, len(flat) + 1):
        matched = set()
        tp = 0
        for conf, fi, di, box in flat[:k]:
            best, best_gt = 0.0, None
            for gi, gt in enumerate(ground_truths[fi]):
                if (fi, gi) in matched:
                    continue
                v = iou(box, gt)
                if v > best:
                    best, best_gt = v, gi
            if best >= threshold:
                matched.add((fi, best_gt))
                tp += 1
        points.append((tp / n_gt, tp / k))

    recalls = sorted({r for r, _ in points})
    ap = 0.0
    prev = 0.0
    for r in recalls:
        envelope = max(p for rr, p in points if rr >= r)
        ap += (r - prev) * envelope
        prev = r
    return ap


def iou_sampling_oracle(a: OrientedBox, b: OrientedBox, n=4_000_000, seed=0) -> float:
    corners = np.vstack([a.corners(), b.corners()])
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.uniform(lo, hi, size=(n, 2))
    in_a, in_b = a.contains(pts), b.contains(pts)
    area = np.prod(hi - lo)
    inter = in_a.__and__(in_b).mean() * area
    union = in_a.__or__(in_b).mean() * area
    return float(inter / union)


# --- infraction penalty ---------------------------------------------------

def test_penalty_zero_infractions():
    assert infraction_penalty({}) == 1.0


def test_penalty_single_pedestrian_collision():
    assert infraction_penalty({"collision_pedestrian": 1}) == 0.5


def test_penalty_vehicle_plus_stop_sign():
    got = infraction_penalty({"collision_vehicle": 1, "stop_sign": 1})
    assert got == pytest.approx(1.0 / 1.95, abs=1e-12)


def test_penalty_singletons_exact():
    expected = {
        "collision_pedestrian": 0.5,
        "collision_vehicle": 1 / 1.7,
        "collision_static": 1 / 1.6,
        "red_light": 1 / 1.4,
        "fail_yield_emergency": 1 / 1.4,
        "stop_sign": 1 / 1.25,
    }
    for kind, want in expected.items():
        assert infraction_penalty({kind: 1}) == want


def test_penalty_matches_fold_oracle_random():
    rng = np.random.Generator(np.random.PCG64(7))
    kinds = list(PENALTY_COEFFICIENTS)
    for _ in range(200):
        counts = {k: int(rng.integers(0, 5)) for k in kinds}
        assert infraction_penalty(counts) == pytest.approx(penalty_fold_oracle(counts), abs=1e-12)


def test_penalty_rejects_unknown_kind():
    with pytest.raises(UnknownInfractionError):
        infraction_penalty({"jaywalking": 1})


@given(st.dictionaries(st.sampled_from(sorted(PENALTY_COEFFICIENTS)), st.integers(0, 50)))
def test_penalty_bounded_and_monotone(counts):
    p = infraction_penalty(counts)
    assert 0.0 < p <= 1.0
    bumped = dict(counts)
    bumped["red_light"] = bumped.get("red_light", 0) + 1
    assert infraction_penalty(bumped) < p


# --- driving score ----------------------------------------------------------

def test_driving_score_examples():
    assert driving_score(100.0, 1.0) == 100.0
    assert driving_score(100.0, 0.5) == 50.0
    assert driving_score(67.0, 0.5) == 33.5


def test_driving_score_linear_in_completion():
    for r in np.linspace(0.0, 100.0, 11):
        assert driving_score(float(r), 0.4) == pytest.approx(0.4 * r, abs=0.0)


# --- IoU ---------------------------------------------------------------------

def test_iou_identical_and_disjoint():
    assert iou((0, 0, 2, 2), (0, 0, 2, 2)) == 1.0
    assert iou((0, 0, 1, 1), (10, 10, 11, 11)) == 0.0


def test_iou_hand_example():
    assert iou((0, 0, 2, 2), (1, 0, 3, 2)) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_iou_rejects_degenerate():
    with pytest.raises(ValueError):
        iou((0, 0, 0, 2), (0, 0, 1, 1))


def test_oriented_iou_identical():
    a = OrientedBox(1.0, 2.0, 0.3, 4.0, 2.0)
    assert iou(a, a) == pytest.approx(1.0, abs=1e-9)


def test_oriented_iou_matches_sampling_oracle():
    rng = np.random.Generator(np.random.PCG64(3))
    for i in range(8):
        a = OrientedBox(0.0, 0.0, float(rng.uniform(0, np.pi)), 4.0, 2.0)
        b = OrientedBox(
            float(rng.uniform(-2, 2)),
            float(rng.uniform(-1, 1)),
            float(rng.uniform(0, np.pi)),
            3.0,
            1.5,
        )
        got = iou(a, b)
        want = iou_sampling_oracle(a, b, seed=100 + i)
        assert got == pytest.approx(want, abs=1e-3)
        assert got == pytest.approx(iou(b, a), abs=1e-12)


@given(
    st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 4), st.floats(0.1, 4)),
    st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 4), st.floats(0.1, 4)),
)
@settings(max_examples=60)
def test_iou_symmetric_bounded(a, b):
    box_a = (a[0], a[1], a[0] + a[2], a[1] + a[3])
    box_b = (b[0], b[1], b[0] + b[2], b[1] + b[3])
    v = iou(box_a, box_b)
    assert 0.0 <= v <= 1.0 + 1e-12
    assert v == pytest.approx(iou(box_b, box_a), abs=1e-12)


# --- average precision -------------------------------------------------------

def test_ap_single_true_positive():
    dets = [[((0, 0, 2, 2), 0.9)]]
    gts = [[(0.1, 0.0, 2.0, 2.0)]]
    assert average_precision(dets, gts) == 1.0


def test_ap_below_threshold_is_zero():
    dets = [[((0, 0, 2, 2), 0.9)]]
    gts = [[(1.5, 1.5, 3.5, 3.5)]]
    assert average_precision(dets, gts) == 0.0


def test_ap_hand_computed_example():
    # Two ground truths; three detections ranked .9 (TP), .8 (FP), .7 (TP).
    gts = [[(0, 0, 2, 2), (10, 10, 12, 12)]]
    dets = [[
        ((0, 0, 2, 2), 0.9),
        ((100, 100, 102, 102), 0.8),
        ((10, 10, 12, 12), 0.7),
    ]]
    want = 0.5 * 1.0 + 0.5 * (2.0 / 3.0)
    got = average_precision(dets, gts)
    assert got == pytest.approx(want, abs=1e-9)
    assert got == pytest.approx(ap_operating_point_oracle(dets, gts), abs=1e-12)


def test_ap_empty_conventions():
    assert average_precision([[]], [[]]) == 1.0
    assert average_precision([[((0, 0, 1, 1), 0.9)]], [[]]) == 0.0
    assert average_precision([[]], [[(0, 0, 1, 1)]]) == 0.0


def test_ap_matches_operating_point_oracle_random():
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(100):
        n_frames = int(rng.integers(1, 3))
        gts, dets = [], []
        for _ in range(n_frames):
            frame_gts = []
            for _ in range(int(rng.integers(0, 4))):
                x, y = rng.uniform(0, 20, size=2)
                frame_gts.append((x, y, x + 2, y + 2))
            frame_dets = []
            for _ in range(int(rng.integers(0, 6))):
                if frame_gts and rng.uniform() < 0.6:
                    gx, gy = frame_gts[int(rng.integers(0, len(frame_gts)))][:2]
                    x, y = gx + rng.uniform(-0.5, 0.5), gy + rng.uniform(-0.5, 0.5)
                else:
                    x, y = rng.uniform(0, 20, size=2)
                frame_dets.append(((x, y, x + 2, y + 2), float(rng.uniform())))
            gts.append(frame_gts)
            dets.append(frame_dets)
        want = ap_operating_point_oracle(dets, gts)
        assert average_precision(dets, gts) == pytest.approx(want, abs=1e-12)


# --- lane accuracy -----------------------------------------------------------

def test_lane_accuracy_exact_and_missing():
    gt = [[100.0]] * 10
    assert lane_accuracy([100.0] * 10, gt) == 1.0
    assert lane_accuracy([None] * 10, gt) == 0.0


def test_lane_accuracy_half_off():
    gt = [[50.0]] * 8
    pred = [50.0] * 4 + [60.0] * 4
    assert lane_accuracy(pred, gt) == 0.5


def test_lane_accuracy_skips_unannotated_rows():
    gt = [[], [10.0], [], [20.0]]
    pred = [None, 11.0, 5.0, 40.0]
    assert lane_accuracy(pred, gt) == 0.5


# --- aggregation -------------------------------------------------------------

def _result(agent, item, variant, completion, counts):
    return EpisodeResult.from_episode(
        instance_id=f"{item}#{variant}",
        agent=agent,
        item=item,
        variant=variant,
        completion=completion,
        infraction_counts=counts,
    )


def test_aggregate_single_result_identity():
    r = _result("rule", "CutIn", 0, 80.0, {"red_light": 1})
    report = aggregate_report([r])
    assert len(report.item_rows) == 1
    row = report.item_rows[0]
    assert row.completion == r.completion
    assert row.penalty == r.penalty
    assert row.score == r.score


def test_aggregate_reference_row_average():
    # Route-completion cells of one published leaderboard row; the uniform
    # per-item mean must come out at 82.9125.
    completions = [67.0, 100.0, 100.0, 46.0, 50.3, 100.0, 100.0, 100.0]
    results = [
        _result("agent_a", f"item_{i}", 0, c, {}) for i, c in enumerate(completions)
    ]
    report = aggregate_report(results)
    assert report.averages["agent_a"]["R"] == pytest.approx(82.9125, abs=1e-9)
    assert abs(report.averages["agent_a"]["R"] - 82.91) <= 0.005


def test_aggregate_permutation_invariant():
    rng = np.random.Generator(np.random.PCG64(5))
    results = [
        _result("a", f"item_{i % 3}", i // 3, float(rng.uniform(0, 100)), {})
        for i in range(12)
    ]
    rep1 = aggregate_report(results)
    shuffled = list(results)
    rng.shuffle(shuffled)
    rep2 = aggregate_report(shuffled)
    assert rep1 == rep2
    assert rep1.to_csv() == rep2.to_csv()


def test_aggregate_mixes_variant_means():
    results = [
        _result("a", "item", 0, 100.0, {}),
        _result("a", "item", 1, 50.0, {"collision_pedestrian": 1}),
    ]
    row = aggregate_report(results).item_rows[0]
    assert row.completion == 75.0
    assert row.penalty == pytest.approx((1.0 + 0.5) / 2)
    assert row.score == pytest.approx((100.0 + 25.0) / 2)


def test_count_infractions_round_trip():
    kinds = ["red_light", "red_light", "stop_sign"]
    assert count_infractions(kinds) == {"red_light": 2, "stop_sign": 1}
    with pytest.raises(UnknownInfractionError):
        count_infractions(["tailgating"])


def test_episode_result_validates_score_product():
    with pytest.raises(ValueError):
        EpisodeResult(
            instance_id="x", agent="a", item="i", variant=0,
            completion=50.0, penalty=0.5, score=30.0,
        )
