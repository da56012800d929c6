"""Detection metrics: IoU, average precision, lane accuracy."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from provingground import geometry
from provingground.geometry import OrientedBox


def _aabb_iou(a: np.ndarray, b: np.ndarray) -> float:
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    if ax1 <= ax0 or ay1 <= ay0 or bx1 <= bx0 or by1 <= by0:
        raise ValueError("degenerate box")
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter
    return float(inter / union)


def _oriented_iou(a: OrientedBox, b: OrientedBox) -> float:
    if min(a.length, a.width, b.length, b.width) <= 0.0:
        raise ValueError("degenerate box")
    pa = geometry.ccw_order(a.corners())
    pb = geometry.ccw_order(b.corners())
    inter = geometry.polygon_area(geometry.clip_convex(pa, pb))
    union = a.length * a.width + b.length * b.width - inter
    return float(inter / union)


def iou(a, b) -> float:
    """Intersection over union of two boxes.

    Axis-aligned boxes are (x0, y0, x1, y1) sequences; bird's-eye-view boxes
    are OrientedBox instances and are intersected by polygon clipping. The
    result is symmetric, 1 for identical boxes, 0 for disjoint ones.
    """
    if isinstance(a, OrientedBox) or isinstance(b, OrientedBox):
        if not (isinstance(a, OrientedBox) and isinstance(b, OrientedBox)):
            raise TypeError("cannot mix axis-aligned and oriented boxes")
        return _oriented_iou(a, b)
    return _aabb_iou(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def average_precision(
    detections: Sequence[Sequence[tuple]],
    ground_truths: Sequence[Sequence],
    iou_threshold: float = 0.5,
) -> float:
    """All-point interpolated average precision for one class.

    `detections[i]` holds (box, confidence) pairs for frame i and
    `ground_truths[i]` the ground-truth boxes of the same frame. Detections
    are ranked by confidence (ties keep insertion order) and greedily matched
    within their frame: a detection is a true positive iff its best-IoU
    still-unmatched ground truth reaches the threshold. AP is the area under
    the precision envelope over recall.

    With neither ground truths nor detections the task is vacuous and AP is
    defined as 1.0; detections against zero ground truths give 0.0.
    """
    if len(detections) != len(ground_truths):
        raise ValueError("detections and ground truths must align per frame")
    n_gt = sum(len(g) for g in ground_truths)
    flat = [
        (float(conf), frame_idx, det_idx, box)
        for frame_idx, frame in enumerate(detections)
        for det_idx, (box, conf) in enumerate(frame)
    ]
    if n_gt == 0:
        return 1.0 if not flat else 0.0
    if not flat:
        return 0.0

    order = sorted(range(len(flat)), key=lambda i: (-flat[i][0], flat[i][1], flat[i][2]))
    matched: set[tuple[int, int]] = set()
    tp = np.zeros(len(flat))
    for rank, i in enumerate(order):
        _, frame_idx, _, box = flat[i]
        best_iou, best_gt = 0.0, -1
        for gt_idx, gt in enumerate(ground_truths[frame_idx]):
            if (frame_idx, gt_idx) in matched:
                continue
            overlap = iou(box, gt)
            if overlap > best_iou:
                best_iou, best_gt = overlap, gt_idx
        if best_iou >= iou_threshold and best_gt >= 0:
            matched.add((frame_idx, best_gt))
            tp[rank] = 1.0

    cum_tp = np.cumsum(tp)
    recall = cum_tp / n_gt
    precision = cum_tp / np.arange(1, len(flat) + 1)
    # Precision envelope: best precision achievable at recall >= r.
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    prev_recall = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum((recall - prev_recall) * envelope))


def lane_accuracy(
    predicted: Sequence[float | None],
    ground_truth: Sequence[Sequence[float]],
    tolerance_px: float = 3.0,
) -> float:
    """Fraction of annotated rows predicted within a pixel tolerance.

    `ground_truth[r]` lists the lane-marking columns of row r (empty rows
    are skipped); `predicted[r]` is the estimated column or None. A row
    counts as correct when a prediction exists and lies within the tolerance
    of any marking column of that row.
    """
    if len(predicted) != len(ground_truth):
        raise ValueError("prediction and ground truth rows must align")
    total = 0
    correct = 0
    for pred, gt_cols in zip(predicted, ground_truth):
        if len(gt_cols) == 0:
            continue
        total += 1
        if pred is None:
            continue
        if min(abs(pred - c) for c in gt_cols) <= tolerance_px:
            correct += 1
    return 1.0 if total == 0 else correct / total
