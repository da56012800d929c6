"""Row-wise lane marking localization by template correlation."""

from __future__ import annotations

import numpy as np

from ..sensors.camera import ImageFrame

# Center-surround profile: bright narrow stripe on darker road surface.
LANE_TEMPLATE = np.array([-1.0, -1.0, 1.0, 2.0, 1.0, -1.0, -1.0])

# Minimum correlation for a row to count as having a marking at all.
MIN_RESPONSE = 0.35


def estimate_lanes(frame: ImageFrame | np.ndarray) -> tuple[float | None, ...]:
    """Estimated marking column for each row of the lower image half.

    Each row of the bottom half is correlated with the stripe template;
    the column of the strongest response wins. Rows whose best response
    stays below threshold yield None. Output index r describes image row
    height//2 + r, matching the frame's lane ground truth layout.
    """
    pixels = frame.pixels if isinstance(frame, ImageFrame) else np.asarray(frame)
    gray = pixels.mean(axis=2, dtype=np.float64)
    half = gray.shape[0] // 2
    lower = gray[half:]
    pad = len(LANE_TEMPLATE) // 2

    out: list[float | None] = []
    for row in lower:
        scores = np.correlate(row, LANE_TEMPLATE, mode="valid")
        best = int(np.argmax(scores))
        if scores[best] < MIN_RESPONSE:
            out.append(None)
        else:
            out.append(float(best + pad))
    return tuple(out)


def lane_rows(gt_lanes) -> list[list[float]]:
    """Ground-truth columns per row in the shape lane_accuracy expects."""
    return [[c] if c >= 0 else [] for c in gt_lanes]
