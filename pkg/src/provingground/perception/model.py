"""Linear window detectors over camera images and BEV grids.

A model scores a fixed-size window of input values at every anchor of a
strided grid and turns each logit into one objectness confidence per
class. Boxes are not regressed: every class detects at a fixed box size
centered on the anchor. Scores are linear in the input, so the loss
gradient with respect to the input is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..sensors.camera import ImageFrame
from ..sensors.containers import MODEL_MAGIC, read_blob, write_blob
from .bev import BevConfig

CLASSES = ("car", "pedestrian", "bicycle", "obstacle")

# Fixed detection box extents per class: meters (forward, left) in BEV,
# pixels (width, height) on camera images.
BEV_SIZES = {
    "car": (4.6, 2.0),
    "pedestrian": (0.7, 0.7),
    "bicycle": (1.8, 0.8),
    "obstacle": (1.0, 1.0),
}
CAMERA_SIZES = {
    "car": (26.0, 34.0),
    "pedestrian": (28.0, 10.0),
    "bicycle": (22.0, 20.0),
    "obstacle": (14.0, 18.0),
}

BEV_WINDOW = 21
BEV_STRIDE = 4
CAMERA_WINDOW = 25
CAMERA_STRIDE = 8

CONFIDENCE_THRESHOLD = 0.5
NMS_IOU = 0.5


@dataclass(frozen=True)
class Detection:
    """One detected box.

    Corners are (x0, y0, x1, y1) with x along input axis 0 and y along
    axis 1: BEV meters (forward, left) for lidar grids, and (row, col)
    pixels for camera images. Note that image-frame ground truth stores
    (col, row) order, so camera consumers swap when comparing.
    """

    cls: str
    x0: float
    y0: float
    x1: float
    y1: float
    confidence: float


@dataclass(frozen=True)
class DetectionSet:
    detections: tuple[Detection, ...]
    modality: str

    def __post_init__(self):
        for d in self.detections:
            if not 0.0 <= d.confidence <= 1.0:
                raise ValueError(f"confidence {d.confidence} outside [0, 1]")
            if d.x1 <= d.x0 or d.y1 <= d.y0:
                raise ValueError("degenerate detection box")

    def __len__(self) -> int:
        return len(self.detections)

    def for_class(self, cls: str) -> tuple[Detection, ...]:
        return tuple(d for d in self.detections if d.cls == cls)


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """Per-anchor linear objectness scorer.

    weights has shape (classes, window, window, channels) with channels
    3 for camera input and 1 for BEV grids; bias has shape (classes,).
    The bev field carries the grid geometry that detections are mapped
    through (None for camera models).
    """

    modality: str
    window: int
    stride: int
    classes: tuple[str, ...]
    sizes: tuple[tuple[float, float], ...]
    weights: np.ndarray
    bias: np.ndarray
    bev: BevConfig | None = None
    trained_on: str = ""

    def __post_init__(self):
        if self.modality not in ("camera", "bev"):
            raise ValueError(f"unknown modality {self.modality!r}")
        if self.window < 1 or self.stride < 1:
            raise ValueError("window and stride must be positive")
        if len(self.sizes) != len(self.classes):
            raise ValueError("sizes must align with classes")
        expected = (len(self.classes), self.window, self.window, self.channels)
        if self.weights.shape != expected:
            raise ValueError(f"weights shape {self.weights.shape}, expected {expected}")
        if self.bias.shape != (len(self.classes),):
            raise ValueError("bias must hold one value per class")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("model parameters must be finite")
        if self.modality == "bev" and self.bev is None:
            object.__setattr__(self, "bev", BevConfig())

    @property
    def channels(self) -> int:
        return 3 if self.modality == "camera" else 1

    def class_index(self, cls: str) -> int:
        try:
            return self.classes.index(cls)
        except ValueError:
            raise ValueError(f"model does not score class {cls!r}") from None

    # --- anchor geometry -------------------------------------------------

    def anchor_starts(self, dim: int) -> np.ndarray:
        if dim < self.window:
            raise ValueError(f"input dimension {dim} smaller than window {self.window}")
        return np.arange(0, dim - self.window + 1, self.stride)

    def anchor_centers(self, dim: int) -> np.ndarray:
        """Anchor centers in native units (pixels, or meters via bev)."""
        centers = self.anchor_starts(dim) + self.window / 2.0
        if self.modality == "bev":
            return centers * self.bev.cell - self.bev.extent
        return centers

    def box_at(self, cls: str, cx: float, cy: float) -> tuple[float, float, float, float]:
        a, b = self.sizes[self.class_index(cls)]
        return (cx - a / 2.0, cy - b / 2.0, cx + a / 2.0, cy + b / 2.0)


def _as_input(model: DetectorModel, x) -> np.ndarray:
    if isinstance(x, ImageFrame):
        if model.modality != "camera":
            raise ValueError("image input requires a camera model")
        x = x.pixels
    arr = np.asarray(x, dtype=np.float64)
    if model.modality == "camera":
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"camera input must be (H, W, 3), got {arr.shape}")
    else:
        if arr.ndim != 2:
            raise ValueError(f"BEV input must be (H, W), got {arr.shape}")
        arr = arr[:, :, None]
    if arr.shape[0] < model.window or arr.shape[1] < model.window:
        raise ValueError(f"input {arr.shape[:2]} smaller than window {model.window}")
    return arr


def score_map(model: DetectorModel, x) -> np.ndarray:
    """Pre-sigmoid logits, shape (anchor_rows, anchor_cols, classes)."""
    arr = _as_input(model, x)
    win = np.lib.stride_tricks.sliding_window_view(arr, (model.window, model.window), axis=(0, 1))
    win = win[:: model.stride, :: model.stride]
    # windowed view axes: (rows, cols, channels, window, window)
    logits = np.einsum("abcuv,kuvc->abk", win, np.asarray(model.weights, dtype=np.float64))
    return logits + np.asarray(model.bias, dtype=np.float64)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _nms(candidates: list[Detection]) -> list[Detection]:
    """Greedy suppression: drop any box overlapping a kept same-class box
    at IoU above the threshold."""
    if not candidates:
        return []
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-candidates[i].confidence, candidates[i].cls, candidates[i].x0, candidates[i].y0),
    )
    boxes = np.array([(c.x0, c.y0, c.x1, c.y1) for c in candidates], dtype=np.float64)[order]
    areas = (boxes[:, 2] - boxes[:, 0]) * (boxes[:, 3] - boxes[:, 1])
    names = sorted({c.cls for c in candidates})
    cls_ids = np.array([names.index(candidates[i].cls) for i in order])
    alive = np.ones(len(order), dtype=bool)
    kept = []
    for i in range(len(order)):
        if not alive[i]:
            continue
        kept.append(candidates[order[i]])
        rest = alive.copy()
        rest[: i + 1] = False
        rest &= cls_ids == cls_ids[i]
        if not rest.any():
            continue
        iw = np.minimum(boxes[rest, 2], boxes[i, 2]) - np.maximum(boxes[rest, 0], boxes[i, 0])
        ih = np.minimum(boxes[rest, 3], boxes[i, 3]) - np.maximum(boxes[rest, 1], boxes[i, 1])
        inter = np.clip(iw, 0.0, None) * np.clip(ih, 0.0, None)
        iou = inter / (areas[rest] + areas[i] - inter)
        drop = np.nonzero(rest)[0][iou > NMS_IOU]
        alive[drop] = False
    return kept


def detect(model: DetectorModel, x) -> DetectionSet:
    """Threshold per-anchor confidences at 0.5 and greedily suppress overlaps.

    Detections come back sorted by descending confidence with boxes in the
    model's native units (pixels for camera, BEV meters for lidar grids).
    """
    arr = _as_input(model, x)
    logits = score_map(model, x)
    conf = _sigmoid(logits)
    rows = model.anchor_centers(arr.shape[0])
    cols = model.anchor_centers(arr.shape[1])
    candidates = []
    for r, c, k in zip(*np.nonzero(conf > CONFIDENCE_THRESHOLD)):
        cls = model.classes[k]
        x0, y0, x1, y1 = model.box_at(cls, rows[r], cols[c])
        candidates.append(Detection(cls, x0, y0, x1, y1, float(conf[r, c, k])))
    kept = _nms(candidates)
    kept.sort(key=lambda d: (-d.confidence, d.cls, d.x0, d.y0))
    return DetectionSet(detections=tuple(kept), modality=model.modality)


def detector_boxes(frame: ImageFrame) -> tuple[tuple[str, float, float, float, float], ...]:
    """Frame ground truth in detector axis order.

    Detector boxes run (row, col) while image boxes store (col, row);
    every camera consumer should convert through here.
    """
    return tuple((b.cls, b.y0, b.x0, b.y1, b.x1) for b in frame.gt_boxes)


def label_grid(model: DetectorModel, input_shape: tuple[int, int], boxes: Sequence) -> np.ndarray:
    """Anchor-grid labels: 1 at the anchor nearest each box center.

    boxes are (cls, x0, y0, x1, y1) tuples in native units. A box whose
    center falls farther than half a stride from every anchor center (it
    lies outside anchor coverage) labels nothing.
    """
    rows = model.anchor_centers(input_shape[0])
    cols = model.anchor_centers(input_shape[1])
    unit = model.bev.cell if model.modality == "bev" else 1.0
    half = model.stride * unit / 2.0 + 1e-9
    y = np.zeros((len(rows), len(cols), len(model.classes)), dtype=np.float64)
    for cls, x0, y0, x1, y1 in boxes:
        k = model.class_index(cls)
        cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        i = int(np.argmin(np.abs(rows - cx)))
        j = int(np.argmin(np.abs(cols - cy)))
        if abs(rows[i] - cx) <= half and abs(cols[j] - cy) <= half:
            y[i, j, k] = 1.0
    return y


def loss_and_input_gradient(model: DetectorModel, x, targets) -> tuple[float, np.ndarray]:
    """Summed logistic loss over all anchors and its exact input gradient.

    targets is either a label grid of shape (anchor_rows, anchor_cols,
    classes) or a sequence of (cls, x0, y0, x1, y1) boxes to rasterize
    into one. The gradient has the shape of the raw input array.
    """
    arr = _as_input(model, x)
    logits = score_map(model, x)
    if isinstance(targets, np.ndarray):
        y = np.asarray(targets, dtype=np.float64)
        if y.shape != logits.shape:
            raise ValueError(f"targets shape {y.shape}, expected {logits.shape}")
    else:
        y = label_grid(model, arr.shape[:2], targets)

    # softplus(z) - y*z, evaluated stably
    loss = float(np.sum(np.logaddexp(0.0, logits) - y * logits))
    dz = _sigmoid(logits) - y

    w = np.asarray(model.weights, dtype=np.float64)
    contrib = np.einsum("abk,kuvc->abuvc", dz, w)
    grad = np.zeros_like(arr)
    r0 = model.anchor_starts(arr.shape[0])[:, None]
    c0 = model.anchor_starts(arr.shape[1])[None, :]
    # anchor starts are distinct per offset, so plain fancy-index adds are safe
    for u in range(model.window):
        for v in range(model.window):
            grad[r0 + u, c0 + v, :] += contrib[:, :, u, v, :]
    if model.modality == "bev":
        grad = grad[:, :, 0]
    return loss, grad


def save_model(model: DetectorModel, path: str | Path) -> None:
    meta = {
        "kind": "detector",
        "modality": model.modality,
        "window": model.window,
        "stride": model.stride,
        "classes": list(model.classes),
        "sizes": [list(s) for s in model.sizes],
        "bev": None if model.bev is None else {"extent": model.bev.extent, "cell": model.bev.cell},
        "trained_on": model.trained_on,
    }
    write_blob(path, MODEL_MAGIC, meta, {"weights": model.weights, "bias": model.bias})


def load_model(path: str | Path) -> DetectorModel:
    meta, arrays = read_blob(path, MODEL_MAGIC)
    bev = meta["bev"]
    return DetectorModel(
        modality=meta["modality"],
        window=int(meta["window"]),
        stride=int(meta["stride"]),
        classes=tuple(meta["classes"]),
        sizes=tuple((float(a), float(b)) for a, b in meta["sizes"]),
        weights=arrays["weights"],
        bias=arrays["bias"],
        bev=None if bev is None else BevConfig(extent=float(bev["extent"]), cell=float(bev["cell"])),
        trained_on=meta["trained_on"],
    )
