"""Detector training on frames sampled from the scenario catalog.

Training data comes from clean (uncorrupted) episodes of a fixed mix of
vehicle scenarios driven by the rule agent. Each sampled tick yields one
example: a camera image or a BEV occupancy grid plus its ground-truth
boxes. Training itself is plain full-batch gradient descent on logistic
loss over a per-example subset of anchors (every positive, its near
neighbors, and a seeded sample of far negatives).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..agents import RuleAgent
from ..metrics import average_precision
from ..rng import generator
from ..scenario import load_catalog
from ..sensors.camera import render_camera
from ..sensors.lidar import scan_lidar
from ..sim import instantiate, run_episode
from ..scenario.variants import expand_variants
from .bev import DEFAULT_BEV, rasterize_bev, remove_ground
from .model import (
    BEV_SIZES,
    BEV_STRIDE,
    BEV_WINDOW,
    CAMERA_SIZES,
    CAMERA_STRIDE,
    CAMERA_WINDOW,
    CLASSES,
    DetectorModel,
    detect,
    detector_boxes,
    label_grid,
)

# Scenario mix the stock detectors ship trained on: straight-road vehicle
# encounters whose actors stay inside anchor coverage.
MIX_ITEMS = (
    "StationaryTargetVehicleStraightRoad",
    "LowSpeedTargetVehicleStraightRoad",
    "DeceleratingTargetVehicleStraightRoad",
    "StableCarFollowing",
    "StopAndGoFunction",
    "HighSpeedCutInStraightRoad",
    "TargetVehicleCutOutStraightRoad",
    "PostCutOutLeadVehicleStraightRoad",
    "VehicleEntryDetectionAndResponse",
    "Overtaking",
    "StraightRoadCutInAndStop",
    "StraightRoadMixedSlowVehicles",
)


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TrainExample:
    """One input with its ground-truth (cls, x0, y0, x1, y1) boxes."""

    input: np.ndarray
    boxes: tuple[tuple[str, float, float, float, float], ...]
    poisoned: bool = False


@dataclass(frozen=True, eq=False)
class TrainSet:
    modality: str
    examples: tuple[TrainExample, ...]

    def __post_init__(self):
        if self.modality not in ("camera", "bev"):
            raise ValueError(f"unknown modality {self.modality!r}")
        if not self.examples:
            raise ValueError("training set is empty")
        want = 3 if self.modality == "camera" else 2
        shape = self.examples[0].input.shape
        for ex in self.examples:
            if ex.input.ndim != want or ex.input.shape != shape:
                raise ValueError("inconsistent example dimensions")

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.modality.encode())
        for ex in self.examples:
            h.update(np.ascontiguousarray(ex.input, dtype=np.float32).tobytes())
            h.update(repr(sorted(ex.boxes)).encode())
            h.update(b"p" if ex.poisoned else b"c")
        return h.hexdigest()


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    # None picks the modality default: BEV windows are sparse and small,
    # camera windows dense and 4x larger, so usable step sizes differ a lot
    learning_rate: float | None = None
    seed: int = 0
    negatives_per_example: int = 256
    # after each round the highest-scoring untrained anchors join the
    # negative pool; rounds > 1 is what keeps far-field speckle quiet
    hard_rounds: int = 3
    hard_negatives_per_example: int = 64
    window: int | None = None
    stride: int | None = None

    def rate_for(self, modality: str) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return 2.0 if modality == "bev" else 0.01


def _blank_model(modality: str, config: TrainConfig) -> DetectorModel:
    if modality == "bev":
        window = config.window or BEV_WINDOW
        stride = config.stride or BEV_STRIDE
        sizes = tuple(BEV_SIZES[c] for c in CLASSES)
    else:
        window = config.window or CAMERA_WINDOW
        stride = config.stride or CAMERA_STRIDE
        sizes = tuple(CAMERA_SIZES[c] for c in CLASSES)
    channels = 3 if modality == "camera" else 1
    return DetectorModel(
        modality=modality,
        window=window,
        stride=stride,
        classes=CLASSES,
        sizes=sizes,
        weights=np.zeros((len(CLASSES), window, window, channels)),
        bias=np.zeros(len(CLASSES)),
        bev=DEFAULT_BEV if modality == "bev" else None,
    )


class _AnchorPool:
    """Windows and labels of the anchors one example is trained on."""

    def __init__(self, model: DetectorModel, ex: TrainExample):
        arr = ex.input if ex.input.ndim == 3 else ex.input[:, :, None]
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        win = np.lib.stride_tricks.sliding_window_view(
            arr, (model.window, model.window), axis=(0, 1)
        )
        # flat feature order must be (window, window, channels) to match
        # the weight layout score_map contracts against
        self.windows = win[:: model.stride, :: model.stride].transpose(0, 1, 3, 4, 2)
        self.labels = label_grid(model, arr.shape[:2], ex.boxes)
        self.a0, self.a1, _ = self.labels.shape
        self.chosen = np.zeros((self.a0, self.a1), dtype=bool)

    def seed_selection(self, gen, negatives: int) -> None:
        pos = np.nonzero(self.labels.any(axis=2))
        self.chosen[pos] = True
        # ring neighbors teach the ranking that NMS and AP matching rely on
        for di in (-2, -1, 0, 1, 2):
            for dj in (-2, -1, 0, 1, 2):
                r = np.clip(pos[0] + di, 0, self.a0 - 1)
                c = np.clip(pos[1] + dj, 0, self.a1 - 1)
                self.chosen[r, c] = True
        candidates = np.nonzero(~self.chosen.ravel())[0]
        if len(candidates) and negatives > 0:
            take = gen.choice(candidates, size=min(negatives, len(candidates)), replace=False)
            self.chosen.ravel()[take] = True

    def mine(self, w: np.ndarray, b: np.ndarray, count: int) -> int:
        """Add the worst not-yet-trained anchors to the pool."""
        flat = self.windows.reshape(self.a0 * self.a1, -1)
        logits = flat @ w.T + b
        offending = np.where(self.labels.reshape(-1, len(b)) > 0, -np.inf, logits).max(axis=1)
        offending[self.chosen.ravel()] = -np.inf
        order = np.argsort(-offending, kind="stable")[:count]
        fresh = order[np.isfinite(offending[order]) & (offending[order] > -4.0)]
        self.chosen.ravel()[fresh] = True
        return len(fresh)

    def rows(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.nonzero(self.chosen)
        x = self.windows[idx].reshape(len(idx[0]), -1)
        return x, self.labels[idx]


def _fit(x, y, w, b, rate: float, epochs: int, round_idx: int) -> None:
    n = len(x)
    n_pos = float(y.sum())
    # rebalance so sparse positives are not drowned out by background anchors
    pos_weight = max(1.0, (y.size - n_pos) / n_pos) if n_pos else 1.0
    sample_w = 1.0 + (pos_weight - 1.0) * y
    for epoch in range(epochs):
        z = x @ w.T + b
        p = 0.5 * (1.0 + np.tanh(0.5 * z))
        loss = float(np.sum(sample_w * (np.logaddexp(0.0, z) - y * z)) / n)
        if not np.isfinite(loss):
            raise TrainingError(
                f"training diverged (non-finite loss) at epoch {round_idx * epochs + epoch}"
            )
        dz = sample_w * (p - y) / n
        w -= rate * (dz.T @ x)
        b -= rate * dz.sum(axis=0)


def train_detector(data: TrainSet, config: TrainConfig = TrainConfig()) -> DetectorModel:
    """Fit per-anchor logistic objectness by full-batch gradient descent.

    Runs hard_rounds rounds of descent; between rounds, each example's
    highest-scoring untrained anchors join the negative pool, silencing
    background patterns the initial random sample never showed. Fully
    deterministic for a fixed (data, config). Raises TrainingError naming
    the epoch if the loss ever goes non-finite.
    """
    model = _blank_model(data.modality, config)
    gen = generator(config.seed, "train", data.modality)

    pools = []
    for ex in data.examples:
        pool = _AnchorPool(model, ex)
        pool.seed_selection(gen, config.negatives_per_example)
        pools.append(pool)

    dims = model.window * model.window * model.channels
    w = np.zeros((len(model.classes), dims))
    b = np.zeros(len(model.classes))
    rate = config.rate_for(data.modality)
    rounds = max(1, config.hard_rounds)
    for round_idx in range(rounds):
        parts = [pool.rows() for pool in pools]
        x = np.concatenate([p[0] for p in parts], axis=0)
        y = np.concatenate([p[1] for p in parts], axis=0)
        _fit(x, y, w, b, rate, config.epochs, round_idx)
        if round_idx < rounds - 1:
            added = sum(pool.mine(w, b, config.hard_negatives_per_example) for pool in pools)
            if added == 0:
                break

    weights = w.reshape(len(model.classes), model.window, model.window, model.channels)
    return DetectorModel(
        modality=model.modality,
        window=model.window,
        stride=model.stride,
        classes=model.classes,
        sizes=model.sizes,
        weights=weights,
        bias=b,
        bev=model.bev,
        trained_on=data.digest(),
    )


# ------------------------------------------------------------- dataset mix


def _coverage(model: DetectorModel, dim: int) -> tuple[float, float]:
    centers = model.anchor_centers(dim)
    unit = model.bev.cell if model.modality == "bev" else 1.0
    half = model.stride * unit / 2.0
    return float(centers[0] - half), float(centers[-1] + half)


def _frame_indices(total: int, count: int) -> list[int]:
    if total <= count:
        return list(range(total))
    return sorted({int(round(i)) for i in np.linspace(0, total - 1, count)})


def training_mix(
    modality: str,
    seed: int = 0,
    variants: int = 2,
    frames_per_episode: int = 6,
    items: tuple[str, ...] = MIX_ITEMS,
) -> TrainSet:
    """Render the shipped clean training mix for one modality."""
    catalog = load_catalog()
    probe = _blank_model(modality, TrainConfig())
    examples = []
    for item_id in items:
        doc = catalog.item(item_id)
        for instance in expand_variants(doc, variants, seed):
            setup = instantiate(doc, instance)
            log = run_episode(setup, RuleAgent(), keep_states=True)
            for idx in _frame_indices(len(log.states), frames_per_episode):
                state = log.states[idx]
                if modality == "bev":
                    cloud = scan_lidar(state)
                    grid = rasterize_bev(remove_ground(cloud), probe.bev)
                    lo0, hi0 = _coverage(probe, grid.shape[0])
                    lo1, hi1 = _coverage(probe, grid.shape[1])
                    boxes = tuple(
                        (
                            g.cls,
                            g.x - g.length / 2.0,
                            g.y - g.width / 2.0,
                            g.x + g.length / 2.0,
                            g.y + g.width / 2.0,
                        )
                        for g in cloud.gt_boxes
                        if lo0 <= g.x <= hi0 and lo1 <= g.y <= hi1
                    )
                    examples.append(TrainExample(input=grid, boxes=boxes))
                else:
                    frame = render_camera(state, setup.map)
                    lo0, hi0 = _coverage(probe, frame.pixels.shape[0])
                    lo1, hi1 = _coverage(probe, frame.pixels.shape[1])
                    boxes = tuple(
                        b
                        for b in detector_boxes(frame)
                        if lo0 <= (b[1] + b[3]) / 2.0 <= hi0 and lo1 <= (b[2] + b[4]) / 2.0 <= hi1
                    )
                    examples.append(TrainExample(input=frame.pixels, boxes=boxes))
    return TrainSet(modality=modality, examples=tuple(examples))


def split_examples(data: TrainSet, fraction: float = 0.8, seed: int = 0) -> tuple[TrainSet, TrainSet]:
    """Seeded shuffle split into (train, held_out)."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    order = generator(seed, "split").permutation(len(data.examples))
    cut = max(1, min(len(order) - 1, int(round(fraction * len(order)))))
    train = tuple(data.examples[i] for i in order[:cut])
    held = tuple(data.examples[i] for i in order[cut:])
    return TrainSet(data.modality, train), TrainSet(data.modality, held)


def evaluate_detector(model: DetectorModel, data: TrainSet) -> tuple[float, dict[str, float]]:
    """Mean per-class AP(0.5) over the classes present in the ground truth."""
    sets = [detect(model, ex.input) for ex in data.examples]
    present = sorted({b[0] for ex in data.examples for b in ex.boxes})
    per_class = {}
    for cls in present:
        dets = [
            [((d.x0, d.y0, d.x1, d.y1), d.confidence) for d in s.for_class(cls)]
            for s in sets
        ]
        gts = [[b[1:] for b in ex.boxes if b[0] == cls] for ex in data.examples]
        per_class[cls] = average_precision(dets, gts)
    mean = sum(per_class.values()) / len(per_class) if per_class else 1.0
    return mean, per_class
