"""Trainable toy perception: window detectors, BEV raster, lane estimator."""

from .bev import DEFAULT_BEV, GROUND_CLEARANCE, SATURATION_COUNT, BevConfig, cell_center, rasterize_bev, remove_ground
from .lanes import LANE_TEMPLATE, MIN_RESPONSE, estimate_lanes, lane_rows
from .model import (
    BEV_SIZES,
    BEV_STRIDE,
    BEV_WINDOW,
    CAMERA_SIZES,
    CAMERA_STRIDE,
    CAMERA_WINDOW,
    CLASSES,
    CONFIDENCE_THRESHOLD,
    NMS_IOU,
    Detection,
    DetectionSet,
    DetectorModel,
    detect,
    detector_boxes,
    label_grid,
    load_model,
    loss_and_input_gradient,
    save_model,
    score_map,
)
from .train import (
    MIX_ITEMS,
    TrainConfig,
    TrainExample,
    TrainSet,
    TrainingError,
    evaluate_detector,
    split_examples,
    train_detector,
    training_mix,
)

__all__ = [
    "BEV_SIZES",
    "BEV_STRIDE",
    "BEV_WINDOW",
    "BevConfig",
    "CAMERA_SIZES",
    "CAMERA_STRIDE",
    "CAMERA_WINDOW",
    "CLASSES",
    "CONFIDENCE_THRESHOLD",
    "DEFAULT_BEV",
    "Detection",
    "DetectionSet",
    "DetectorModel",
    "GROUND_CLEARANCE",
    "LANE_TEMPLATE",
    "MIN_RESPONSE",
    "MIX_ITEMS",
    "NMS_IOU",
    "SATURATION_COUNT",
    "TrainConfig",
    "TrainExample",
    "TrainSet",
    "TrainingError",
    "cell_center",
    "detect",
    "detector_boxes",
    "estimate_lanes",
    "evaluate_detector",
    "label_grid",
    "lane_rows",
    "load_model",
    "loss_and_input_gradient",
    "rasterize_bev",
    "remove_ground",
    "save_model",
    "score_map",
    "split_examples",
    "train_detector",
    "training_mix",
]
