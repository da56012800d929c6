"""Binary containers for frames, clouds and detector models.

One shared layout serves all three: a 6-byte magic, a big-endian uint32
header length, a canonical JSON header, then the raw array bodies in
the order the header lists them. The header records array names, dtypes
and shapes plus a SHA-256 digest of the body, so a reader can both
locate every array and refuse a truncated or edited file. Writing the
same object twice produces byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .camera import CameraConfig, ImageBox, ImageFrame
from .lidar import CloudBox, LidarConfig, PointCloud

FRAME_MAGIC = b"PGIF01"
CLOUD_MAGIC = b"PGPC01"
MODEL_MAGIC = b"PGDM01"


class ContainerError(ValueError):
    """A sensor container file is malformed or damaged."""


def write_blob(path: str | Path, magic: bytes, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    """Write a container file; meta must be JSON-serializable."""
    body = b"".join(np.ascontiguousarray(a).tobytes() for a in arrays.values())
    header = dict(meta)
    header["arrays"] = [[name, a.dtype.str, list(a.shape)] for name, a in arrays.items()]
    header["digest"] = hashlib.sha256(body).hexdigest()
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack(">I", len(blob)))
        fh.write(blob)
        fh.write(body)


def read_blob(path: str | Path, magic: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    """Read a container file back into (meta, arrays)."""
    raw = Path(path).read_bytes()
    if raw[:6] != magic:
        raise ContainerError(f"{path}: bad magic {raw[:6]!r}, expected {magic!r}")
    (hlen,) = struct.unpack(">I", raw[6:10])
    header = json.loads(raw[10 : 10 + hlen].decode("utf-8"))
    body = raw[10 + hlen :]
    if hashlib.sha256(body).hexdigest() != header["digest"]:
        raise ContainerError(f"{path}: body digest mismatch")
    arrays = {}
    offset = 0
    for name, dtype, shape in header["arrays"]:
        n = int(np.prod(shape)) * np.dtype(dtype).itemsize
        arrays[name] = np.frombuffer(body[offset : offset + n], dtype=dtype).reshape(shape)
        offset += n
    if offset != len(body):
        raise ContainerError(f"{path}: {len(body) - offset} trailing bytes")
    return header, arrays


def save_frame(frame: ImageFrame, path: str | Path) -> None:
    meta = {
        "kind": "image_frame",
        "camera": asdict(frame.config),
        "gt_boxes": [[b.cls, b.x0, b.y0, b.x1, b.y1, b.actor_id] for b in frame.gt_boxes],
        "gt_lanes": list(frame.gt_lanes),
    }
    write_blob(path, FRAME_MAGIC, meta, {"pixels": frame.pixels, "depth": frame.depth})


def load_frame(path: str | Path) -> ImageFrame:
    meta, arrays = read_blob(path, FRAME_MAGIC)
    boxes = tuple(
        ImageBox(cls=c, x0=x0, y0=y0, x1=x1, y1=y1, actor_id=aid)
        for c, x0, y0, x1, y1, aid in meta["gt_boxes"]
    )
    return ImageFrame(
        pixels=arrays["pixels"].copy(),
        depth=arrays["depth"].copy(),
        gt_boxes=boxes,
        gt_lanes=tuple(meta["gt_lanes"]),
        config=CameraConfig(**meta["camera"]),
    )


def save_cloud(cloud: PointCloud, path: str | Path) -> None:
    cfg = asdict(cloud.config)
    cfg["elevations"] = list(cfg["elevations"])
    meta = {
        "kind": "point_cloud",
        "lidar": cfg,
        "origin": list(cloud.origin),
        "gt_boxes": [
            [b.cls, b.x, b.y, b.z, b.length, b.width, b.height, b.heading, b.actor_id, b.n_points]
            for b in cloud.gt_boxes
        ],
    }
    write_blob(path, CLOUD_MAGIC, meta, {"points": cloud.points})


def load_cloud(path: str | Path) -> PointCloud:
    meta, arrays = read_blob(path, CLOUD_MAGIC)
    boxes = tuple(
        CloudBox(
            cls=c, x=x, y=y, z=z, length=ln, width=w, height=h,
            heading=hd, actor_id=aid, n_points=n,
        )
        for c, x, y, z, ln, w, h, hd, aid, n in meta["gt_boxes"]
    )
    cfg = dict(meta["lidar"])
    cfg["elevations"] = tuple(cfg["elevations"])
    return PointCloud(
        points=arrays["points"].copy(),
        gt_boxes=boxes,
        origin=tuple(meta["origin"]),
        config=LidarConfig(**cfg),
    )
