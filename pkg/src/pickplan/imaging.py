"""Image containers, PNG I/O, camera intrinsics, and pixel<->3D geometry.

Depth is stored internally in meters as float64; 0.0 marks a missing
measurement (RealSense convention). On disk depth is a 16-bit grayscale
PNG in millimeters, color an 8-bit RGB PNG.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    BehindCameraError,
    EmptyDepthError,
    InvalidDepthError,
    IoError,
    RegistrationError,
)

DEPTH_SCALE_MM = 1000.0  # stored millimeters per meter


@dataclass(frozen=True)
class DepthImage:
    """Per-pixel depth in meters, row-major; 0.0 = invalid/missing."""

    width: int
    height: int
    data: np.ndarray  # (height, width) float64, read-only

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"depth shape {arr.shape} != ({self.height}, {self.width})")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("depth values must be finite and >= 0")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "DepthImage":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)

    @property
    def valid_mask(self) -> np.ndarray:
        return self.data > 0


@dataclass(frozen=True)
class ColorImage:
    """8-bit RGB image, row-major, channels last."""

    width: int
    height: int
    data: np.ndarray  # (height, width, 3) uint8, read-only

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.uint8)
        if arr.shape != (self.height, self.width, 3):
            raise ValueError(f"color shape {arr.shape} != ({self.height}, {self.width}, 3)")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ColorImage":
        arr = np.asarray(arr, dtype=np.uint8)
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole model: focal lengths and principal point in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    @classmethod
    def from_json(cls, path: str | Path) -> "CameraIntrinsics":
        try:
            with open(path) as f:
                d = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise IoError(f"cannot read intrinsics from {path}: {e}") from e
        return cls(fx=d["fx"], fy=d["fy"], cx=d["cx"], cy=d["cy"],
                   width=d["width"], height=d["height"])

    def to_json(self, path: str | Path) -> None:
        d = {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
             "width": self.width, "height": self.height}
        with open(path, "w") as f:
            json.dump(d, f, indent=2, sort_keys=True)
            f.write("\n")


@dataclass(frozen=True)
class Point3:
    """Point in the camera frame, meters; z increases away from the camera."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


def load_color(path: str | Path) -> ColorImage:
    raw = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if raw is None:
        raise IoError(f"cannot decode color image {path}")
    return ColorImage.from_array(cv2.cvtColor(raw, cv2.COLOR_BGR2RGB))


def load_depth(path: str | Path) -> DepthImage:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IoError(f"cannot decode depth image {path}")
    if raw.ndim != 2 or raw.dtype != np.uint16:
        raise IoError(f"depth image {path} must be 16-bit single-channel, got "
                      f"{raw.dtype} with shape {raw.shape}")
    return DepthImage.from_array(raw.astype(np.float64) / DEPTH_SCALE_MM)


def load_rgbd(color_path: str | Path, depth_path: str | Path) -> tuple[ColorImage, DepthImage]:
    """Load a registered color/depth pair; depth converted mm -> m."""
    color = load_color(color_path)
    depth = load_depth(depth_path)
    if (color.width, color.height) != (depth.width, depth.height):
        raise RegistrationError(
            f"color {color.width}x{color.height} does not match depth "
            f"{depth.width}x{depth.height}")
    return color, depth


def save_color(image: ColorImage, path: str | Path) -> None:
    ok = cv2.imwrite(str(path), cv2.cvtColor(image.data, cv2.COLOR_RGB2BGR))
    if not ok:
        raise IoError(f"cannot write color image {path}")


def save_depth(image: DepthImage, path: str | Path) -> None:
    """Write 16-bit millimeter PNG; values round to nearest mm."""
    mm = np.rint(image.data * DEPTH_SCALE_MM)
    if np.any(mm > np.iinfo(np.uint16).max):
        raise IoError("depth exceeds the 16-bit millimeter range")
    ok = cv2.imwrite(str(path), mm.astype(np.uint16))
    if not ok:
        raise IoError(f"cannot write depth image {path}")


def inpaint_invalid(depth: DepthImage) -> DepthImage:
    """Fill invalid pixels with the nearest valid value.

    Nearest is Euclidean pixel distance; ties resolve to the smaller row,
    then the smaller column. Valid pixels are left untouched. Raises
    EmptyDepthError when nothing is valid.
    """
    valid = depth.valid_mask
    if valid.all():
        return depth
    if not valid.any():
        raise EmptyDepthError("depth image has no valid pixels")

    # argwhere scans row-major, so index order == lexicographic (row, col)
    # order; the smallest index among tied neighbors is the tie-break winner.
    valid_coords = np.argwhere(valid)
    invalid_coords = np.argwhere(~valid)
    tree = cKDTree(valid_coords)

    n_valid = len(valid_coords)
    k = min(8, n_valid)
    pending = np.arange(len(invalid_coords))
    chosen = np.empty(len(invalid_coords), dtype=np.int64)
    while True:
        dist, idx = tree.query(invalid_coords[pending], k=k)
        if k == 1:
            dist = dist[:, None]
            idx = idx[:, None]
        # integer squared distances avoid float-tie ambiguity
        diff = valid_coords[idx] - invalid_coords[pending][:, None, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        best = sq.min(axis=1)
        # all k candidates tied means ties may extend beyond k: enlarge
        unresolved = (sq.max(axis=1) == best) & (k < n_valid)
        tied = np.where(sq == best[:, None], idx, np.iinfo(np.int64).max)
        chosen[pending] = tied.min(axis=1)
        if not unresolved.any():
            break
        pending = pending[unresolved]
        k = min(2 * k, n_valid)

    filled = depth.data.copy()
    src = valid_coords[chosen]
    filled[invalid_coords[:, 0], invalid_coords[:, 1]] = depth.data[src[:, 0], src[:, 1]]
    return DepthImage.from_array(filled)


def deproject(u: float, v: float, depth: float, k: CameraIntrinsics) -> Point3:
    """Pixel + depth -> camera-frame point via the pinhole model."""
    if depth <= 0:
        raise InvalidDepthError(f"depth must be positive, got {depth}")
    return Point3(x=(u - k.cx) * depth / k.fx,
                  y=(v - k.cy) * depth / k.fy,
                  z=float(depth))


def project(p: Point3, k: CameraIntrinsics) -> tuple[float, float]:
    """Camera-frame point -> real-valued pixel; caller rounds."""
    if p.z <= 0:
        raise BehindCameraError(f"point z must be positive, got {p.z}")
    return (k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy)


def deproject_pixels(rows: np.ndarray, cols: np.ndarray, depths: np.ndarray,
                     k: CameraIntrinsics) -> np.ndarray:
    """Vectorized deprojection; returns (N, 3) points for positive depths."""
    x = (cols - k.cx) * depths / k.fx
    y = (rows - k.cy) * depths / k.fy
    return np.stack([x, y, depths], axis=-1)


DEFAULT_INTRINSICS = CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0,
                                      width=640, height=480)


def rle_encode(mask: np.ndarray) -> dict:
    """Boolean mask -> row-major run-length dict.

    counts alternate runs of False then True, starting with the False
    run (possibly zero length), so the encoding is unique per mask.
    """
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise ValueError("mask must be a 2D boolean array")
    flat = mask.ravel()
    if flat.size == 0:
        return {"size": [int(mask.shape[0]), int(mask.shape[1])], "counts": []}
    changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], changes, [flat.size]])
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts = [0] + counts
    return {"size": [int(mask.shape[0]), int(mask.shape[1])],
            "counts": [int(c) for c in counts]}


def rle_decode(rle: dict) -> np.ndarray:
    """Inverse of rle_encode."""
    h, w = rle["size"]
    flat = np.zeros(h * w, dtype=np.bool_)
    pos = 0
    value = False
    for count in rle["counts"]:
        if value:
            flat[pos:pos + count] = True
        pos += count
        value = not value
    if pos != h * w:
        raise ValueError("run lengths do not cover the mask")
    return flat.reshape(h, w)
