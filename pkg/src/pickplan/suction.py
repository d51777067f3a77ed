"""Suction point planning on detected envelopes.

Pixels are sampled around the detection's center, a local plane is
fitted to each neighborhood, and samples on bumpy or tilted surface
are discarded; the survivor with the flattest fit closest to the
center wins. The cup wants the middle of the envelope because that is
where the plate is stiffest and nothing dangles past the seal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .detection import BoundingBox
from .errors import NoSuctionError
from .imaging import CameraIntrinsics, DepthImage, Point3, deproject, deproject_pixels


@dataclass(frozen=True)
class SuctionConfig:
    """Sampling and acceptance knobs.

    sigma_px=None spreads samples over a sixth of the smaller bbox side
    so draws stay near the center at any detection scale; window_px
    approximates a 30 mm cup footprint at a meter with the default
    camera.
    """

    n_samples: int = 32
    sigma_px: Optional[float] = None
    window_px: int = 15
    max_rms: float = 0.002
    max_tilt: float = math.radians(15.0)
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.sigma_px is not None and self.sigma_px <= 0:
            raise ValueError("sigma_px must be > 0 when given")
        if self.window_px < 3 or self.window_px % 2 == 0:
            raise ValueError("window_px must be odd and >= 3")
        if self.max_rms < 0 or self.max_tilt < 0:
            raise ValueError("max_rms and max_tilt must be >= 0")


@dataclass(frozen=True)
class SuctionCandidate:
    pixel: tuple[int, int]
    point: Point3
    normal: tuple[float, float, float]
    planarity_rms: float
    tilt: float

    def __post_init__(self):
        norm = math.sqrt(sum(v * v for v in self.normal))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("normal must be unit length")
        if self.planarity_rms < 0:
            raise ValueError("planarity_rms must be >= 0")

    def to_dict(self) -> dict:
        return {
            "pixel": list(self.pixel),
            "point": [self.point.x, self.point.y, self.point.z],
            "normal": list(self.normal),
            "planarity_rms": self.planarity_rms,
            "tilt": self.tilt,
        }


def fit_plane(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares plane through (N, 3) points.

    Returns (unit normal, centroid, rms residual); the normal is the
    direction of least variance, signed toward the camera (negative z)
    so it doubles as the suction approach direction.
    """
    if points.shape[0] < 3:
        raise ValueError("plane fit needs at least 3 points")
    centroid = points.mean(axis=0)
    centered = points - centroid
    _, singular, vh = np.linalg.svd(centered, full_matrices=False)
    normal = vh[-1]
    if normal[2] > 0:
        normal = -normal
    rms = float(singular[-1] / math.sqrt(points.shape[0]))
    return normal, centroid, rms


def _window_points(depth: DepthImage, k: CameraIntrinsics,
                   row: int, col: int, window_px: int) -> Optional[np.ndarray]:
    half = window_px // 2
    if row - half < 0 or row + half >= depth.height \
            or col - half < 0 or col + half >= depth.width:
        return None
    rr, cc = np.mgrid[row - half:row + half + 1, col - half:col + half + 1]
    rr = rr.ravel()
    cc = cc.ravel()
    depths = depth.data[rr, cc]
    valid = depths > 0
    if np.count_nonzero(valid) < max(3, valid.size // 2):
        return None
    return deproject_pixels(rr[valid].astype(np.float64),
                            cc[valid].astype(np.float64), depths[valid], k)


def suction_candidates(depth: DepthImage, k: CameraIntrinsics, bbox: BoundingBox,
                       cfg: Optional[SuctionConfig] = None,
                       mask: Optional[np.ndarray] = None) -> list[SuctionCandidate]:
    """All accepted samples, best first.

    Ordering key is (planarity_rms, distance to bbox center, row, col),
    so the choice is permutation-invariant over the sample draw. An
    optional detection mask confines samples to the component's own
    pixels, keeping them off overlapping neighbors inside the box.
    """
    cfg = cfg or SuctionConfig()
    center_row, center_col = bbox.center
    sigma = cfg.sigma_px if cfg.sigma_px is not None else min(bbox.height, bbox.width) / 6.0
    rng = np.random.default_rng(cfg.rng_seed)
    draws = rng.normal(loc=(center_row, center_col), scale=sigma, size=(cfg.n_samples, 2))
    pixels = np.rint(draws).astype(np.int64)

    seen = set()
    accepted = []
    for row, col in pixels:
        row, col = int(row), int(col)
        if (row, col) in seen:
            continue
        seen.add((row, col))
        if not bbox.contains(row, col):
            continue
        if mask is not None and not mask[row, col]:
            continue
        points = _window_points(depth, k, row, col, cfg.window_px)
        if points is None:
            continue
        normal, _, rms = fit_plane(points)
        tilt = math.acos(min(1.0, max(-1.0, -normal[2])))
        if rms > cfg.max_rms or tilt > cfg.max_tilt:
            continue
        accepted.append(SuctionCandidate(
            pixel=(row, col),
            point=deproject(float(col), float(row), float(depth.data[row, col]), k),
            normal=tuple(float(v) for v in normal),
            planarity_rms=rms,
            tilt=tilt,
        ))
    accepted.sort(key=lambda c: (c.planarity_rms,
                                 math.hypot(c.pixel[0] - center_row, c.pixel[1] - center_col),
                                 c.pixel[0], c.pixel[1]))
    return accepted


def sample_suction(depth: DepthImage, k: CameraIntrinsics, bbox: BoundingBox,
                   cfg: Optional[SuctionConfig] = None,
                   mask: Optional[np.ndarray] = None) -> SuctionCandidate:
    """Best surviving suction point; NoSuctionError when every sample fails."""
    candidates = suction_candidates(depth, k, bbox, cfg, mask)
    if not candidates:
        raise NoSuctionError("no suction sample passed the planarity and tilt gates")
    return candidates[0]
