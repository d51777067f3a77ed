"""Antipodal grasp candidate generation directly from depth images.

Candidates are pairs of depth-edge pixels whose gradient directions
oppose each other within the friction cone, closing jaws across a
raised surface. All pixel coordinates are (row, col).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .imaging import CameraIntrinsics, DepthImage, deproject_pixels

MIN_JAW_SEPARATION_PX = 2.0  # below this the center pixel collapses onto a jaw
ATTEMPTS_PER_CANDIDATE = 100


@dataclass(frozen=True)
class SamplerConfig:
    gradient_threshold: float = 0.0025  # meters per pixel
    friction_coefficient: float = 0.5
    max_gripper_width: float = 0.14  # meters, Robotiq-140-class opening
    max_candidates: int = 500
    rng_seed: int = 0

    def __post_init__(self):
        if self.friction_coefficient <= 0:
            raise ValueError("friction_coefficient must be positive")
        if self.max_candidates <= 0:
            raise ValueError("max_candidates must be positive")


@dataclass(frozen=True)
class GraspCandidate:
    """Two-jaw antipodal grasp in image space.

    jaw1 is the lexicographically smaller (row, col) pixel so candidate
    identity is canonical; axis_angle is measured from the +column axis
    toward +row and normalized to [0, pi).
    """

    center: tuple[int, int]
    axis_angle: float
    jaw1: tuple[int, int]
    jaw2: tuple[int, int]
    d0: float
    jaw_separation_px: float
    jaw_separation_m: float
    grad1: Optional[tuple[float, float]] = None  # unit depth gradient at jaw1
    grad2: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        mid_r = (self.jaw1[0] + self.jaw2[0]) / 2.0
        mid_c = (self.jaw1[1] + self.jaw2[1]) / 2.0
        if abs(self.center[0] - mid_r) > 0.5 + 1e-9 or abs(self.center[1] - mid_c) > 0.5 + 1e-9:
            raise ValueError("center must be the jaw midpoint within 0.5 px")
        if not 0 <= self.axis_angle < math.pi:
            raise ValueError("axis_angle must lie in [0, pi)")

    @property
    def axis_vector(self) -> tuple[float, float]:
        """Unit jaw1->jaw2 direction as (row, col)."""
        return (math.sin(self.axis_angle), math.cos(self.axis_angle))

    def to_dict(self) -> dict:
        return {
            "center": list(self.center),
            "axis_angle": self.axis_angle,
            "jaw1": list(self.jaw1),
            "jaw2": list(self.jaw2),
            "d0": self.d0,
            "jaw_separation_px": self.jaw_separation_px,
            "jaw_separation_m": self.jaw_separation_m,
            "grad1": list(self.grad1) if self.grad1 is not None else None,
            "grad2": list(self.grad2) if self.grad2 is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GraspCandidate":
        return cls(
            center=tuple(d["center"]),
            axis_angle=d["axis_angle"],
            jaw1=tuple(d["jaw1"]),
            jaw2=tuple(d["jaw2"]),
            d0=d["d0"],
            jaw_separation_px=d["jaw_separation_px"],
            jaw_separation_m=d["jaw_separation_m"],
            grad1=tuple(d["grad1"]) if d.get("grad1") else None,
            grad2=tuple(d["grad2"]) if d.get("grad2") else None,
        )


@dataclass(frozen=True)
class EdgeMap:
    """Depth-edge pixels with their unit gradient directions.

    pixels: (N, 2) int rows/cols in lexicographic order.
    directions: (N, 2) float unit gradients (d_row, d_col).
    """

    pixels: np.ndarray
    directions: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.pixels)


def depth_edges(depth: DepthImage, cfg: SamplerConfig) -> EdgeMap:
    """Pixels whose central-difference gradient magnitude exceeds the threshold.

    Central differences in the interior, one-sided at the image border.
    """
    g_row, g_col = np.gradient(depth.data)
    mag = np.hypot(g_row, g_col)
    mask = mag > cfg.gradient_threshold
    pixels = np.argwhere(mask)
    if len(pixels) == 0:
        return EdgeMap(pixels=pixels.reshape(0, 2), directions=np.zeros((0, 2)))
    m = mag[mask]
    directions = np.stack([g_row[mask] / m, g_col[mask] / m], axis=1)
    return EdgeMap(pixels=pixels, directions=directions)


def _axis_angle(d_row: float, d_col: float) -> float:
    ang = math.atan2(d_row, d_col)
    if ang < 0:
        ang += math.pi
    if ang >= math.pi:  # atan2(0, -1) == pi
        ang -= math.pi
    return ang


def sample_antipodal(depth: DepthImage, k: CameraIntrinsics,
                     cfg: SamplerConfig,
                     mask: Optional[np.ndarray] = None) -> list[GraspCandidate]:
    """Rejection-sample antipodal edge-pixel pairs into grasp candidates.

    A pair qualifies when both gradients lie within arctan(friction) of
    the jaw line, point into opposing half-spaces, and the deprojected
    jaw separation fits the gripper. Deterministic for a fixed rng_seed;
    at most max_candidates results after deduplication.

    An optional boolean mask restricts jaw pixels to a region of
    interest, so planning scoped to one detected package does not spend
    its attempt budget pairing edges from elsewhere in the image.
    """
    edges = depth_edges(depth, cfg)
    if mask is not None:
        if mask.shape != depth.data.shape:
            raise ValueError("mask shape must match the depth image")
        keep_px = mask[edges.pixels[:, 0], edges.pixels[:, 1]]
        edges = EdgeMap(pixels=edges.pixels[keep_px],
                        directions=edges.directions[keep_px])
    n = len(edges)
    if n < 2:
        return []

    rng = np.random.default_rng(cfg.rng_seed)
    attempts = ATTEMPTS_PER_CANDIDATE * cfg.max_candidates
    draws = rng.integers(0, n, size=(attempts, 2))
    # edge pixels are lexicographically ordered, so the smaller index is
    # the canonical jaw1
    a = draws.min(axis=1)
    b = draws.max(axis=1)
    keep = a != b

    coords = edges.pixels
    dirs = edges.directions
    p1 = coords[a].astype(np.float64)
    p2 = coords[b].astype(np.float64)
    v = p2 - p1
    sep_px = np.hypot(v[:, 0], v[:, 1])
    keep &= sep_px >= MIN_JAW_SEPARATION_PX

    with np.errstate(invalid="ignore", divide="ignore"):
        u = v / sep_px[:, None]
    cos_cone = 1.0 / math.sqrt(1.0 + cfg.friction_coefficient ** 2)
    dot1 = np.einsum("ij,ij->i", dirs[a], u)
    dot2 = np.einsum("ij,ij->i", dirs[b], u)
    keep &= (np.abs(dot1) >= cos_cone) & (np.abs(dot2) >= cos_cone)
    keep &= dot1 * dot2 < 0

    z1 = depth.data[coords[a][:, 0], coords[a][:, 1]]
    z2 = depth.data[coords[b][:, 0], coords[b][:, 1]]
    keep &= (z1 > 0) & (z2 > 0)
    pts1 = deproject_pixels(p1[:, 0], p1[:, 1], z1, k)
    pts2 = deproject_pixels(p2[:, 0], p2[:, 1], z2, k)
    sep_m = np.linalg.norm(pts2 - pts1, axis=1)
    keep &= sep_m <= cfg.max_gripper_width

    center = np.rint((p1 + p2) / 2.0).astype(np.int64)
    d0 = depth.data[center[:, 0], center[:, 1]]
    keep &= d0 > 0

    candidates: list[GraspCandidate] = []
    seen: set[tuple[int, int, int, int]] = set()
    for idx in np.nonzero(keep)[0]:
        ja = coords[a[idx]]
        jb = coords[b[idx]]
        key = (int(ja[0]), int(ja[1]), int(jb[0]), int(jb[1]))
        if key in seen:
            continue
        seen.add(key)
        candidates.append(GraspCandidate(
            center=(int(center[idx, 0]), int(center[idx, 1])),
            axis_angle=_axis_angle(v[idx, 0], v[idx, 1]),
            jaw1=(key[0], key[1]),
            jaw2=(key[2], key[3]),
            d0=float(d0[idx]),
            jaw_separation_px=float(sep_px[idx]),
            jaw_separation_m=float(sep_m[idx]),
            grad1=(float(dirs[a[idx], 0]), float(dirs[a[idx], 1])),
            grad2=(float(dirs[b[idx], 0]), float(dirs[b[idx], 1])),
        ))
        if len(candidates) >= cfg.max_candidates:
            break
    return candidates


def grasp_axis_pixels(g: GraspCandidate) -> np.ndarray:
    """Unique (row, col) pixels along the jaw-to-jaw segment.

    The segment is sampled at one step per pixel of the longer axis
    extent, rounded onto the grid; this is what the closing fingers
    sweep over, so it is the right footprint for hazard checks.
    """
    dr = g.jaw2[0] - g.jaw1[0]
    dc = g.jaw2[1] - g.jaw1[1]
    steps = int(max(abs(dr), abs(dc))) + 1
    t = np.linspace(0.0, 1.0, steps)
    rows = np.rint(g.jaw1[0] + t * dr).astype(np.int64)
    cols = np.rint(g.jaw1[1] + t * dc).astype(np.int64)
    return np.unique(np.stack([rows, cols], axis=1), axis=0)
