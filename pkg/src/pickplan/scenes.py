"""Synthetic RGB-D scenes of overlapped bags and envelopes with ground truth.

Scenes are height fields over a flat table imaged by a downward camera.
A bag is a rectangular footprint holding a superelliptic stuffed lump,
a flat sealed margin, and four raised corner puffs where the empty bag
material bulges up; an envelope is a thin uniform plate. Overlap is
composited per pixel by nearest surface. The generator also emits the
ground truth the planners are judged against: per-object visibility
masks, corner-region polygons, stuffed-lump interior masks, and barcode
placement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import FrustumError, PlacementError
from .imaging import (CameraIntrinsics, ColorImage, DEFAULT_INTRINSICS,
                      DepthImage, rle_decode, rle_encode)

FLAP_THICKNESS_M = 0.003
ENVELOPE_THICKNESS_M = 0.003
PUFF_PEAK_INSET = 0.3           # peak sits this fraction of puff radius inside the corner
CORNER_POLYGON_SCALE = 0.95     # polygon radius as a fraction of puff radius
LUMP_MASK_MIN_HEIGHT_M = 0.003
BARCODE_HALF_EXTENTS_M = (0.015, 0.010)
BARCODE_STRIPE_WIDTH_M = 0.003
BARCODE_DARK = (25, 25, 25)
BARCODE_LIGHT = (245, 245, 245)
TABLE_COLOR = (48, 52, 58)
DEFAULT_TABLE_DEPTH_M = 1.0
DEFAULT_NOISE_SIGMA_M = 0.0015


class PackageKind(str, Enum):
    BAG = "bag"
    ENVELOPE = "envelope"


@dataclass(frozen=True)
class SceneObject:
    """One package on the table.

    Pose is planar: (x, y) in meters in the camera-aligned table frame
    plus a yaw about the vertical. half_extent_a runs along the local x
    axis, half_extent_b along local y. Bags carry a stuffed lump of
    lump_height, a sealed flap band of width flap_band, and corner
    puffs; envelopes are plates of fixed thickness and must leave the
    bag-only fields at zero.
    """

    id: int
    kind: PackageKind
    x: float
    y: float
    yaw: float
    half_extent_a: float
    half_extent_b: float
    lump_height: float = 0.0
    flap_band: float = 0.0
    barcode_up: bool = True
    color: tuple[int, int, int] = (208, 210, 205)
    label_color: tuple[int, int, int] = (240, 240, 235)
    corner_puff_height: float = 0.0
    corner_puff_radius: float = 0.0

    def __post_init__(self):
        if self.half_extent_a <= 0 or self.half_extent_b <= 0:
            raise ValueError("footprint half-extents must be positive")
        if self.kind is PackageKind.BAG:
            if self.lump_height <= FLAP_THICKNESS_M:
                raise ValueError("bag lump_height must exceed the flap thickness")
            if not 0 < self.flap_band < min(self.half_extent_a, self.half_extent_b):
                raise ValueError("flap_band must be positive and smaller than the footprint")
            if self.corner_puff_height < 0 or self.corner_puff_radius < 0:
                raise ValueError("corner puff dimensions must be >= 0")
            if self.corner_puff_height > 0 and not (
                    0 < self.corner_puff_radius < min(self.half_extent_a, self.half_extent_b)):
                raise ValueError("corner_puff_radius must fit inside the footprint")
        else:
            if self.lump_height != 0.0 or self.flap_band != 0.0 \
                    or self.corner_puff_height != 0.0 or self.corner_puff_radius != 0.0:
                raise ValueError("envelope bag-only fields must be zero")

    @property
    def surface_height(self) -> float:
        """Tallest point of the object above the table."""
        if self.kind is PackageKind.ENVELOPE:
            return ENVELOPE_THICKNESS_M
        return max(self.lump_height, self.corner_puff_height, FLAP_THICKNESS_M)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "x": self.x, "y": self.y, "yaw": self.yaw,
            "half_extent_a": self.half_extent_a,
            "half_extent_b": self.half_extent_b,
            "lump_height": self.lump_height,
            "flap_band": self.flap_band,
            "barcode_up": self.barcode_up,
            "color": list(self.color),
            "label_color": list(self.label_color),
            "corner_puff_height": self.corner_puff_height,
            "corner_puff_radius": self.corner_puff_radius,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneObject":
        return cls(
            id=d["id"], kind=PackageKind(d["kind"]),
            x=d["x"], y=d["y"], yaw=d["yaw"],
            half_extent_a=d["half_extent_a"], half_extent_b=d["half_extent_b"],
            lump_height=d["lump_height"], flap_band=d["flap_band"],
            barcode_up=d["barcode_up"],
            color=tuple(d["color"]), label_color=tuple(d["label_color"]),
            corner_puff_height=d["corner_puff_height"],
            corner_puff_radius=d["corner_puff_radius"],
        )


@dataclass(frozen=True)
class SceneTruth:
    """Ground truth aligned index-for-index with `objects`.

    masks are visibility masks (pixel owned by the nearest surface);
    corner_regions holds four (8, 2) float (row, col) polygons per bag
    and None per envelope; lump_masks mark where the stuffed lump rises
    above the flap, unoccluded; barcode_bboxes are inclusive pixel
    boxes of the label patch for barcode-up objects.
    """

    objects: tuple[SceneObject, ...]
    masks: tuple[np.ndarray, ...]
    corner_regions: tuple[Optional[tuple[np.ndarray, ...]], ...]
    lump_masks: tuple[Optional[np.ndarray], ...]
    barcode_bboxes: tuple[Optional[tuple[int, int, int, int]], ...]
    table_depth: float

    def object_by_id(self, object_id: int) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(f"no object with id {object_id}")

    def index_of(self, object_id: int) -> int:
        for i, obj in enumerate(self.objects):
            if obj.id == object_id:
                return i
        raise KeyError(f"no object with id {object_id}")

    def visible_object_at(self, row: int, col: int) -> Optional[int]:
        """Id of the object owning this pixel, or None for table."""
        for obj, mask in zip(self.objects, self.masks):
            if mask[row, col]:
                return obj.id
        return None

    def to_json_dict(self) -> dict:
        return {
            "table_depth_m": self.table_depth,
            "objects": [o.to_dict() for o in self.objects],
            "masks": [rle_encode(m) for m in self.masks],
            "corner_regions": [
                None if regions is None else [poly.tolist() for poly in regions]
                for regions in self.corner_regions
            ],
            "lump_masks": [None if m is None else rle_encode(m) for m in self.lump_masks],
            "barcode_bboxes": [None if b is None else list(b) for b in self.barcode_bboxes],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SceneTruth":
        return cls(
            objects=tuple(SceneObject.from_dict(o) for o in d["objects"]),
            masks=tuple(rle_decode(m) for m in d["masks"]),
            corner_regions=tuple(
                None if regions is None else tuple(
                    np.asarray(poly, dtype=np.float64) for poly in regions)
                for regions in d["corner_regions"]
            ),
            lump_masks=tuple(None if m is None else rle_decode(m) for m in d["lump_masks"]),
            barcode_bboxes=tuple(
                None if b is None else tuple(int(v) for v in b)
                for b in d["barcode_bboxes"]
            ),
            table_depth=d["table_depth_m"],
        )


def polygon_contains(poly: np.ndarray, row: float, col: float) -> bool:
    """Even-odd ray-cast point-in-polygon test on (row, col) vertices."""
    inside = False
    n = len(poly)
    for i in range(n):
        r1, c1 = poly[i]
        r2, c2 = poly[(i + 1) % n]
        if (r1 > row) != (r2 > row):
            t = (row - r1) / (r2 - r1)
            crossing_col = c1 + t * (c2 - c1)
            if col < crossing_col:
                inside = not inside
    return inside


def _world_grids(k: CameraIntrinsics, table_depth: float) -> tuple[np.ndarray, np.ndarray]:
    """Table-frame (x, y) of each pixel center at the table plane."""
    xs = (np.arange(k.width, dtype=np.float64) - k.cx) * table_depth / k.fx
    ys = (np.arange(k.height, dtype=np.float64) - k.cy) * table_depth / k.fy
    return np.broadcast_to(xs[None, :], (k.height, k.width)), \
        np.broadcast_to(ys[:, None], (k.height, k.width))


def _local_coords(obj: SceneObject, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c, s = math.cos(obj.yaw), math.sin(obj.yaw)
    rel_x = x - obj.x
    rel_y = y - obj.y
    return c * rel_x + s * rel_y, -s * rel_x + c * rel_y


def _local_to_world(obj: SceneObject, dx: float, dy: float) -> tuple[float, float]:
    c, s = math.cos(obj.yaw), math.sin(obj.yaw)
    return obj.x + c * dx - s * dy, obj.y + s * dx + c * dy


def _world_to_pixel(k: CameraIntrinsics, table_depth: float,
                    wx: float, wy: float) -> tuple[float, float]:
    """(row, col) of a table-frame point under the table-plane mapping."""
    return k.cy + k.fy * wy / table_depth, k.cx + k.fx * wx / table_depth


def _puff_peaks(obj: SceneObject) -> list[tuple[float, float]]:
    inset = PUFF_PEAK_INSET * obj.corner_puff_radius
    px = obj.half_extent_a - inset
    py = obj.half_extent_b - inset
    return [(sx * px, sy * py) for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1))]


def _lump_field(obj: SceneObject, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Stuffed-lump height over local coords, zero outside its superellipse."""
    ia = obj.half_extent_a - obj.flap_band
    ib = obj.half_extent_b - obj.flap_band
    s = (dx / ia) ** 4 + (dy / ib) ** 4
    return obj.lump_height * np.clip(1.0 - s, 0.0, None)


def _height_field(obj: SceneObject, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    inside = (np.abs(dx) <= obj.half_extent_a) & (np.abs(dy) <= obj.half_extent_b)
    if obj.kind is PackageKind.ENVELOPE:
        return np.where(inside, ENVELOPE_THICKNESS_M, 0.0)
    h = _lump_field(obj, dx, dy)
    if obj.corner_puff_height > 0:
        for px, py in _puff_peaks(obj):
            r2 = ((dx - px) ** 2 + (dy - py) ** 2) / obj.corner_puff_radius ** 2
            dome = obj.corner_puff_height * np.clip(1.0 - r2, 0.0, None) ** 2
            h = np.maximum(h, dome)
    h = np.maximum(h, FLAP_THICKNESS_M)
    return np.where(inside, h, 0.0)


def _check_frustum(obj: SceneObject, k: CameraIntrinsics, table_depth: float) -> None:
    a, b = obj.half_extent_a, obj.half_extent_b
    for dx, dy in ((a, b), (a, -b), (-a, b), (-a, -b)):
        wx, wy = _local_to_world(obj, dx, dy)
        row, col = _world_to_pixel(k, table_depth, wx, wy)
        if not (0 <= row <= k.height - 1 and 0 <= col <= k.width - 1):
            raise FrustumError(
                f"object {obj.id} corner projects to ({row:.1f}, {col:.1f}) outside the image")


def _corner_polygons(obj: SceneObject, k: CameraIntrinsics,
                     table_depth: float) -> tuple[np.ndarray, ...]:
    """Four octagons around the puff peaks, clamped inside the footprint."""
    radius = CORNER_POLYGON_SCALE * obj.corner_puff_radius
    polys = []
    for px, py in _puff_peaks(obj):
        verts = []
        for kk in range(8):
            ang = kk * math.pi / 4.0
            dx = min(obj.half_extent_a, max(-obj.half_extent_a, px + radius * math.cos(ang)))
            dy = min(obj.half_extent_b, max(-obj.half_extent_b, py + radius * math.sin(ang)))
            wx, wy = _local_to_world(obj, dx, dy)
            verts.append(_world_to_pixel(k, table_depth, wx, wy))
        polys.append(np.asarray(verts, dtype=np.float64))
    return tuple(polys)


def _barcode_bbox(obj: SceneObject, k: CameraIntrinsics,
                  table_depth: float) -> tuple[int, int, int, int]:
    ha, hb = BARCODE_HALF_EXTENTS_M
    rows, cols = [], []
    for dx, dy in ((ha, hb), (ha, -hb), (-ha, hb), (-ha, -hb)):
        wx, wy = _local_to_world(obj, dx, dy)
        row, col = _world_to_pixel(k, table_depth, wx, wy)
        rows.append(row)
        cols.append(col)
    return (max(0, int(math.floor(min(rows)))), max(0, int(math.floor(min(cols)))),
            min(k.height - 1, int(math.ceil(max(rows)))),
            min(k.width - 1, int(math.ceil(max(cols)))))


def render_scene(objects: list[SceneObject], k: Optional[CameraIntrinsics] = None,
                 noise_sigma: float = DEFAULT_NOISE_SIGMA_M, rng_seed: int = 0,
                 table_depth: float = DEFAULT_TABLE_DEPTH_M,
                 ) -> tuple[ColorImage, DepthImage, SceneTruth]:
    """Render objects into a registered RGB-D pair plus ground truth.

    Compositing is per-pixel nearest surface; depth ties go to the
    earlier object in the list. Gaussian depth noise of noise_sigma is
    added after compositing (then clamped at zero), so a fixed seed
    yields the same noise field regardless of scene content and
    rendering stays compositional object by object.
    """
    k = k or DEFAULT_INTRINSICS
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        raise ValueError("object ids must be unique")
    for obj in objects:
        _check_frustum(obj, k, table_depth)

    x_grid, y_grid = _world_grids(k, table_depth)
    depth = np.full((k.height, k.width), table_depth, dtype=np.float64)
    color = np.empty((k.height, k.width, 3), dtype=np.uint8)
    color[:] = TABLE_COLOR

    heights = []
    locals_ = []
    for obj in objects:
        dx, dy = _local_coords(obj, x_grid, y_grid)
        locals_.append((dx, dy))
        heights.append(_height_field(obj, dx, dy))

    masks = []
    if objects:
        stack = np.stack([np.where(h > 0, table_depth - h, np.inf) for h in heights])
        nearest = stack.min(axis=0)
        winner = stack.argmin(axis=0)
        covered = np.isfinite(nearest)
        depth = np.where(covered, nearest, table_depth)
        for i in range(len(objects)):
            masks.append(covered & (winner == i))
    clean_depth = depth

    corner_regions = []
    lump_masks = []
    barcode_bboxes = []
    for i, obj in enumerate(objects):
        dx, dy = locals_[i]
        mask = masks[i]
        if obj.kind is PackageKind.BAG:
            inside = (np.abs(dx) <= obj.half_extent_a) & (np.abs(dy) <= obj.half_extent_b)
            ia = obj.half_extent_a - obj.flap_band
            ib = obj.half_extent_b - obj.flap_band
            band = inside & ((np.abs(dx) > ia) | (np.abs(dy) > ib))
            flat = heights[i] < FLAP_THICKNESS_M + 0.001
            color[mask] = obj.color
            color[mask & band & flat] = obj.label_color
            corner_regions.append(_corner_polygons(obj, k, table_depth))
            lump_masks.append(inside & (_lump_field(obj, dx, dy) > LUMP_MASK_MIN_HEIGHT_M))
        else:
            color[mask] = obj.color
            corner_regions.append(None)
            lump_masks.append(None)
        if obj.barcode_up:
            ha, hb = BARCODE_HALF_EXTENTS_M
            patch = mask & (np.abs(dx) <= ha) & (np.abs(dy) <= hb)
            stripe_idx = np.floor((dx + ha) / BARCODE_STRIPE_WIDTH_M).astype(np.int64)
            color[patch & (stripe_idx % 2 == 0)] = BARCODE_DARK
            color[patch & (stripe_idx % 2 == 1)] = BARCODE_LIGHT
            barcode_bboxes.append(_barcode_bbox(obj, k, table_depth))
        else:
            barcode_bboxes.append(None)

    if noise_sigma > 0:
        rng = np.random.default_rng(rng_seed)
        depth = np.clip(clean_depth + rng.normal(0.0, noise_sigma, clean_depth.shape), 0.0, None)

    for m in masks:
        m.setflags(write=False)
    for m in lump_masks:
        if m is not None:
            m.setflags(write=False)

    truth = SceneTruth(
        objects=tuple(objects),
        masks=tuple(masks),
        corner_regions=tuple(corner_regions),
        lump_masks=tuple(lump_masks),
        barcode_bboxes=tuple(barcode_bboxes),
        table_depth=table_depth,
    )
    return ColorImage.from_array(color), DepthImage.from_array(depth), truth


@dataclass(frozen=True)
class WorkspaceBounds:
    """Placement region for random scenes; defaults fit the default camera."""

    x_half: float = 0.30
    y_half: float = 0.18


_OVERLAP_GRID_STEP_M = 0.002
_MAX_PAIR_OVERLAP = 0.55


def _footprint_cells(obj: SceneObject, bounds: WorkspaceBounds) -> np.ndarray:
    """Occupied cells of the footprint rectangle on a coarse workspace grid."""
    margin = 0.25
    xs = np.arange(-bounds.x_half - margin, bounds.x_half + margin, _OVERLAP_GRID_STEP_M)
    ys = np.arange(-bounds.y_half - margin, bounds.y_half + margin, _OVERLAP_GRID_STEP_M)
    gx = np.broadcast_to(xs[None, :], (ys.size, xs.size))
    gy = np.broadcast_to(ys[:, None], (ys.size, xs.size))
    dx, dy = _local_coords(obj, gx, gy)
    return (np.abs(dx) <= obj.half_extent_a) & (np.abs(dy) <= obj.half_extent_b)


def pair_overlap_fraction(a: SceneObject, b: SceneObject,
                          bounds: Optional[WorkspaceBounds] = None) -> float:
    """Footprint intersection over the smaller footprint, on a 2 mm grid."""
    bounds = bounds or WorkspaceBounds()
    ca = _footprint_cells(a, bounds)
    cb = _footprint_cells(b, bounds)
    inter = int(np.count_nonzero(ca & cb))
    smaller = min(int(np.count_nonzero(ca)), int(np.count_nonzero(cb)))
    if smaller == 0:
        return 0.0
    return inter / smaller


def _random_bag(rng: np.random.Generator, obj_id: int, bounds: WorkspaceBounds) -> SceneObject:
    tint = rng.integers(-6, 7, size=3)
    body = tuple(int(np.clip(v + t, 0, 255)) for v, t in zip((208, 210, 205), tint))
    return SceneObject(
        id=obj_id, kind=PackageKind.BAG,
        x=float(rng.uniform(-bounds.x_half, bounds.x_half)),
        y=float(rng.uniform(-bounds.y_half, bounds.y_half)),
        yaw=float(rng.uniform(0.0, math.pi)),
        half_extent_a=float(rng.uniform(0.115, 0.135)),
        half_extent_b=float(rng.uniform(0.10, 0.115)),
        lump_height=float(rng.uniform(0.05, 0.07)),
        flap_band=0.04,
        barcode_up=bool(rng.random() < 0.5),
        color=body,
        corner_puff_height=0.04,
        corner_puff_radius=0.03,
    )


def _random_envelope(rng: np.random.Generator, obj_id: int,
                     bounds: WorkspaceBounds) -> SceneObject:
    tint = rng.integers(-6, 7, size=3)
    body = tuple(int(np.clip(v + t, 0, 255)) for v, t in zip((216, 214, 208), tint))
    return SceneObject(
        id=obj_id, kind=PackageKind.ENVELOPE,
        x=float(rng.uniform(-bounds.x_half, bounds.x_half)),
        y=float(rng.uniform(-bounds.y_half, bounds.y_half)),
        yaw=float(rng.uniform(0.0, math.pi)),
        half_extent_a=float(rng.uniform(0.11, 0.16)),
        half_extent_b=float(rng.uniform(0.08, 0.11)),
        barcode_up=bool(rng.random() < 0.5),
        color=body,
    )


def random_scene(n_bags: int, n_envelopes: int, rng_seed: int,
                 bounds: Optional[WorkspaceBounds] = None) -> list[SceneObject]:
    """Sample non-piled poses with pairwise footprint overlap <= 55%.

    Bags get ids 0..n_bags-1 then envelopes follow; placement resamples
    an object's pose until it fits, and gives up with PlacementError
    after 10000 total rejections.
    """
    if n_bags < 0 or n_envelopes < 0:
        raise ValueError("object counts must be >= 0")
    bounds = bounds or WorkspaceBounds()
    rng = np.random.default_rng(rng_seed)
    placed: list[SceneObject] = []
    cells: list[np.ndarray] = []
    rejections = 0
    kinds = [PackageKind.BAG] * n_bags + [PackageKind.ENVELOPE] * n_envelopes
    for obj_id, kind in enumerate(kinds):
        while True:
            if kind is PackageKind.BAG:
                candidate = _random_bag(rng, obj_id, bounds)
            else:
                candidate = _random_envelope(rng, obj_id, bounds)
            cand_cells = _footprint_cells(candidate, bounds)
            cand_area = int(np.count_nonzero(cand_cells))
            ok = True
            for prior in cells:
                inter = int(np.count_nonzero(cand_cells & prior))
                smaller = min(cand_area, int(np.count_nonzero(prior)))
                if smaller > 0 and inter / smaller > _MAX_PAIR_OVERLAP:
                    ok = False
                    break
            if ok:
                placed.append(candidate)
                cells.append(cand_cells)
                break
            rejections += 1
            if rejections >= 10000:
                raise PlacementError(
                    f"could not place object {obj_id} after {rejections} rejections")
    return placed


def remove_object(objects: list[SceneObject], object_id: int) -> list[SceneObject]:
    remaining = [o for o in objects if o.id != object_id]
    if len(remaining) == len(objects):
        raise KeyError(f"no object with id {object_id}")
    return remaining


def flip_barcode(obj: SceneObject) -> SceneObject:
    return replace(obj, barcode_up=not obj.barcode_up)


@dataclass(frozen=True)
class SceneSpec:
    """Everything needed to re-render a scene deterministically."""

    objects: tuple[SceneObject, ...]
    intrinsics: CameraIntrinsics = field(default_factory=lambda: DEFAULT_INTRINSICS)
    noise_sigma: float = DEFAULT_NOISE_SIGMA_M
    rng_seed: int = 0
    table_depth: float = DEFAULT_TABLE_DEPTH_M

    def render(self) -> tuple[ColorImage, DepthImage, SceneTruth]:
        return render_scene(list(self.objects), self.intrinsics,
                            noise_sigma=self.noise_sigma, rng_seed=self.rng_seed,
                            table_depth=self.table_depth)

    def to_json_dict(self) -> dict:
        return {
            "objects": [o.to_dict() for o in self.objects],
            "intrinsics": {
                "fx": self.intrinsics.fx, "fy": self.intrinsics.fy,
                "cx": self.intrinsics.cx, "cy": self.intrinsics.cy,
                "width": self.intrinsics.width, "height": self.intrinsics.height,
            },
            "noise_sigma_m": self.noise_sigma,
            "rng_seed": self.rng_seed,
            "table_depth_m": self.table_depth,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SceneSpec":
        ki = d["intrinsics"]
        return cls(
            objects=tuple(SceneObject.from_dict(o) for o in d["objects"]),
            intrinsics=CameraIntrinsics(fx=ki["fx"], fy=ki["fy"], cx=ki["cx"],
                                        cy=ki["cy"], width=ki["width"],
                                        height=ki["height"]),
            noise_sigma=d["noise_sigma_m"],
            rng_seed=d["rng_seed"],
            table_depth=d["table_depth_m"],
        )


def save_scene(spec: SceneSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec.to_json_dict(), indent=2, sort_keys=True))


def load_scene(path: str | Path) -> SceneSpec:
    return SceneSpec.from_json_dict(json.loads(Path(path).read_text()))


def save_truth(truth: SceneTruth, path: str | Path) -> None:
    Path(path).write_text(json.dumps(truth.to_json_dict(), indent=2, sort_keys=True))


def load_truth(path: str | Path) -> SceneTruth:
    return SceneTruth.from_json_dict(json.loads(Path(path).read_text()))
