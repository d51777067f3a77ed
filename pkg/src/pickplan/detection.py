"""Package localization and envelope/bag classification.

The baseline detector segments foreground by depth against an
estimated table plane and classifies each connected component by its
elevation profile: thin plates are envelopes, tall piles are bags. It
emits the same Detection schema a learned detector would, so the
pipeline does not care which produced it. The barcode observation is a
ground-truth oracle behind the interface a barcode detector would
satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .errors import ProtocolError
from .imaging import ColorImage, DepthImage, rle_encode
from .scenes import PackageKind, SceneTruth


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive (row, col) pixel box."""

    min_row: int
    min_col: int
    max_row: int
    max_col: int

    def __post_init__(self):
        if self.min_row > self.max_row or self.min_col > self.max_col:
            raise ValueError("bounding box must be non-degenerate")

    @property
    def height(self) -> int:
        return self.max_row - self.min_row + 1

    @property
    def width(self) -> int:
        return self.max_col - self.min_col + 1

    @property
    def center(self) -> tuple[float, float]:
        return ((self.min_row + self.max_row) / 2.0,
                (self.min_col + self.max_col) / 2.0)

    def contains(self, row: float, col: float) -> bool:
        return self.min_row <= row <= self.max_row and self.min_col <= col <= self.max_col

    def iou(self, other: "BoundingBox") -> float:
        inter_h = min(self.max_row, other.max_row) - max(self.min_row, other.min_row) + 1
        inter_w = min(self.max_col, other.max_col) - max(self.min_col, other.min_col) + 1
        if inter_h <= 0 or inter_w <= 0:
            return 0.0
        inter = inter_h * inter_w
        union = self.height * self.width + other.height * other.width - inter
        return inter / union

    def to_list(self) -> list[int]:
        return [self.min_row, self.min_col, self.max_row, self.max_col]

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "BoundingBox":
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        if rows.size == 0:
            raise ValueError("cannot box an empty mask")
        return cls(min_row=int(rows[0]), min_col=int(cols[0]),
                   max_row=int(rows[-1]), max_col=int(cols[-1]))


@dataclass(frozen=True)
class Detection:
    bbox: BoundingBox
    kind: PackageKind
    confidence: float
    mask: Optional[np.ndarray]
    area_px: int
    median_depth_m: float
    elevation_p95_m: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "bbox": self.bbox.to_list(),
            "kind": self.kind.value,
            "confidence": self.confidence,
            "mask": rle_encode(self.mask) if self.mask is not None else None,
            "area_px": self.area_px,
            "median_depth_m": self.median_depth_m,
            "elevation_p95_m": self.elevation_p95_m,
        }


@dataclass(frozen=True)
class DetectorConfig:
    """Baseline segmentation knobs.

    fg_margin_m must sit below the envelope plate thickness or thin
    envelopes never leave the table mask; 2 mm clears a 3 mm plate
    while typical table-level depth noise stays below it after the
    min_area cut.
    """

    min_area: int = 300
    fg_margin_m: float = 0.002
    envelope_max_height_m: float = 0.02
    height_percentile: float = 95.0

    def __post_init__(self):
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if self.fg_margin_m <= 0:
            raise ValueError("fg_margin_m must be > 0")
        if not 0 < self.height_percentile <= 100:
            raise ValueError("height_percentile must lie in (0, 100]")


@dataclass(frozen=True)
class DetectionResult:
    table_depth_m: float
    detections: list[Detection]

    def to_dict(self) -> dict:
        return {
            "table_depth_m": self.table_depth_m,
            "detections": [d.to_dict() for d in self.detections],
        }


def estimate_table_depth(depth: DepthImage) -> float:
    """Median of valid depths; the table dominates the view by contract."""
    valid = depth.data[depth.valid_mask]
    if valid.size == 0:
        raise ValueError("no valid depth pixels to estimate the table from")
    return float(np.median(valid))


def _classify(elevation_p95: float, cfg: DetectorConfig) -> PackageKind:
    if elevation_p95 < cfg.envelope_max_height_m:
        return PackageKind.ENVELOPE
    return PackageKind.BAG


def detect_packages(color: ColorImage, depth: DepthImage,
                    cfg: Optional[DetectorConfig] = None) -> DetectionResult:
    """Segment packages above the table and classify each component.

    Color is unused by the baseline but part of the interface so a
    learned detector can slot in. Detections come back sorted by
    decreasing area (ties by bbox position) with confidence 1.0.
    """
    cfg = cfg or DetectorConfig()
    table = estimate_table_depth(depth)
    foreground = depth.valid_mask & (table - depth.data > cfg.fg_margin_m)
    labels, n_components = ndimage.label(foreground)
    detections = []
    for comp_id in range(1, n_components + 1):
        mask = labels == comp_id
        area = int(np.count_nonzero(mask))
        if area < cfg.min_area:
            continue
        elevation = table - depth.data[mask]
        p95 = float(np.percentile(elevation, cfg.height_percentile))
        mask.setflags(write=False)
        detections.append(Detection(
            bbox=BoundingBox.from_mask(mask),
            kind=_classify(p95, cfg),
            confidence=1.0,
            mask=mask,
            area_px=area,
            median_depth_m=float(np.median(depth.data[mask])),
            elevation_p95_m=p95,
        ))
    detections.sort(key=lambda d: (-d.area_px, d.bbox.min_row, d.bbox.min_col))
    return DetectionResult(table_depth_m=table, detections=detections)


def truth_detections(truth: SceneTruth, depth: DepthImage,
                     cfg: Optional[DetectorConfig] = None) -> DetectionResult:
    """Detections straight from ground-truth visibility masks.

    Same schema and sort order as the baseline, for substitutability
    tests and oracle pipeline runs; fully occluded objects are omitted.
    """
    cfg = cfg or DetectorConfig()
    detections = []
    for obj, mask in zip(truth.objects, truth.masks):
        area = int(np.count_nonzero(mask))
        if area < cfg.min_area:
            continue
        elevation = truth.table_depth - depth.data[mask]
        p95 = float(np.percentile(elevation, cfg.height_percentile))
        detections.append(Detection(
            bbox=BoundingBox.from_mask(mask),
            kind=obj.kind,
            confidence=1.0,
            mask=mask,
            area_px=area,
            median_depth_m=float(np.median(depth.data[mask])),
            elevation_p95_m=p95,
        ))
    detections.sort(key=lambda d: (-d.area_px, d.bbox.min_row, d.bbox.min_col))
    return DetectionResult(table_depth_m=truth.table_depth, detections=detections)


@dataclass(frozen=True)
class BarcodeObservation:
    present: bool
    bbox: Optional[BoundingBox]

    def __post_init__(self):
        if self.present != (self.bbox is not None):
            raise ValueError("bbox must be present exactly when the barcode is")

    def to_dict(self) -> dict:
        return {
            "present": self.present,
            "bbox": self.bbox.to_list() if self.bbox else None,
        }


def observe_barcode(truth: SceneTruth, held_id: Optional[int]) -> BarcodeObservation:
    """Oracle standing in for the side barcode camera.

    Reads the held object's barcode-up flag from ground truth; the
    interface is what a learned barcode detector would satisfy.
    """
    if held_id is None:
        raise ProtocolError("barcode check requires a held object")
    idx = truth.index_of(held_id)
    obj = truth.objects[idx]
    if not obj.barcode_up:
        return BarcodeObservation(present=False, bbox=None)
    bbox = truth.barcode_bboxes[idx]
    if bbox is None:
        raise ProtocolError(f"object {held_id} is barcode-up but truth has no patch box")
    return BarcodeObservation(present=True,
                              bbox=BoundingBox(min_row=bbox[0], min_col=bbox[1],
                                               max_row=bbox[2], max_col=bbox[3]))
