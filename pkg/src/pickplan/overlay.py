"""Drawing plan glyphs onto color images for inspection.

All drawing happens on a copy in RGB; coordinates are clamped into the
image so glyphs never spill outside, even for plans near the border.
"""

from __future__ import annotations

import math

import cv2
import numpy as np

from .detection import BoundingBox, Detection
from .imaging import CameraIntrinsics, ColorImage, Point3, project
from .sampling import GraspCandidate
from .suction import SuctionCandidate

PASS_COLOR = (40, 220, 40)
FAIL_COLOR = (230, 50, 50)
SELECT_COLOR = (255, 210, 0)
INFO_COLOR = (80, 160, 255)


def _clamp_point(img: np.ndarray, row: float, col: float) -> tuple[int, int]:
    """(x, y) for cv2, clamped inside the image."""
    h, w = img.shape[:2]
    x = int(round(min(w - 1, max(0, col))))
    y = int(round(min(h - 1, max(0, row))))
    return x, y


def draw_grasp(img: np.ndarray, g: GraspCandidate,
               color: tuple[int, int, int] = PASS_COLOR, thickness: int = 1) -> None:
    """Axis segment, jaw ticks, and a center dot, in place."""
    p1 = _clamp_point(img, *g.jaw1)
    p2 = _clamp_point(img, *g.jaw2)
    cv2.line(img, p1, p2, color, thickness)
    u_r, u_c = g.axis_vector
    tick = 4.0
    for jaw in (g.jaw1, g.jaw2):
        a = _clamp_point(img, jaw[0] - tick * u_c, jaw[1] + tick * u_r)
        b = _clamp_point(img, jaw[0] + tick * u_c, jaw[1] - tick * u_r)
        cv2.line(img, a, b, color, thickness)
    cv2.circle(img, _clamp_point(img, *g.center), 2, color, -1)


def draw_suction(img: np.ndarray, cand: SuctionCandidate, k: CameraIntrinsics,
                 color: tuple[int, int, int] = PASS_COLOR) -> None:
    """Cup circle plus an arrow along the projected surface normal."""
    center = _clamp_point(img, *cand.pixel)
    cv2.circle(img, center, 8, color, 1)
    length = 0.05
    tip = Point3(x=cand.point.x + length * cand.normal[0],
                 y=cand.point.y + length * cand.normal[1],
                 z=cand.point.z + length * cand.normal[2])
    if tip.z > 0:
        tip_u, tip_v = project(tip, k)
        cv2.arrowedLine(img, center, _clamp_point(img, tip_v, tip_u), color, 1,
                        tipLength=0.3)


def draw_bbox(img: np.ndarray, bbox: BoundingBox,
              color: tuple[int, int, int] = INFO_COLOR, thickness: int = 1) -> None:
    top_left = _clamp_point(img, bbox.min_row, bbox.min_col)
    bottom_right = _clamp_point(img, bbox.max_row, bbox.max_col)
    cv2.rectangle(img, top_left, bottom_right, color, thickness)


def draw_detection(img: np.ndarray, det: Detection) -> None:
    draw_bbox(img, det.bbox)
    label = f"{det.kind.value} {det.elevation_p95_m * 1000:.0f}mm"
    x, y = _clamp_point(img, det.bbox.min_row - 4, det.bbox.min_col)
    cv2.putText(img, label, (x, max(10, y)), cv2.FONT_HERSHEY_PLAIN, 0.9,
                INFO_COLOR, 1, cv2.LINE_AA)


def draw_polygon(img: np.ndarray, poly: np.ndarray,
                 color: tuple[int, int, int] = INFO_COLOR) -> None:
    pts = np.array([_clamp_point(img, r, c) for r, c in poly], dtype=np.int32)
    cv2.polylines(img, [pts], isClosed=True, color=color, thickness=1)


def grasp_overlay(base: ColorImage, kept: list[GraspCandidate],
                  rejected: list[GraspCandidate],
                  selected: GraspCandidate | None,
                  max_rejected: int = 150) -> ColorImage:
    """Survivors in green over a sample of rejected candidates in red."""
    img = base.data.copy()
    for g in rejected[:max_rejected]:
        draw_grasp(img, g, FAIL_COLOR)
    for g in kept:
        draw_grasp(img, g, PASS_COLOR)
    if selected is not None:
        draw_grasp(img, selected, SELECT_COLOR, thickness=2)
    return ColorImage.from_array(img)


def suction_overlay(base: ColorImage, bbox: BoundingBox,
                    selected: SuctionCandidate | None,
                    k: CameraIntrinsics) -> ColorImage:
    img = base.data.copy()
    draw_bbox(img, bbox)
    if selected is not None:
        draw_suction(img, selected, k, SELECT_COLOR)
    return ColorImage.from_array(img)


def detection_overlay(base: ColorImage, detections: list[Detection]) -> ColorImage:
    img = base.data.copy()
    for det in detections:
        draw_detection(img, det)
    return ColorImage.from_array(img)


def angle_colormap(angle: float) -> tuple[int, int, int]:
    """Stable hue per grasp axis angle, for dense candidate plots."""
    hue = int((angle / math.pi) * 179) % 180
    swatch = np.array([[[hue, 200, 255]]], dtype=np.uint8)
    rgb = cv2.cvtColor(swatch, cv2.COLOR_HSV2RGB)[0, 0]
    return int(rgb[0]), int(rgb[1]), int(rgb[2])
