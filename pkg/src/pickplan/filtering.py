"""Depth/color region statistics and the grasp candidate filter.

A candidate survives only when the material between the jaws is raised,
rough, and color-distinct: the jaws must sit on ground at least eps1
below the center, the covered region must span more than eps2 of relief
with mean depth eps3 below the center and depth spread above eps4, the
region's luma spread must exceed eps5, and the two jaw windows must
differ in mean color by more than eps6. Grasps that meet all six tests
land on protruding corner material rather than on the stuffed middle of
a bag, where closing fingers would hit the contents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OutOfBoundsError
from .imaging import ColorImage, DepthImage
from .sampling import GraspCandidate

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

CONDITION_NAMES = (
    "jaw_elevation",        # C1: d1 > d0+eps1 and d2 > d0+eps1
    "region_relief",        # C2: d_max - d_min > eps2
    "center_prominence",    # C3: mu_d > d0+eps3 and sigma_d > eps4
    "color_spread",         # C4: sigma_c > eps5
    "jaw_color_difference", # C5: |mean(c1 - c2)| > eps6
)


@dataclass(frozen=True)
class FilterThresholds:
    """The six tunable thresholds; eps1..eps4 in meters, eps5/eps6 in 8-bit intensity."""

    eps1: float = 0.01
    eps2: float = 0.01
    eps3: float = 0.01
    eps4: float = 0.01
    eps5: float = 30.0
    eps6: float = 50.0

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3", "eps4", "eps5", "eps6"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("eps1", "eps2", "eps3", "eps4", "eps5", "eps6")}

    @classmethod
    def from_dict(cls, d: dict) -> "FilterThresholds":
        return cls(**{k: d[k] for k in ("eps1", "eps2", "eps3", "eps4", "eps5", "eps6") if k in d})


@dataclass(frozen=True)
class RegionGeometry:
    """Pixel geometry of the grasp-covered region.

    The region is the rectangle swept by the closing fingers: one side
    runs jaw-to-jaw along the grasp axis, the other is the finger
    thickness. Jaw statistics use a small square window at each jaw.
    """

    rect_height_px: int = 15
    jaw_window_px: int = 5

    def __post_init__(self):
        if self.rect_height_px < 1:
            raise ValueError("rect_height_px must be >= 1")
        if self.jaw_window_px < 1 or self.jaw_window_px % 2 == 0:
            raise ValueError("jaw_window_px must be odd and >= 1")


@dataclass(frozen=True)
class RegionStats:
    """Depth and color statistics the grasp-region conditions read.

    Depths in meters; c1/c2/mu_c are per-channel means in [0, 255];
    sigma_c is the luma standard deviation.
    """

    d1: float
    d2: float
    d0: float
    mu_d: float
    sigma_d: float
    d_max: float
    d_min: float
    c1: tuple[float, float, float]
    c2: tuple[float, float, float]
    mu_c: tuple[float, float, float]
    sigma_c: float

    def __post_init__(self):
        eps = 1e-9
        if not (self.d_min - eps <= self.mu_d <= self.d_max + eps):
            raise ValueError("mu_d must lie within [d_min, d_max]")
        if self.sigma_d < 0 or self.sigma_c < 0:
            raise ValueError("standard deviations must be >= 0")
        for c in (self.c1, self.c2, self.mu_c):
            if any(not (0 - eps <= v <= 255 + eps) for v in c):
                raise ValueError("channel means must lie in [0, 255]")

    def to_dict(self) -> dict:
        return {
            "d1": self.d1, "d2": self.d2, "d0": self.d0,
            "mu_d": self.mu_d, "sigma_d": self.sigma_d,
            "d_max": self.d_max, "d_min": self.d_min,
            "c1": list(self.c1), "c2": list(self.c2),
            "mu_c": list(self.mu_c), "sigma_c": self.sigma_c,
        }


@dataclass(frozen=True)
class FilterBreakdown:
    """Per-condition verdicts for one candidate."""

    jaw_elevation: bool
    region_relief: bool
    center_prominence: bool
    color_spread: bool
    jaw_color_difference: bool

    @property
    def passed(self) -> bool:
        return (self.jaw_elevation and self.region_relief and self.center_prominence
                and self.color_spread and self.jaw_color_difference)

    def __bool__(self) -> bool:
        return self.passed

    def failed_conditions(self) -> list[str]:
        return [name for name in CONDITION_NAMES if not getattr(self, name)]

    def to_dict(self) -> dict:
        d = {name: getattr(self, name) for name in CONDITION_NAMES}
        d["passed"] = self.passed
        return d


def region_pixels(g: GraspCandidate, geom: RegionGeometry) -> np.ndarray:
    """Unique (row, col) pixels of the grasp-covered rectangle.

    The rectangle is centered on the grasp center, spans
    round(jaw_separation_px) steps along the axis and rect_height_px
    across it; rotated offsets are rounded half-to-even onto the pixel
    grid and deduplicated in lexicographic order.
    """
    u_r, u_c = g.axis_vector
    w_r, w_c = u_c, -u_r
    n_along = max(1, int(np.rint(g.jaw_separation_px)))
    offs_a = np.arange(n_along, dtype=np.float64) - (n_along - 1) / 2.0
    offs_b = np.arange(geom.rect_height_px, dtype=np.float64) - (geom.rect_height_px - 1) / 2.0
    rows = np.rint(g.center[0] + offs_a[:, None] * u_r + offs_b[None, :] * w_r)
    cols = np.rint(g.center[1] + offs_a[:, None] * u_c + offs_b[None, :] * w_c)
    px = np.stack([rows.ravel(), cols.ravel()], axis=1).astype(np.int64)
    return np.unique(px, axis=0)


def _window_pixels(center: tuple[int, int], window_px: int) -> np.ndarray:
    half = window_px // 2
    rr, cc = np.mgrid[center[0] - half:center[0] + half + 1,
                      center[1] - half:center[1] + half + 1]
    return np.stack([rr.ravel(), cc.ravel()], axis=1)


def _check_bounds(px: np.ndarray, height: int, width: int, what: str) -> None:
    if px[:, 0].min() < 0 or px[:, 0].max() >= height \
            or px[:, 1].min() < 0 or px[:, 1].max() >= width:
        raise OutOfBoundsError(f"{what} extends past the image bounds")


def luma(rgb: np.ndarray) -> np.ndarray:
    r, g, b = LUMA_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def region_stats(depth: DepthImage, color: ColorImage, g: GraspCandidate,
                 geom: RegionGeometry) -> RegionStats:
    """Compute the filter's inputs for one candidate.

    Raises OutOfBoundsError when the region or a jaw window leaves the
    image; callers drop such candidates rather than clamping, because
    clamped statistics would silently distort the relief conditions.
    """
    region = region_pixels(g, geom)
    _check_bounds(region, depth.height, depth.width, "grasp region")
    win1 = _window_pixels(g.jaw1, geom.jaw_window_px)
    win2 = _window_pixels(g.jaw2, geom.jaw_window_px)
    _check_bounds(win1, depth.height, depth.width, "jaw1 window")
    _check_bounds(win2, depth.height, depth.width, "jaw2 window")

    rd = depth.data[region[:, 0], region[:, 1]]
    rc = color.data[region[:, 0], region[:, 1]].astype(np.float64)
    w1d = depth.data[win1[:, 0], win1[:, 1]]
    w2d = depth.data[win2[:, 0], win2[:, 1]]
    w1c = color.data[win1[:, 0], win1[:, 1]].astype(np.float64)
    w2c = color.data[win2[:, 0], win2[:, 1]].astype(np.float64)

    return RegionStats(
        d1=float(np.mean(w1d)),
        d2=float(np.mean(w2d)),
        d0=g.d0,
        mu_d=float(np.mean(rd)),
        sigma_d=float(np.std(rd)),
        d_max=float(np.max(rd)),
        d_min=float(np.min(rd)),
        c1=tuple(float(x) for x in np.mean(w1c, axis=0)),
        c2=tuple(float(x) for x in np.mean(w2c, axis=0)),
        mu_c=tuple(float(x) for x in np.mean(rc, axis=0)),
        sigma_c=float(np.std(luma(rc))),
    )


def passes_filter(s: RegionStats, t: FilterThresholds,
                  signed_color_diff: bool = False) -> FilterBreakdown:
    """Evaluate the six threshold conditions on one candidate's statistics.

    The jaw-color test uses |mean(c1 - c2)| by default so the verdict is
    invariant under the arbitrary jaw labeling; signed_color_diff=True
    keeps the literal signed form for comparison runs.
    """
    color_diff = (s.c1[0] - s.c2[0] + s.c1[1] - s.c2[1] + s.c1[2] - s.c2[2]) / 3.0
    if not signed_color_diff:
        color_diff = abs(color_diff)
    return FilterBreakdown(
        jaw_elevation=s.d1 > s.d0 + t.eps1 and s.d2 > s.d0 + t.eps1,
        region_relief=s.d_max - s.d_min > t.eps2,
        center_prominence=s.mu_d > s.d0 + t.eps3 and s.sigma_d > t.eps4,
        color_spread=s.sigma_c > t.eps5,
        jaw_color_difference=color_diff > t.eps6,
    )


@dataclass(frozen=True)
class CandidateEvaluation:
    candidate: GraspCandidate
    stats: Optional[RegionStats]  # None when the region left the image
    breakdown: Optional[FilterBreakdown]

    @property
    def passed(self) -> bool:
        return self.breakdown is not None and self.breakdown.passed

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate.to_dict(),
            "stats": self.stats.to_dict() if self.stats else None,
            "breakdown": self.breakdown.to_dict() if self.breakdown else None,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class FilterReport:
    evaluations: list[CandidateEvaluation]
    kept: list[GraspCandidate]
    out_of_bounds: int

    def most_violated_condition(self) -> Optional[str]:
        """Condition failed by the most evaluated candidates, for diagnostics."""
        counts = {name: 0 for name in CONDITION_NAMES}
        for ev in self.evaluations:
            if ev.breakdown is None:
                continue
            for name in ev.breakdown.failed_conditions():
                counts[name] += 1
        if all(v == 0 for v in counts.values()):
            return None
        return max(CONDITION_NAMES, key=lambda n: counts[n])

    def to_dict(self) -> dict:
        return {
            "evaluations": [ev.to_dict() for ev in self.evaluations],
            "kept": [g.to_dict() for g in self.kept],
            "out_of_bounds": self.out_of_bounds,
            "most_violated_condition": self.most_violated_condition(),
        }


def evaluate_candidates(candidates: list[GraspCandidate], depth: DepthImage,
                        color: ColorImage, geom: RegionGeometry,
                        t: FilterThresholds,
                        signed_color_diff: bool = False) -> FilterReport:
    """Run the filter over a candidate list, preserving input order."""
    evaluations = []
    kept = []
    oob = 0
    for g in candidates:
        try:
            s = region_stats(depth, color, g, geom)
        except OutOfBoundsError:
            oob += 1
            evaluations.append(CandidateEvaluation(candidate=g, stats=None, breakdown=None))
            continue
        b = passes_filter(s, t, signed_color_diff=signed_color_diff)
        evaluations.append(CandidateEvaluation(candidate=g, stats=s, breakdown=b))
        if b.passed:
            kept.append(g)
    return FilterReport(evaluations=evaluations, kept=kept, out_of_bounds=oob)


def filter_grasps(candidates: list[GraspCandidate], depth: DepthImage,
                  color: ColorImage, geom: RegionGeometry,
                  t: FilterThresholds,
                  signed_color_diff: bool = False) -> list[GraspCandidate]:
    """The surviving subset of candidates, in input order."""
    return evaluate_candidates(candidates, depth, color, geom, t,
                               signed_color_diff=signed_color_diff).kept
