"""Analytic grasp quality scoring and best-grasp selection.

Scores combine three cheap geometric cues instead of a learned quality
network: how antipodal the jaw contacts are, how far the jaws sit above
the center ground, and how much depth relief the grasp spans. Scores
are deterministic functions of the candidate and its region statistics,
so rankings are reproducible across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import NoGraspError
from .filtering import RegionStats
from .sampling import GraspCandidate


@dataclass(frozen=True)
class ScorerConfig:
    """Weights for the three cues; they need not sum to one but must be >= 0."""

    antipodality_weight: float = 0.4
    elevation_weight: float = 0.4
    contrast_weight: float = 0.2
    elevation_saturation: float = 0.03
    relief_softening: float = 0.05

    def __post_init__(self):
        for name in ("antipodality_weight", "elevation_weight", "contrast_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.elevation_saturation <= 0:
            raise ValueError("elevation_saturation must be > 0")
        if self.relief_softening <= 0:
            raise ValueError("relief_softening must be > 0")


@dataclass(frozen=True)
class GraspScore:
    antipodality: float
    elevation: float
    contrast: float
    total: float

    def to_dict(self) -> dict:
        return {
            "antipodality": self.antipodality,
            "elevation": self.elevation,
            "contrast": self.contrast,
            "total": self.total,
        }


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def antipodality_score(g: GraspCandidate) -> float:
    """Mean |cos| between each jaw's surface gradient and the grasp axis.

    Gradients at depth edges point across the edge, so alignment with
    the axis means the fingers close against opposing faces. Candidates
    without stored gradients score a neutral 0.5.
    """
    if g.grad1 is None or g.grad2 is None:
        return 0.5
    u_r, u_c = g.axis_vector
    a1 = abs(g.grad1[0] * u_r + g.grad1[1] * u_c)
    a2 = abs(g.grad2[0] * u_r + g.grad2[1] * u_c)
    return _clamp01((a1 + a2) / 2.0)


def elevation_score(s: RegionStats, saturation: float) -> float:
    """How far the lower jaw sits above the center ground, saturating at `saturation` meters."""
    return _clamp01((min(s.d1, s.d2) - s.d0) / saturation)


def contrast_score(s: RegionStats, softening: float) -> float:
    """Depth relief across the region, squashed to [0, 1)."""
    relief = s.d_max - s.d_min
    return relief / (relief + softening)


def score_grasp(g: GraspCandidate, s: RegionStats,
                config: Optional[ScorerConfig] = None) -> GraspScore:
    cfg = config or ScorerConfig()
    a = antipodality_score(g)
    e = elevation_score(s, cfg.elevation_saturation)
    c = contrast_score(s, cfg.relief_softening)
    total = (cfg.antipodality_weight * a + cfg.elevation_weight * e
             + cfg.contrast_weight * c)
    return GraspScore(antipodality=a, elevation=e, contrast=c, total=total)


Scorer = Callable[[GraspCandidate, RegionStats], float]


def rank_grasps(pairs: list[tuple[GraspCandidate, RegionStats]],
                config: Optional[ScorerConfig] = None,
                scorer: Optional[Scorer] = None) -> list[tuple[GraspCandidate, GraspScore]]:
    """Candidates with scores, best first; ties break toward smaller (row, col, axis_angle).

    A custom `scorer` replaces the weighted total but the component
    breakdown is still reported from the analytic cues.
    """
    scored = []
    for g, s in pairs:
        score = score_grasp(g, s, config)
        if scorer is not None:
            score = GraspScore(antipodality=score.antipodality,
                               elevation=score.elevation,
                               contrast=score.contrast,
                               total=float(scorer(g, s)))
        scored.append((g, score))
    scored.sort(key=lambda gs: (-gs[1].total, gs[0].center[0], gs[0].center[1],
                                gs[0].axis_angle))
    return scored


def select_best(pairs: list[tuple[GraspCandidate, RegionStats]],
                config: Optional[ScorerConfig] = None,
                scorer: Optional[Scorer] = None) -> tuple[GraspCandidate, GraspScore]:
    """The highest-scoring candidate; raises NoGraspError on an empty list."""
    if not pairs:
        raise NoGraspError("no grasp candidates to rank")
    return rank_grasps(pairs, config, scorer)[0]


def axis_angle_degrees(g: GraspCandidate) -> float:
    """Grasp axis angle in degrees, for human-readable reports."""
    return math.degrees(g.axis_angle)
