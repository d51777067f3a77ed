"""Shared builders and independent oracles used across the test modules.

Oracles here are written in plain-loop style on purpose so they share
no code path with the vectorized implementations they check.
"""

from __future__ import annotations

import math

import numpy as np

from pickplan import (ColorImage, DepthImage, FilterThresholds, GraspCandidate,
                      RegionGeometry, RegionStats)

LUMA = (0.299, 0.587, 0.114)


def flat_images(height: int = 120, width: int = 160, depth_m: float = 1.0,
                gray: int = 120) -> tuple[ColorImage, DepthImage]:
    depth = DepthImage.from_array(np.full((height, width), depth_m, dtype=np.float64))
    color = ColorImage.from_array(np.full((height, width, 3), gray, dtype=np.uint8))
    return color, depth


def plateau_images(height: int = 120, width: int = 160, depth_m: float = 1.0,
                   top_m: float = 0.97, half: int = 20,
                   center: tuple[int, int] | None = None,
                   ) -> tuple[ColorImage, DepthImage]:
    """A raised square plateau on a flat table, noiseless."""
    r0, c0 = center or (height // 2, width // 2)
    d = np.full((height, width), depth_m, dtype=np.float64)
    d[r0 - half:r0 + half, c0 - half:c0 + half] = top_m
    color = np.full((height, width, 3), 90, dtype=np.uint8)
    color[r0 - half:r0 + half, c0 - half:c0 + half] = 200
    return ColorImage.from_array(color), DepthImage.from_array(d)


def tilted_plane_depth(slope_x: float, k=None, z0: float = 1.0,
                       height: int = 480, width: int = 640) -> DepthImage:
    """Depth image whose deprojected surface is the plane z = z0 + slope_x * x."""
    from pickplan import DEFAULT_INTRINSICS
    k = k or DEFAULT_INTRINSICS
    cols = np.arange(width, dtype=np.float64)
    denom = 1.0 - slope_x * (cols - k.cx) / k.fx
    z = z0 / denom
    return DepthImage.from_array(np.tile(z, (height, 1)))


def candidate_from_jaws(j1, j2, d0: float = 1.0,
                        grad1=None, grad2=None) -> GraspCandidate:
    """Build a valid candidate from two jaw pixels, jaw order canonicalized."""
    a, b = sorted([tuple(j1), tuple(j2)])
    dr, dc = b[0] - a[0], b[1] - a[1]
    sep = math.hypot(dr, dc)
    ang = math.atan2(dr, dc)  # lexicographic order keeps this in [0, pi)
    center = (int(np.rint((a[0] + b[0]) / 2.0)), int(np.rint((a[1] + b[1]) / 2.0)))
    return GraspCandidate(center=center, axis_angle=ang, jaw1=a, jaw2=b, d0=d0,
                          jaw_separation_px=sep, jaw_separation_m=sep * d0 / 600.0,
                          grad1=grad1, grad2=grad2)


def region_pixels_oracle(g: GraspCandidate, geom: RegionGeometry) -> np.ndarray:
    """Loop-and-set re-derivation of the swept rectangle's pixel list."""
    u_r, u_c = g.axis_vector
    w_r, w_c = u_c, -u_r
    n_along = max(1, int(np.rint(g.jaw_separation_px)))
    pts = set()
    for i in range(n_along):
        a = i - (n_along - 1) / 2.0
        for j in range(geom.rect_height_px):
            b = j - (geom.rect_height_px - 1) / 2.0
            r = np.rint(g.center[0] + a * u_r + b * w_r)
            c = np.rint(g.center[1] + a * u_c + b * w_c)
            pts.add((int(r), int(c)))
    return np.array(sorted(pts), dtype=np.int64)


def region_stats_oracle(depth: DepthImage, color: ColorImage,
                        g: GraspCandidate, geom: RegionGeometry) -> dict:
    """Recompute every statistic from scratch over loop-built pixel sets."""
    region = region_pixels_oracle(g, geom)
    half = geom.jaw_window_px // 2

    def window(center):
        out = []
        for r in range(center[0] - half, center[0] + half + 1):
            for c in range(center[1] - half, center[1] + half + 1):
                out.append((r, c))
        return out

    def gather_depth(px):
        return np.array([depth.data[r, c] for r, c in px], dtype=np.float64)

    def gather_color(px):
        return np.array([color.data[r, c] for r, c in px], dtype=np.float64)

    w1, w2 = window(g.jaw1), window(g.jaw2)
    rd = gather_depth([tuple(p) for p in region])
    rc = gather_color([tuple(p) for p in region])
    lum = LUMA[0] * rc[:, 0] + LUMA[1] * rc[:, 1] + LUMA[2] * rc[:, 2]
    return {
        "d1": float(np.mean(gather_depth(w1))),
        "d2": float(np.mean(gather_depth(w2))),
        "mu_d": float(np.mean(rd)),
        "sigma_d": float(np.std(rd)),
        "d_max": float(np.max(rd)),
        "d_min": float(np.min(rd)),
        "c1": tuple(float(x) for x in np.mean(gather_color(w1), axis=0)),
        "c2": tuple(float(x) for x in np.mean(gather_color(w2), axis=0)),
        "mu_c": tuple(float(x) for x in np.mean(rc, axis=0)),
        "sigma_c": float(np.std(lum)),
    }


def passes_oracle(s: RegionStats, t: FilterThresholds,
                  signed: bool = False) -> dict[str, bool]:
    """Literal nested-comparison restatement of the five conditions."""
    ok1 = (s.d1 > s.d0 + t.eps1) and (s.d2 > s.d0 + t.eps1)
    ok2 = (s.d_max - s.d_min) > t.eps2
    ok3 = (s.mu_d > s.d0 + t.eps3) and (s.sigma_d > t.eps4)
    ok4 = s.sigma_c > t.eps5
    diff = ((s.c1[0] - s.c2[0]) + (s.c1[1] - s.c2[1]) + (s.c1[2] - s.c2[2])) / 3.0
    if not signed:
        diff = abs(diff)
    ok5 = diff > t.eps6
    return {
        "jaw_elevation": ok1,
        "region_relief": ok2,
        "center_prominence": ok3,
        "color_spread": ok4,
        "jaw_color_difference": ok5,
    }


def random_stats(rng: np.random.Generator) -> RegionStats:
    """Random but self-consistent statistics, biased toward threshold edges."""
    d0 = float(rng.uniform(0.5, 1.5))
    lo = float(rng.uniform(0.5, 1.5))
    hi = lo + float(rng.uniform(0.0, 0.05))
    mu = float(rng.uniform(lo, hi))
    near = rng.random() < 0.5

    def depth_near(base):
        return base + float(rng.uniform(-0.004, 0.004)) if near \
            else float(rng.uniform(0.5, 1.5))

    c_far = tuple(float(rng.uniform(0, 255)) for _ in range(3))
    c_near = tuple(min(255.0, max(0.0, v + float(rng.uniform(-60, 60))))
                   for v in c_far)
    return RegionStats(
        d1=depth_near(d0 + 0.01),
        d2=depth_near(d0 + 0.01),
        d0=d0,
        mu_d=mu,
        sigma_d=float(rng.uniform(0, 0.03)),
        d_max=hi,
        d_min=lo,
        c1=c_far,
        c2=c_near,
        mu_c=tuple(float(rng.uniform(0, 255)) for _ in range(3)),
        sigma_c=float(rng.uniform(0, 70)),
    )


def random_thresholds(rng: np.random.Generator) -> FilterThresholds:
    return FilterThresholds(
        eps1=float(rng.uniform(0, 0.02)),
        eps2=float(rng.uniform(0, 0.02)),
        eps3=float(rng.uniform(0, 0.02)),
        eps4=float(rng.uniform(0, 0.02)),
        eps5=float(rng.uniform(0, 60)),
        eps6=float(rng.uniform(0, 100)),
    )


def make_stats(**kw) -> RegionStats:
    """RegionStats with sane defaults, overridable per field."""
    base = dict(d1=1.02, d2=1.02, d0=1.0, mu_d=1.03, sigma_d=0.02,
                d_max=1.05, d_min=1.0, c1=(200.0, 200.0, 200.0),
                c2=(40.0, 40.0, 40.0), mu_c=(120.0, 120.0, 120.0),
                sigma_c=45.0)
    base.update(kw)
    return RegionStats(**base)
