#!/usr/bin/env python3
"""Corner-selectivity study: scale the depth thresholds and watch where
grasps land.

For each scale factor the depth-based thresholds (jaw elevation, region
relief, center prominence) are multiplied together while the color
thresholds stay fixed. Each row reports how many candidates survive and
what fraction of survivors sit on an annotated corner region versus
crossing the central lump. The unfiltered top-k ranking is included as
the baseline every row should beat.

Usage:
    python3 scripts/run_corner_study.py --scenes 25 --scales 0.5 1.0 2.0
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from pickplan import (DEFAULT_INTRINSICS, FilterThresholds, RegionGeometry,
                      SamplerConfig, SceneSpec, ScorerConfig,
                      evaluate_candidates, grasp_axis_pixels, inpaint_invalid,
                      polygon_contains, random_scene, rank_grasps,
                      sample_antipodal)


def scaled_thresholds(base: FilterThresholds, scale: float) -> FilterThresholds:
    return FilterThresholds(eps1=base.eps1 * scale, eps2=base.eps2 * scale,
                            eps3=base.eps3 * scale, eps4=base.eps4 * scale,
                            eps5=base.eps5, eps6=base.eps6)


def grasp_location(grasp, truth, check_axis: bool) -> str:
    """Classify a grasp as corner, lump, or elsewhere on the pile."""
    row, col = grasp.center
    for polygons in truth.corner_regions:
        if polygons is None:
            continue
        for poly in polygons:
            if polygon_contains(poly, row, col):
                return "corner"
    for mask in truth.lump_masks:
        if mask is None:
            continue
        if check_axis:
            pixels = grasp_axis_pixels(grasp)
            if mask[pixels[:, 0], pixels[:, 1]].any():
                return "lump"
        elif mask[row, col]:
            return "lump"
    return "other"


def run_study(args: argparse.Namespace) -> dict:
    geometry = RegionGeometry()
    base = FilterThresholds()
    scenes = []
    start = time.perf_counter()
    for i in range(args.scenes):
        seed = args.seed + i
        objects = random_scene(1, 0, rng_seed=seed)
        spec = SceneSpec(objects=tuple(objects), rng_seed=seed + 1000)
        color, depth, truth = spec.render()
        depth = inpaint_invalid(depth)
        candidates = sample_antipodal(depth, DEFAULT_INTRINSICS,
                                      SamplerConfig(rng_seed=seed))
        scenes.append((candidates, depth, color, truth))
    render_s = time.perf_counter() - start

    rows = []
    for scale in args.scales:
        thresholds = scaled_thresholds(base, scale)
        kept = corner = lump = 0
        for candidates, depth, color, truth in scenes:
            report = evaluate_candidates(candidates, depth, color, geometry,
                                         thresholds)
            kept += len(report.kept)
            for grasp in report.kept:
                where = grasp_location(grasp, truth, check_axis=False)
                corner += where == "corner"
                lump += where == "lump"
        rows.append({"scale": scale, "kept": kept,
                     "corner_rate": corner / kept if kept else None,
                     "lump_rate": lump / kept if kept else None})

    baseline_top = baseline_lump = 0
    for candidates, depth, color, truth in scenes:
        report = evaluate_candidates(candidates, depth, color, geometry, base)
        pairs = [(ev.candidate, ev.stats) for ev in report.evaluations
                 if ev.stats is not None]
        ranked = rank_grasps(pairs, ScorerConfig())
        for grasp, _ in ranked[:args.top_k]:
            baseline_top += 1
            baseline_lump += grasp_location(grasp, truth,
                                            check_axis=True) == "lump"

    return {
        "scenes": args.scenes,
        "seed": args.seed,
        "top_k": args.top_k,
        "render_seconds": round(render_s, 2),
        "rows": rows,
        "unfiltered_baseline": {
            "top_grasps": baseline_top,
            "lump_rate": baseline_lump / baseline_top if baseline_top else None,
        },
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenes", type=int, default=25)
    parser.add_argument("--seed", type=int, default=300)
    parser.add_argument("--top-k", type=int, default=10)
    parser.add_argument("--scales", type=float, nargs="+",
                        default=[0.25, 0.5, 1.0, 2.0, 4.0])
    parser.add_argument("-o", "--out", type=Path, default=None,
                        help="optional JSON output path")
    args = parser.parse_args(argv)

    result = run_study(args)
    print(f"{args.scenes} scenes rendered in {result['render_seconds']}s")
    print(f"{'scale':>6} {'kept':>6} {'corner':>8} {'lump':>8}")
    for row in result["rows"]:
        corner = "-" if row["corner_rate"] is None else f"{row['corner_rate']:.3f}"
        lump = "-" if row["lump_rate"] is None else f"{row['lump_rate']:.3f}"
        print(f"{row['scale']:>6.2f} {row['kept']:>6} {corner:>8} {lump:>8}")
    baseline = result["unfiltered_baseline"]
    if baseline["lump_rate"] is not None:
        print(f"unfiltered top-{args.top_k} lump rate: "
              f"{baseline['lump_rate']:.3f} over {baseline['top_grasps']} grasps")
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
