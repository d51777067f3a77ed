"""Command-line front end.

Subcommands cover the full workflow: synthesize scene bundles, plan
grasps and suction points on them, run the baseline detector, execute
the dispatch pipeline, and compare filtered against unfiltered grasp
sampling over a corpus. Exit codes: 0 success, 2 usage or config
error, 3 no plan found, 4 pipeline finished without placing
everything.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .config import (ToolkitConfig, load_toolkit_config, toolkit_config_dict)
from .detection import BoundingBox, detect_packages
from .errors import ConfigError, NoSuctionError, PickPlanError
from .filtering import evaluate_candidates
from .imaging import (CameraIntrinsics, ColorImage, DEFAULT_INTRINSICS,
                      DepthImage, inpaint_invalid, load_rgbd, save_color,
                      save_depth)
from .overlay import (detection_overlay, grasp_overlay, suction_overlay)
from .pipeline import JAW_ROI_DILATION_PX, PipelineConfig, run as run_pipeline
from .ranking import rank_grasps
from .sampling import grasp_axis_pixels, sample_antipodal
from .scenes import (SceneSpec, SceneTruth, load_scene, polygon_contains,
                     random_scene, render_scene, save_scene, save_truth)
from .suction import sample_suction, suction_candidates

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_PLAN = 3
EXIT_INCOMPLETE = 4


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2 ** 31))
    print(f"seed: {seed}")
    return seed


def _write_json(path: Path, payload: dict, schema: Optional[str] = None) -> None:
    if schema is not None:
        _validate_against_schema(schema, payload)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _validate_against_schema(name: str, payload: dict) -> None:
    """Best-effort schema check; jsonschema is an optional extra."""
    try:
        import jsonschema
    except ImportError:
        return
    schema_path = Path(__file__).parent / "schemas" / f"{name}.json"
    jsonschema.validate(payload, json.loads(schema_path.read_text()))


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="TOML or JSON config file; flags override it")
    g = parser.add_argument_group("threshold overrides")
    for i in range(1, 7):
        g.add_argument(f"--eps{i}", type=float, default=None)
    g.add_argument("--signed-color-diff", action="store_true",
                   help="use the signed jaw color difference instead of |mean|")
    g.add_argument("--friction", type=float, default=None)
    g.add_argument("--gradient-threshold", type=float, default=None)
    g.add_argument("--max-gripper-width", type=float, default=None)
    g.add_argument("--max-candidates", type=int, default=None)
    g.add_argument("--rect-height", type=int, default=None)
    g.add_argument("--jaw-window", type=int, default=None)
    g.add_argument("--min-area", type=int, default=None)
    g.add_argument("--fg-margin", type=float, default=None)
    g.add_argument("--envelope-max-height", type=float, default=None)
    g.add_argument("--max-rms", type=float, default=None)
    g.add_argument("--max-tilt-deg", type=float, default=None)
    g.add_argument("--suction-samples", type=int, default=None)
    g.add_argument("--noise-sigma", type=float, default=None)
    g.add_argument("--table-depth", type=float, default=None)
    g.add_argument("--pick-failure-prob", type=float, default=None)
    g.add_argument("--use-truth-detector", action="store_true")


def _overrides_from_args(args: argparse.Namespace) -> dict[str, dict]:
    overrides: dict[str, dict] = {
        "sampler": {
            "friction_coefficient": args.friction,
            "gradient_threshold": args.gradient_threshold,
            "max_gripper_width": args.max_gripper_width,
            "max_candidates": args.max_candidates,
        },
        "filter": {f"eps{i}": getattr(args, f"eps{i}") for i in range(1, 7)},
        "geometry": {
            "rect_height_px": args.rect_height,
            "jaw_window_px": args.jaw_window,
        },
        "detector": {
            "min_area": args.min_area,
            "fg_margin_m": args.fg_margin,
            "envelope_max_height_m": args.envelope_max_height,
        },
        "suction": {
            "max_rms": args.max_rms,
            "max_tilt": math.radians(args.max_tilt_deg) if args.max_tilt_deg is not None else None,
            "n_samples": args.suction_samples,
        },
        "scene": {
            "noise_sigma_m": args.noise_sigma,
            "table_depth_m": args.table_depth,
        },
        "pipeline": {
            "pick_failure_prob": args.pick_failure_prob,
        },
    }
    if args.signed_color_diff:
        overrides["filter"]["signed_color_diff"] = True
    if args.use_truth_detector:
        overrides["pipeline"]["use_truth_detector"] = True
    return overrides


def _toolkit_from_args(args: argparse.Namespace) -> ToolkitConfig:
    return load_toolkit_config(args.config, _overrides_from_args(args))


def _load_intrinsics(args: argparse.Namespace,
                     spec: Optional[SceneSpec]) -> CameraIntrinsics:
    if getattr(args, "intrinsics", None):
        return CameraIntrinsics.from_json(args.intrinsics)
    if spec is not None:
        return spec.intrinsics
    return DEFAULT_INTRINSICS


def _load_bundle(args: argparse.Namespace,
                 ) -> tuple[ColorImage, DepthImage, CameraIntrinsics,
                            Optional[SceneSpec], Optional[SceneTruth]]:
    bundle = Path(args.input)
    color, depth = load_rgbd(bundle / "color.png", bundle / "depth.png")
    spec = None
    scene_path = bundle / "scene.json"
    if scene_path.exists():
        spec = load_scene(scene_path)
    truth = None
    truth_path = bundle / "truth.json"
    if truth_path.exists():
        from .scenes import load_truth
        truth = load_truth(truth_path)
    return color, depth, _load_intrinsics(args, spec), spec, truth


def cmd_gen_scene(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    seed = _resolve_seed(args.seed)
    k = CameraIntrinsics.from_json(args.intrinsics) if args.intrinsics else DEFAULT_INTRINSICS
    objects = random_scene(args.bags, args.envelopes, seed)
    spec = SceneSpec(objects=tuple(objects), intrinsics=k,
                     noise_sigma=toolkit.scene.noise_sigma_m,
                     rng_seed=seed + 1,
                     table_depth=toolkit.scene.table_depth_m)
    color, depth, truth = spec.render()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_color(color, out / "color.png")
    save_depth(depth, out / "depth.png")
    _write_json(out / "scene.json", spec.to_json_dict(), schema="scene")
    _write_json(out / "truth.json", truth.to_json_dict(), schema="truth")
    print(f"wrote scene bundle with {len(objects)} objects to {out}")
    return EXIT_OK


def _topmost_bag_roi(args: argparse.Namespace, toolkit: ToolkitConfig,
                     color: ColorImage, depth: DepthImage):
    """Dilated mask of the topmost detected bag, or None to sample globally."""
    if args.global_sampling:
        return None, None
    result = detect_packages(color, depth, toolkit.detector)
    bags = [d for d in result.detections
            if d.kind.value == "bag" and d.mask is not None]
    if not bags:
        return None, None
    bags.sort(key=lambda d: (d.median_depth_m, d.bbox.min_row, d.bbox.min_col))
    top = bags[0]
    from scipy import ndimage
    return ndimage.binary_dilation(top.mask, iterations=JAW_ROI_DILATION_PX), top


def _plan_grasp_payload(args: argparse.Namespace, toolkit: ToolkitConfig,
                        color: ColorImage, depth: DepthImage,
                        k: CameraIntrinsics, seed: int) -> tuple[dict, list, list, object]:
    sampler = toolkit.sampler
    sampler = type(sampler)(**{**sampler.__dict__, "rng_seed": seed})
    depth = inpaint_invalid(depth)
    roi, roi_detection = _topmost_bag_roi(args, toolkit, color, depth)
    candidates = sample_antipodal(depth, k, sampler, mask=roi)
    report = evaluate_candidates(candidates, depth, color, toolkit.geometry,
                                 toolkit.filter.thresholds,
                                 signed_color_diff=toolkit.filter.signed_color_diff)
    if args.no_filter:
        pairs = [(ev.candidate, ev.stats) for ev in report.evaluations
                 if ev.stats is not None]
    else:
        pairs = [(ev.candidate, ev.stats) for ev in report.evaluations if ev.passed]
    ranked = rank_grasps(pairs, toolkit.scorer)
    selected = ranked[0] if ranked else None

    index_of = {id(ev.candidate): i for i, ev in enumerate(report.evaluations)}
    payload = {
        "seed": seed,
        "no_filter": bool(args.no_filter),
        "signed_color_diff": toolkit.filter.signed_color_diff,
        "roi_detection": None if roi_detection is None else {
            "bbox": roi_detection.bbox.to_list(),
            "kind": roi_detection.kind.value,
            "area_px": roi_detection.area_px,
            "median_depth_m": roi_detection.median_depth_m,
        },
        "thresholds": toolkit.filter.thresholds.to_dict(),
        "candidates": [ev.to_dict() for ev in report.evaluations],
        "kept_count": len(report.kept),
        "out_of_bounds": report.out_of_bounds,
        "most_violated_condition": report.most_violated_condition(),
        "ranked": [
            {"candidate_index": index_of[id(g)], "score": s.to_dict()}
            for g, s in ranked
        ],
        "selected": None if selected is None else {
            "candidate": selected[0].to_dict(),
            "score": selected[1].to_dict(),
        },
    }
    kept = report.kept
    rejected = [ev.candidate for ev in report.evaluations if not ev.passed]
    return payload, kept, rejected, selected


def cmd_plan_grasp(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    seed = _resolve_seed(args.seed)
    color, depth, k, _, _ = _load_bundle(args)
    payload, kept, rejected, selected = _plan_grasp_payload(
        args, toolkit, color, depth, k, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "plans.json", payload, schema="plans")
    image = grasp_overlay(color, kept, rejected,
                          selected[0] if selected else None)
    save_color(image, out / "overlay.png")
    if selected is None:
        print("no grasp plan: "
              f"most violated condition = {payload['most_violated_condition']}",
              file=sys.stderr)
        return EXIT_NO_PLAN
    print(f"selected grasp at {selected[0].center} "
          f"score {selected[1].total:.3f} ({len(kept)} survivors)")
    return EXIT_OK


def _parse_bbox(text: str) -> BoundingBox:
    try:
        r0, c0, r1, c1 = (int(v) for v in text.split(","))
        return BoundingBox(min_row=r0, min_col=c0, max_row=r1, max_col=c1)
    except ValueError as exc:
        raise ConfigError(f"bad bbox spec {text!r}, want min_row,min_col,max_row,max_col") from exc


def cmd_plan_suction(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    seed = _resolve_seed(args.seed)
    color, depth, k, _, _ = _load_bundle(args)
    depth = inpaint_invalid(depth)
    suction_cfg = type(toolkit.suction)(**{**toolkit.suction.__dict__, "rng_seed": seed})

    mask = None
    detection_dict = None
    if args.bbox:
        bbox = _parse_bbox(args.bbox)
    else:
        result = detect_packages(color, depth, toolkit.detector)
        envelopes = [d for d in result.detections if d.kind.value == "envelope"]
        if not envelopes:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "suction.json", {
                "seed": seed, "selected": None, "candidates": [],
                "detection": None, "reason": "no envelope detected",
            }, schema="suction")
            print("no envelope detected", file=sys.stderr)
            return EXIT_NO_PLAN
        envelopes.sort(key=lambda d: (d.median_depth_m, d.bbox.min_row, d.bbox.min_col))
        top = envelopes[0]
        bbox = top.bbox
        mask = top.mask
        detection_dict = top.to_dict()

    candidates = suction_candidates(depth, k, bbox, suction_cfg, mask)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "seed": seed,
        "bbox": bbox.to_list(),
        "detection": detection_dict,
        "candidates": [c.to_dict() for c in candidates],
        "selected": candidates[0].to_dict() if candidates else None,
    }
    _write_json(out / "suction.json", payload, schema="suction")
    save_color(suction_overlay(color, bbox, candidates[0] if candidates else None, k),
               out / "overlay.png")
    if not candidates:
        print("no suction sample passed the planarity and tilt gates", file=sys.stderr)
        return EXIT_NO_PLAN
    best = candidates[0]
    print(f"selected suction at {best.pixel} rms {best.planarity_rms * 1000:.2f}mm "
          f"tilt {math.degrees(best.tilt):.1f}deg")
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    color, depth, _, _, _ = _load_bundle(args)
    result = detect_packages(color, inpaint_invalid(depth), toolkit.detector)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "detections.json", result.to_dict(), schema="detections")
    save_color(detection_overlay(color, result.detections), out / "overlay.png")
    print(f"{len(result.detections)} detections "
          f"(table at {result.table_depth_m:.3f} m)")
    return EXIT_OK


def cmd_run_pipeline(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    seed = _resolve_seed(args.seed)
    if args.input:
        spec = load_scene(Path(args.input) / "scene.json")
        objects = list(spec.objects)
        k = spec.intrinsics
        noise = spec.noise_sigma if args.noise_sigma is None else args.noise_sigma
        table = spec.table_depth if args.table_depth is None else args.table_depth
    else:
        objects = random_scene(args.bags, args.envelopes, seed)
        k = DEFAULT_INTRINSICS
        noise = toolkit.scene.noise_sigma_m
        table = toolkit.scene.table_depth_m

    config = PipelineConfig(
        intrinsics=k, table_depth=table, noise_sigma=noise, rng_seed=seed,
        sampler=toolkit.sampler, thresholds=toolkit.filter.thresholds,
        geometry=toolkit.geometry, scorer=toolkit.scorer,
        suction=toolkit.suction, detector=toolkit.detector,
        use_truth_detector=toolkit.pipeline.use_truth_detector,
        pick_failure_prob=toolkit.pipeline.pick_failure_prob,
        max_replans=toolkit.pipeline.max_replans,
        collect_frames=bool(args.frames),
    )
    state, report = run_pipeline(objects, config)
    report["config"] = toolkit_config_dict(toolkit)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report, schema="report")
    if args.frames:
        for i, frame in enumerate(state.frames):
            save_color(frame, out / f"frame_{i:03d}.png")
    placed = len(report["placed"])
    print(f"placed {placed}/{report['initial_objects']} "
          f"({report['reversals']} reversals, {len(report['aborted'])} aborted)")
    return EXIT_OK if report["all_placed"] else EXIT_INCOMPLETE


def _scene_metrics(truth: SceneTruth, grasps: list, check_axis: bool) -> tuple[int, int]:
    """(corner hits, lump hits) for a list of grasp candidates."""
    corner = 0
    lump = 0
    polys = [p for regions in truth.corner_regions if regions for p in regions]
    lump_masks = [m for m in truth.lump_masks if m is not None]
    for g in grasps:
        row, col = g.center
        if any(polygon_contains(p, row, col) for p in polys):
            corner += 1
        if check_axis:
            px = grasp_axis_pixels(g)
            hit = any(m[px[:, 0], px[:, 1]].any() for m in lump_masks)
        else:
            hit = any(m[row, col] for m in lump_masks)
        if hit:
            lump += 1
    return corner, lump


def cmd_compare(args: argparse.Namespace) -> int:
    toolkit = _toolkit_from_args(args)
    seed = _resolve_seed(args.seed)
    per_scene = []
    totals = {"kept": 0, "kept_corner": 0, "kept_lump": 0,
              "raw_top": 0, "raw_top_corner": 0, "raw_top_lump": 0}
    for i in range(args.scenes):
        objects = random_scene(args.bags, args.envelopes, seed + i)
        color, depth, truth = render_scene(
            objects, DEFAULT_INTRINSICS,
            noise_sigma=toolkit.scene.noise_sigma_m, rng_seed=seed + i + 1,
            table_depth=toolkit.scene.table_depth_m)
        sampler = type(toolkit.sampler)(
            **{**toolkit.sampler.__dict__, "rng_seed": seed + i})
        candidates = sample_antipodal(depth, DEFAULT_INTRINSICS, sampler)
        report = evaluate_candidates(candidates, depth, color, toolkit.geometry,
                                     toolkit.filter.thresholds,
                                     signed_color_diff=toolkit.filter.signed_color_diff)
        kept_pairs = [(ev.candidate, ev.stats) for ev in report.evaluations if ev.passed]
        raw_pairs = [(ev.candidate, ev.stats) for ev in report.evaluations
                     if ev.stats is not None]
        kept = [g for g, _ in rank_grasps(kept_pairs, toolkit.scorer)]
        raw_top = [g for g, _ in rank_grasps(raw_pairs, toolkit.scorer)[:args.top_k]]

        kc, kl = _scene_metrics(truth, kept, check_axis=False)
        rc, rl = _scene_metrics(truth, raw_top, check_axis=True)
        totals["kept"] += len(kept)
        totals["kept_corner"] += kc
        totals["kept_lump"] += kl
        totals["raw_top"] += len(raw_top)
        totals["raw_top_corner"] += rc
        totals["raw_top_lump"] += rl
        per_scene.append({
            "scene_seed": seed + i,
            "candidates": len(candidates),
            "kept": len(kept), "kept_corner": kc, "kept_lump": kl,
            "raw_top": len(raw_top), "raw_top_corner": rc, "raw_top_lump": rl,
        })

    def rate(num: int, den: int) -> Optional[float]:
        return None if den == 0 else num / den

    payload = {
        "scenes": args.scenes,
        "bags": args.bags,
        "envelopes": args.envelopes,
        "seed": seed,
        "top_k": args.top_k,
        "with_filter": {
            "grasps": totals["kept"],
            "corner_rate": rate(totals["kept_corner"], totals["kept"]),
            "lump_rate": rate(totals["kept_lump"], totals["kept"]),
        },
        "without_filter": {
            "grasps": totals["raw_top"],
            "corner_rate": rate(totals["raw_top_corner"], totals["raw_top"]),
            "lump_rate": rate(totals["raw_top_lump"], totals["raw_top"]),
        },
        "per_scene": per_scene,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "compare.json", payload, schema="compare")
    wf = payload["with_filter"]
    nf = payload["without_filter"]
    print(f"filtered: {wf['grasps']} grasps, corner rate {wf['corner_rate']}, "
          f"lump rate {wf['lump_rate']}")
    print(f"unfiltered top-{args.top_k}: {nf['grasps']} grasps, "
          f"corner rate {nf['corner_rate']}, lump rate {nf['lump_rate']}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pickplan",
        description="Grasp and suction planning on RGB-D package scenes")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-scene", help="synthesize a scene bundle")
    p.add_argument("--bags", type=int, default=0)
    p.add_argument("--envelopes", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--intrinsics", type=Path, default=None)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_gen_scene)

    p = sub.add_parser("plan-grasp", help="antipodal grasp planning on a bundle")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-filter", action="store_true",
                   help="rank raw candidates without the threshold filter")
    p.add_argument("--global-sampling", action="store_true",
                   help="sample edge pairs over the whole image instead of "
                        "scoping to the topmost detected bag")
    p.add_argument("--intrinsics", type=Path, default=None)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_plan_grasp)

    p = sub.add_parser("plan-suction", help="suction planning on a bundle")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--bbox", type=str, default=None,
                   help="min_row,min_col,max_row,max_col (skips detection)")
    p.add_argument("--intrinsics", type=Path, default=None)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_plan_suction)

    p = sub.add_parser("detect", help="baseline package detection on a bundle")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--intrinsics", type=Path, default=None)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("run-pipeline", help="run the dispatch state machine")
    p.add_argument("--in", dest="input", type=Path, default=None,
                   help="scene bundle directory (uses scene.json)")
    p.add_argument("--bags", type=int, default=0)
    p.add_argument("--envelopes", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--frames", action="store_true",
                   help="write per-cycle perception frames")
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_run_pipeline)

    p = sub.add_parser("compare", help="filter vs no-filter corpus metrics")
    p.add_argument("--scenes", type=int, default=50)
    p.add_argument("--bags", type=int, default=1)
    p.add_argument("--envelopes", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("-o", "--out", type=Path, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PLAN
    except PickPlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
