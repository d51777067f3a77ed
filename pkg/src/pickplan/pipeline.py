"""Pick-recognize-place dispatch over synthetic scenes.

Each cycle re-perceives the pile, picks the topmost package with the
end effector its class calls for (gripper for bags, suction cup for
envelopes), checks the barcode side, reverses the package when the
barcode faces down, and places it. Perception renders the current
scene state, so picked objects vanish from later cycles. A failed plan
earns one re-perception before the object is abandoned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import ndimage

from .detection import (Detection, DetectionResult, DetectorConfig,
                        detect_packages, observe_barcode, truth_detections)
from .errors import NoGraspError, NoSuctionError
from .filtering import FilterThresholds, RegionGeometry, evaluate_candidates
from .imaging import (CameraIntrinsics, ColorImage, DEFAULT_INTRINSICS,
                      DepthImage, inpaint_invalid)
from .ranking import ScorerConfig, select_best
from .sampling import SamplerConfig, sample_antipodal
from .scenes import (DEFAULT_NOISE_SIGMA_M, DEFAULT_TABLE_DEPTH_M, PackageKind,
                     SceneObject, SceneTruth, render_scene)
from .suction import SuctionConfig, sample_suction

logger = logging.getLogger(__name__)

JAW_ROI_DILATION_PX = 6  # jaws close from just outside the package footprint


class ActionKind(str, Enum):
    DETECT = "Detect"
    PICK_GRASP = "PickGrasp"
    PICK_SUCTION = "PickSuction"
    BARCODE_CHECK = "BarcodeCheck"
    REVERSE = "Reverse"
    PLACE = "Place"
    ABORT = "Abort"


class EndEffector(str, Enum):
    GRIPPER = "gripper"
    SUCTION = "suction"


PICK_KINDS = (ActionKind.PICK_GRASP, ActionKind.PICK_SUCTION)


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    target: Optional[int]
    tick: int

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "target": self.target, "tick": self.tick}


@dataclass(frozen=True)
class PipelineConfig:
    intrinsics: CameraIntrinsics = field(default_factory=lambda: DEFAULT_INTRINSICS)
    table_depth: float = DEFAULT_TABLE_DEPTH_M
    noise_sigma: float = DEFAULT_NOISE_SIGMA_M
    rng_seed: int = 0
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    thresholds: FilterThresholds = field(default_factory=FilterThresholds)
    geometry: RegionGeometry = field(default_factory=RegionGeometry)
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    suction: SuctionConfig = field(default_factory=SuctionConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    use_truth_detector: bool = False
    pick_failure_prob: float = 0.0
    max_replans: int = 1
    collect_frames: bool = False


@dataclass
class PipelineState:
    objects: list[SceneObject]
    initial_count: int
    color: Optional[ColorImage] = None
    depth: Optional[DepthImage] = None
    truth: Optional[SceneTruth] = None
    held: Optional[int] = None
    end_effector_mode: Optional[EndEffector] = None
    action_log: list[Action] = field(default_factory=list)
    placed: list[int] = field(default_factory=list)
    aborted: set[int] = field(default_factory=set)
    next_tick: int = 0
    perception_count: int = 0
    cycle_reports: list[dict] = field(default_factory=list)
    frames: list[ColorImage] = field(default_factory=list)
    pick_rng: Optional[np.random.Generator] = None

    def active_count(self) -> int:
        """Objects still on the table and not abandoned."""
        return len(self.objects) - len(self.aborted)

    def log(self, kind: ActionKind, target: Optional[int] = None) -> Action:
        action = Action(kind=kind, target=target, tick=self.next_tick)
        self.action_log.append(action)
        self.next_tick += 1
        return action


def initial_state(objects: list[SceneObject], config: PipelineConfig) -> PipelineState:
    return PipelineState(
        objects=list(objects),
        initial_count=len(objects),
        pick_rng=np.random.default_rng(np.random.SeedSequence([config.rng_seed, 7777])),
    )


def _perception_seed(config: PipelineConfig, index: int) -> int:
    return int(np.random.SeedSequence([config.rng_seed, index]).generate_state(1)[0])


def _perceive(state: PipelineState, config: PipelineConfig) -> DetectionResult:
    """Render the current pile, log Detect, and run the detector."""
    seed = _perception_seed(config, state.perception_count)
    state.perception_count += 1
    state.color, state.depth, state.truth = render_scene(
        state.objects, config.intrinsics, noise_sigma=config.noise_sigma,
        rng_seed=seed, table_depth=config.table_depth)
    state.log(ActionKind.DETECT)
    if config.use_truth_detector:
        return truth_detections(state.truth, state.depth, config.detector)
    return detect_packages(state.color, state.depth, config.detector)


def _detection_object(det: Detection, truth: SceneTruth) -> Optional[int]:
    """Truth object with the largest pixel overlap with this detection."""
    best_id = None
    best_overlap = 0
    region = det.mask
    for obj, mask in zip(truth.objects, truth.masks):
        if region is not None:
            overlap = int(np.count_nonzero(region & mask))
        else:
            sub = mask[det.bbox.min_row:det.bbox.max_row + 1,
                       det.bbox.min_col:det.bbox.max_col + 1]
            overlap = int(np.count_nonzero(sub))
        if overlap > best_overlap:
            best_overlap = overlap
            best_id = obj.id
    return best_id


def _select_target(result: DetectionResult, state: PipelineState,
                   ) -> Optional[tuple[Detection, int]]:
    """Topmost detection (smallest median depth) mapped to a live object."""
    selectable = []
    for det in result.detections:
        obj_id = _detection_object(det, state.truth)
        if obj_id is None or obj_id in state.aborted:
            continue
        selectable.append((det, obj_id))
    if not selectable:
        return None
    selectable.sort(key=lambda pair: (pair[0].median_depth_m,
                                      pair[0].bbox.min_row, pair[0].bbox.min_col))
    return selectable[0]


def _plan_pick(state: PipelineState, config: PipelineConfig,
               det: Detection) -> tuple[ActionKind, int, dict]:
    """Plan a pick on the selected detection.

    Raises NoGraspError/NoSuctionError when planning fails; also treats
    a plan landing on the wrong class (possible when components merge)
    as a failure, because dispatch must not run the gripper into an
    envelope or the cup onto a bag.
    """
    depth = inpaint_invalid(state.depth)
    if det.kind is PackageKind.BAG:
        roi = None
        if det.mask is not None:
            roi = ndimage.binary_dilation(det.mask,
                                          iterations=JAW_ROI_DILATION_PX)
        candidates = sample_antipodal(depth, config.intrinsics, config.sampler,
                                      mask=roi)
        if det.mask is not None:
            candidates = [g for g in candidates if det.mask[g.center[0], g.center[1]]]
        else:
            candidates = [g for g in candidates if det.bbox.contains(*g.center)]
        report = evaluate_candidates(candidates, depth, state.color,
                                     config.geometry, config.thresholds)
        pairs = [(ev.candidate, ev.stats) for ev in report.evaluations if ev.passed]
        if not pairs:
            raise NoGraspError(
                f"no grasp survived the filter"
                f" (most violated: {report.most_violated_condition()})")
        best, score = select_best(pairs, config.scorer)
        picked = state.truth.visible_object_at(best.center[0], best.center[1])
        if picked is None or state.truth.object_by_id(picked).kind is not PackageKind.BAG:
            raise NoGraspError("best grasp does not land on a bag surface")
        plan = {
            "grasp": best.to_dict(),
            "score": score.to_dict(),
            "candidates_sampled": len(candidates),
            "candidates_filtered": len(pairs),
        }
        return ActionKind.PICK_GRASP, picked, plan
    candidate = sample_suction(depth, config.intrinsics, det.bbox,
                               config.suction, det.mask)
    picked = state.truth.visible_object_at(candidate.pixel[0], candidate.pixel[1])
    if picked is None \
            or state.truth.object_by_id(picked).kind is not PackageKind.ENVELOPE:
        raise NoSuctionError("best suction point does not land on an envelope surface")
    return ActionKind.PICK_SUCTION, picked, {"suction": candidate.to_dict()}


def step(state: PipelineState, config: PipelineConfig) -> PipelineState:
    """Run one full protocol cycle, mutating and returning the state.

    A cycle is Detect through Place for one object; planning failures
    earn max_replans re-perceptions and then an Abort. A cycle that
    detects nothing actionable logs only the Detect.
    """
    cycle: dict = {"actions_before": len(state.action_log)}
    attempts = 0
    while True:
        result = _perceive(state, config)
        if config.collect_frames:
            state.frames.append(state.color)
        selected = _select_target(result, state)
        if selected is None:
            cycle["outcome"] = "nothing_detected"
            cycle["detections"] = len(result.detections)
            state.cycle_reports.append(cycle)
            return state
        det, mapped_id = selected
        cycle["detections"] = len(result.detections)
        cycle["selected_kind"] = det.kind.value
        cycle["selected_bbox"] = det.bbox.to_list()
        try:
            pick_kind, picked_id, plan = _plan_pick(state, config, det)
            break
        except (NoGraspError, NoSuctionError) as exc:
            attempts += 1
            logger.info("plan attempt %d failed: %s", attempts, exc)
            cycle.setdefault("failures", []).append(str(exc))
            if attempts > config.max_replans:
                state.log(ActionKind.ABORT, mapped_id)
                state.aborted.add(mapped_id)
                cycle["outcome"] = "aborted"
                cycle["target"] = mapped_id
                state.cycle_reports.append(cycle)
                return state

    mode = EndEffector.GRIPPER if pick_kind is ActionKind.PICK_GRASP else EndEffector.SUCTION
    truth_at_pick = state.truth
    state.log(pick_kind, picked_id)
    state.end_effector_mode = mode
    if config.pick_failure_prob > 0 \
            and state.pick_rng.random() < config.pick_failure_prob:
        state.log(ActionKind.ABORT, picked_id)
        state.aborted.add(picked_id)
        cycle["outcome"] = "pick_failed"
        cycle["target"] = picked_id
        state.cycle_reports.append(cycle)
        return state
    state.held = picked_id
    state.objects = [o for o in state.objects if o.id != picked_id]

    observation = observe_barcode(truth_at_pick, state.held)
    state.log(ActionKind.BARCODE_CHECK, picked_id)
    reversed_ = False
    if not observation.present:
        state.log(ActionKind.REVERSE, picked_id)
        reversed_ = True
    state.log(ActionKind.PLACE, picked_id)
    state.placed.append(picked_id)
    state.held = None

    cycle["outcome"] = "placed"
    cycle["target"] = picked_id
    cycle["mode"] = mode.value
    cycle["plan"] = plan
    cycle["reversed"] = reversed_
    state.cycle_reports.append(cycle)
    return state


def run(objects: list[SceneObject], config: Optional[PipelineConfig] = None,
        ) -> tuple[PipelineState, dict]:
    """Iterate cycles until the pile is cleared or nothing is actionable."""
    config = config or PipelineConfig()
    state = initial_state(objects, config)
    max_cycles = 3 * max(1, state.initial_count) + 5
    for _ in range(max_cycles):
        if state.action_log and state.active_count() == 0:
            break
        before = len(state.action_log)
        step(state, config)
        new = state.action_log[before:]
        actionable = any(a.kind in PICK_KINDS or a.kind is ActionKind.ABORT for a in new)
        if not actionable:
            break
    return state, build_report(state, config)


def build_report(state: PipelineState, config: PipelineConfig) -> dict:
    kinds = [a.kind for a in state.action_log]
    ok, reason = verify_protocol(kinds)
    return {
        "initial_objects": state.initial_count,
        "placed": list(state.placed),
        "aborted": sorted(state.aborted),
        "remaining": sorted(o.id for o in state.objects if o.id not in state.aborted),
        "picks_attempted": sum(1 for k in kinds if k in PICK_KINDS),
        "reversals": sum(1 for k in kinds if k is ActionKind.REVERSE),
        "all_placed": len(state.placed) == state.initial_count,
        "protocol_ok": ok,
        "protocol_reason": reason,
        "actions": [a.to_dict() for a in state.action_log],
        "cycles": state.cycle_reports,
        "rng_seed": config.rng_seed,
    }


def verify_protocol(kinds: list[ActionKind]) -> tuple[bool, str]:
    """Check the action grammar.

    Grammar per cycle: Detect+ then either a pick resolved by
    BarcodeCheck [Reverse] Place, a pick aborted by a lift failure, or
    an Abort after failed planning; a trailing bare Detect is the
    empty-pile terminal. Extra Detects before a pick are re-perception
    retries.
    """
    i = 0
    n = len(kinds)
    while i < n:
        if kinds[i] is not ActionKind.DETECT:
            return False, f"cycle must start with Detect at tick {i}"
        while i < n and kinds[i] is ActionKind.DETECT:
            i += 1
        if i >= n:
            return True, "ok"
        if kinds[i] is ActionKind.ABORT:
            i += 1
            continue
        if kinds[i] in PICK_KINDS:
            i += 1
            if i < n and kinds[i] is ActionKind.ABORT:
                i += 1
                continue
            if i >= n or kinds[i] is not ActionKind.BARCODE_CHECK:
                return False, f"pick must be followed by BarcodeCheck at tick {i}"
            i += 1
            if i < n and kinds[i] is ActionKind.REVERSE:
                i += 1
            if i >= n or kinds[i] is not ActionKind.PLACE:
                return False, f"barcode check must resolve with Place at tick {i}"
            i += 1
            continue
        return False, f"unexpected {kinds[i].value} at tick {i}"
    return True, "ok"
