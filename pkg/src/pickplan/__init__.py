"""Grasp and suction planning for overlapped express packages on RGB-D images.

The toolkit samples antipodal grasps from depth edges, filters them
with six depth/color threshold conditions so fingers land on empty
corner material instead of stuffed bag interiors, plans suction points
on envelopes, and drives a pick-recognize-place dispatch loop verified
against a synthetic scene generator with full ground truth.
"""

from .detection import (BarcodeObservation, BoundingBox, Detection,
                        DetectionResult, DetectorConfig, detect_packages,
                        estimate_table_depth, observe_barcode, truth_detections)
from .errors import (BehindCameraError, ConfigError, EmptyDepthError,
                     FrustumError, InvalidDepthError, IoError, NoGraspError,
                     NoSuctionError, OutOfBoundsError, PickPlanError,
                     PlacementError, ProtocolError, RegistrationError)
from .filtering import (CandidateEvaluation, FilterBreakdown, FilterReport,
                        FilterThresholds, RegionGeometry, RegionStats,
                        evaluate_candidates, filter_grasps, passes_filter,
                        region_pixels, region_stats)
from .imaging import (CameraIntrinsics, ColorImage, DEFAULT_INTRINSICS,
                      DepthImage, Point3, deproject, deproject_pixels,
                      inpaint_invalid, load_color, load_depth, load_rgbd,
                      project, rle_decode, rle_encode, save_color, save_depth)
from .pipeline import (Action, ActionKind, EndEffector, PipelineConfig,
                       PipelineState, build_report, initial_state, run, step,
                       verify_protocol)
from .ranking import (GraspScore, ScorerConfig, rank_grasps, score_grasp,
                      select_best)
from .sampling import (EdgeMap, GraspCandidate, SamplerConfig, depth_edges,
                       grasp_axis_pixels, sample_antipodal)
from .scenes import (PackageKind, SceneObject, SceneSpec, SceneTruth,
                     WorkspaceBounds, flip_barcode, load_scene, load_truth,
                     pair_overlap_fraction, polygon_contains, random_scene,
                     remove_object, render_scene, save_scene, save_truth)
from .suction import (SuctionCandidate, SuctionConfig, fit_plane,
                      sample_suction, suction_candidates)

__version__ = "0.1.0"
