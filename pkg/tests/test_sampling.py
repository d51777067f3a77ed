"""Edge detection and antipodal pair sampling."""

import math

import numpy as np
import pytest

from helpers import flat_images, plateau_images
from pickplan import (DEFAULT_INTRINSICS, GraspCandidate, SamplerConfig,
                      depth_edges, grasp_axis_pixels, sample_antipodal)
from pickplan.sampling import ATTEMPTS_PER_CANDIDATE, MIN_JAW_SEPARATION_PX

K = DEFAULT_INTRINSICS


def step_images(width=40, height=20, left=1.0, right=0.95, split=20):
    import numpy as np
    d = np.full((height, width), left)
    d[:, split:] = right
    from pickplan import ColorImage, DepthImage
    color = ColorImage.from_array(np.full((height, width, 3), 128, dtype=np.uint8))
    return color, DepthImage.from_array(d)


class TestSamplerConfig:
    def test_defaults(self):
        cfg = SamplerConfig()
        assert cfg.gradient_threshold == 0.0025
        assert cfg.friction_coefficient == 0.5
        assert cfg.max_gripper_width == 0.14
        assert cfg.max_candidates == 500

    def test_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(friction_coefficient=0.0)
        with pytest.raises(ValueError):
            SamplerConfig(max_candidates=0)


class TestDepthEdges:
    def test_flat_has_no_edges(self):
        _, depth = flat_images()
        assert len(depth_edges(depth, SamplerConfig())) == 0

    def test_step_edge_pixels_and_directions(self):
        # a vertical step; central differences flag the two columns
        # touching the discontinuity with gradient (0, -0.025)
        _, depth = step_images(split=20)
        edges = depth_edges(depth, SamplerConfig())
        got = {tuple(p) for p in edges.pixels}
        expect = {(r, c) for r in range(20) for c in (19, 20)}
        assert got == expect
        assert np.allclose(edges.directions, [0.0, -1.0])

    def test_threshold_gates_magnitude(self):
        _, depth = step_images(left=1.0, right=1.0 - 0.004)  # |grad| = 0.002
        assert len(depth_edges(depth, SamplerConfig())) == 0
        cfg = SamplerConfig(gradient_threshold=0.0015)
        assert len(depth_edges(depth, cfg)) > 0

    def test_pixels_lexicographic(self, bag_bundle):
        edges = depth_edges(bag_bundle["depth"], SamplerConfig())
        px = edges.pixels
        keys = px[:, 0] * 10**6 + px[:, 1]
        assert (np.diff(keys) > 0).all()


class TestCandidateInvariants:
    def test_plateau_yields_axis_aligned_pairs(self):
        color, depth = plateau_images(half=20)
        cands = sample_antipodal(depth, K, SamplerConfig(max_candidates=100))
        assert cands
        cone = 1.0 / math.sqrt(1.0 + 0.5**2)
        for g in cands:
            u = np.array(g.axis_vector)
            d1 = float(np.dot(g.grad1, u))
            d2 = float(np.dot(g.grad2, u))
            assert abs(d1) >= cone - 1e-9 and abs(d2) >= cone - 1e-9
            assert d1 * d2 < 0  # gradients face each other across the part
            assert g.jaw_separation_m <= 0.14 + 1e-9
            assert g.jaw_separation_px >= MIN_JAW_SEPARATION_PX
            assert g.jaw1 <= g.jaw2
            # pairs must bridge the plateau, not run along one side
            dr = abs(g.jaw1[0] - g.jaw2[0])
            dc = abs(g.jaw1[1] - g.jaw2[1])
            assert min(dr, dc) <= 22 and max(dr, dc) >= 30

    def test_tight_cone_forces_alignment(self):
        color, depth = plateau_images(half=20)
        mu = math.tan(math.radians(2.0))
        cands = sample_antipodal(depth, K, SamplerConfig(
            friction_coefficient=mu, max_candidates=50))
        for g in cands:
            ang = min(g.axis_angle, math.pi - g.axis_angle)
            off_axis = min(ang, abs(ang - math.pi / 2))
            # gradients are axis aligned here, so the jaw line may tilt
            # from them by at most the cone half-angle
            assert off_axis <= math.radians(2.0) + 1e-6

    def test_wide_part_rejected_by_gripper_width(self):
        color, depth = plateau_images(height=140, width=180, half=50)
        # 100 px at ~0.97 m and fx=600 spans ~0.16 m > 0.14 m
        assert sample_antipodal(depth, K, SamplerConfig()) == []

    def test_flat_scene_yields_nothing(self):
        _, depth = flat_images()
        assert sample_antipodal(depth, K, SamplerConfig()) == []

    def test_center_is_jaw_midpoint(self):
        color, depth = plateau_images()
        for g in sample_antipodal(depth, K, SamplerConfig(max_candidates=20)):
            mid_r = (g.jaw1[0] + g.jaw2[0]) / 2
            mid_c = (g.jaw1[1] + g.jaw2[1]) / 2
            assert abs(g.center[0] - mid_r) <= 0.5
            assert abs(g.center[1] - mid_c) <= 0.5
            assert 0 <= g.axis_angle < math.pi


class TestSamplingBudget:
    def test_deterministic_for_seed(self):
        color, depth = plateau_images()
        cfg = SamplerConfig(max_candidates=30, rng_seed=11)
        a = [g.to_dict() for g in sample_antipodal(depth, K, cfg)]
        b = [g.to_dict() for g in sample_antipodal(depth, K, cfg)]
        assert a == b

    def test_max_candidates_caps_output(self):
        color, depth = plateau_images()
        cands = sample_antipodal(depth, K, SamplerConfig(max_candidates=3))
        assert len(cands) == 3

    def test_candidates_unique(self):
        color, depth = plateau_images()
        cands = sample_antipodal(depth, K, SamplerConfig(max_candidates=200))
        pairs = {(g.jaw1, g.jaw2) for g in cands}
        assert len(pairs) == len(cands)

    def test_attempt_budget_constant(self):
        assert ATTEMPTS_PER_CANDIDATE == 100


class TestMaskScoping:
    def test_mask_restricts_jaws(self):
        color, depth = plateau_images(height=120, width=240, center=(60, 60))
        mask = np.zeros(depth.data.shape, dtype=bool)
        mask[:, :120] = True
        cands = sample_antipodal(depth, K, SamplerConfig(max_candidates=50),
                                 mask=mask)
        assert cands
        for g in cands:
            assert mask[g.jaw1] and mask[g.jaw2]

    def test_mask_can_empty_the_pool(self):
        color, depth = plateau_images()
        mask = np.zeros(depth.data.shape, dtype=bool)
        assert sample_antipodal(depth, K, SamplerConfig(), mask=mask) == []

    def test_mask_shape_checked(self):
        color, depth = plateau_images()
        with pytest.raises(ValueError):
            sample_antipodal(depth, K, SamplerConfig(),
                             mask=np.zeros((3, 3), dtype=bool))


class TestGraspCandidate:
    def test_rejects_center_off_midpoint(self):
        with pytest.raises(ValueError):
            GraspCandidate(center=(0, 0), axis_angle=0.0, jaw1=(10, 10),
                           jaw2=(10, 20), d0=1.0, jaw_separation_px=10.0,
                           jaw_separation_m=0.02)

    def test_rejects_nonpositive_d0(self):
        with pytest.raises(ValueError):
            GraspCandidate(center=(10, 15), axis_angle=0.0, jaw1=(10, 10),
                           jaw2=(10, 20), d0=0.0, jaw_separation_px=10.0,
                           jaw_separation_m=0.02)

    def test_dict_round_trip(self):
        g = GraspCandidate(center=(10, 15), axis_angle=0.0, jaw1=(10, 10),
                           jaw2=(10, 20), d0=1.0, jaw_separation_px=10.0,
                           jaw_separation_m=0.02, grad1=(0.0, 1.0),
                           grad2=(0.0, -1.0))
        assert GraspCandidate.from_dict(g.to_dict()) == g

    def test_axis_vector_points_jaw1_to_jaw2(self):
        g = GraspCandidate(center=(12, 10), axis_angle=math.pi / 2,
                           jaw1=(10, 10), jaw2=(15, 10), d0=1.0,
                           jaw_separation_px=5.0, jaw_separation_m=0.01)
        assert np.allclose(g.axis_vector, (1.0, 0.0))


class TestAxisPixels:
    def test_diagonal(self):
        g = GraspCandidate(center=(2, 2), axis_angle=math.pi / 4, jaw1=(0, 0),
                           jaw2=(3, 3), d0=1.0,
                           jaw_separation_px=math.hypot(3, 3),
                           jaw_separation_m=0.01)
        px = grasp_axis_pixels(g)
        assert {tuple(p) for p in px} == {(0, 0), (1, 1), (2, 2), (3, 3)}

    def test_horizontal_covers_every_column(self):
        g = GraspCandidate(center=(5, 7), axis_angle=0.0, jaw1=(5, 5),
                           jaw2=(5, 9), d0=1.0, jaw_separation_px=4.0,
                           jaw_separation_m=0.01)
        px = grasp_axis_pixels(g)
        assert {tuple(p) for p in px} == {(5, c) for c in range(5, 10)}
