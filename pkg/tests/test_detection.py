"""Connected-component package detection and the barcode observation oracle."""

import numpy as np
import pytest

from helpers import flat_images
from pickplan import (BoundingBox, DetectorConfig, PackageKind, ProtocolError,
                      detect_packages, estimate_table_depth, observe_barcode,
                      render_scene, truth_detections)
from test_scenes import make_bag, make_envelope


class TestBoundingBox:
    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            BoundingBox(min_row=5, min_col=0, max_row=4, max_col=10)

    def test_geometry(self):
        b = BoundingBox(min_row=2, min_col=3, max_row=11, max_col=22)
        assert b.height == 10 and b.width == 20
        assert b.center == (6.5, 12.5)
        assert b.contains(2, 3) and b.contains(11, 22)
        assert not b.contains(12, 3)

    def test_iou_cases(self):
        a = BoundingBox(0, 0, 9, 9)
        assert a.iou(a) == 1.0
        disjoint = BoundingBox(20, 20, 30, 30)
        assert a.iou(disjoint) == 0.0
        shifted = BoundingBox(5, 5, 14, 14)
        assert a.iou(shifted) == pytest.approx(25.0 / 175.0)

    def test_from_mask(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask[2:5, 3:8] = True
        b = BoundingBox.from_mask(mask)
        assert (b.min_row, b.min_col, b.max_row, b.max_col) == (2, 3, 4, 7)
        with pytest.raises(ValueError):
            BoundingBox.from_mask(np.zeros((4, 4), dtype=bool))

    def test_list_round_trip(self):
        b = BoundingBox(1, 2, 3, 4)
        assert BoundingBox(*b.to_list()) == b


class TestTableDepth:
    def test_median_of_valid(self):
        d = np.ones((10, 10))
        d[:2] = 0.0  # holes are excluded
        d[5:, :] = 1.2
        from pickplan import DepthImage
        est = estimate_table_depth(DepthImage.from_array(d))
        assert est == np.median(d[d > 0])

    def test_all_invalid_raises(self):
        from pickplan import DepthImage
        with pytest.raises(ValueError):
            estimate_table_depth(DepthImage.from_array(np.zeros((5, 5))))


class TestDetectPackages:
    def test_empty_table(self):
        color, depth = flat_images()
        result = detect_packages(color, depth, DetectorConfig())
        assert result.detections == []
        assert result.table_depth_m == 1.0

    def test_single_envelope_matches_truth_mask(self):
        color, depth, truth = render_scene([make_envelope()], noise_sigma=0.0)
        result = detect_packages(color, depth, DetectorConfig())
        assert len(result.detections) == 1
        det = result.detections[0]
        assert det.kind is PackageKind.ENVELOPE
        assert np.array_equal(det.mask, truth.masks[0])
        assert det.bbox == BoundingBox.from_mask(truth.masks[0])
        assert det.area_px == truth.masks[0].sum()

    def test_bag_classified_by_height(self):
        color, depth, _ = render_scene([make_bag()], noise_sigma=0.0)
        result = detect_packages(color, depth, DetectorConfig())
        assert len(result.detections) == 1
        assert result.detections[0].kind is PackageKind.BAG

    def test_classification_threshold_flips_kind(self):
        color, depth, _ = render_scene([make_envelope()], noise_sigma=0.0)
        low = DetectorConfig(envelope_max_height_m=0.001)
        assert detect_packages(color, depth, low).detections[0].kind \
            is PackageKind.BAG
        high = DetectorConfig(envelope_max_height_m=0.05)
        assert detect_packages(color, depth, high).detections[0].kind \
            is PackageKind.ENVELOPE

    def test_min_area_suppresses_components(self):
        color, depth, _ = render_scene([make_envelope()], noise_sigma=0.0)
        big = DetectorConfig(min_area=10**6)
        assert detect_packages(color, depth, big).detections == []

    def test_sorted_by_area_then_position(self):
        objs = [make_envelope(0, x=0.15, a=0.09, b=0.07),
                make_bag(1, x=-0.15)]
        color, depth, _ = render_scene(objs, noise_sigma=0.0)
        result = detect_packages(color, depth, DetectorConfig())
        areas = [d.area_px for d in result.detections]
        assert areas == sorted(areas, reverse=True)

    def test_median_depth_reported(self):
        color, depth, _ = render_scene([make_envelope()], noise_sigma=0.0)
        det = detect_packages(color, depth, DetectorConfig()).detections[0]
        assert det.median_depth_m == pytest.approx(0.997)

    def test_masks_read_only(self):
        color, depth, _ = render_scene([make_envelope()], noise_sigma=0.0)
        det = detect_packages(color, depth, DetectorConfig()).detections[0]
        with pytest.raises(ValueError):
            det.mask[0, 0] = True


class TestTruthDetections:
    def test_agrees_with_baseline_when_separated(self):
        objs = [make_bag(0, x=-0.15), make_envelope(1, x=0.15)]
        color, depth, truth = render_scene(objs, noise_sigma=0.0)
        base = detect_packages(color, depth, DetectorConfig())
        oracle = truth_detections(truth, depth, DetectorConfig())
        assert len(base.detections) == len(oracle.detections) == 2
        for b, o in zip(base.detections, oracle.detections):
            assert b.kind == o.kind
            assert b.bbox == o.bbox
            assert np.array_equal(b.mask, o.mask)

    def test_same_schema(self, mixed_bundle):
        truth, depth = mixed_bundle["truth"], mixed_bundle["depth"]
        result = truth_detections(truth, depth, DetectorConfig())
        for det in result.detections:
            d = det.to_dict()
            assert set(d) == {"bbox", "kind", "confidence", "mask", "area_px",
                              "median_depth_m", "elevation_p95_m"}


class TestObserveBarcode:
    def test_up_reports_truth_box(self):
        _, _, truth = render_scene([make_bag(barcode_up=True)],
                                   noise_sigma=0.0)
        obs = observe_barcode(truth, held_id=0)
        assert obs.present
        assert obs.bbox.to_list() == list(truth.barcode_bboxes[0])

    def test_down_reports_absent(self):
        _, _, truth = render_scene([make_bag(barcode_up=False)],
                                   noise_sigma=0.0)
        obs = observe_barcode(truth, held_id=0)
        assert not obs.present and obs.bbox is None

    def test_requires_held_object(self):
        _, _, truth = render_scene([make_bag()], noise_sigma=0.0)
        with pytest.raises(ProtocolError):
            observe_barcode(truth, held_id=None)

    def test_unknown_id_raises(self):
        _, _, truth = render_scene([make_bag()], noise_sigma=0.0)
        with pytest.raises(KeyError):
            observe_barcode(truth, held_id=5)
