"""End-to-end command-line workflows on temporary bundles."""

import json

import numpy as np
import pytest

from pickplan import load_truth, polygon_contains, rle_decode
from pickplan.cli import (EXIT_INCOMPLETE, EXIT_NO_PLAN, EXIT_OK, EXIT_USAGE,
                          main)


def read_json(path):
    return json.loads(path.read_text())


@pytest.fixture(scope="module")
def bag_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bag") / "bundle"
    assert main(["gen-scene", "--bags", "1", "--seed", "42",
                 "-o", str(out)]) == EXIT_OK
    return out


@pytest.fixture(scope="module")
def envelope_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("env") / "bundle"
    assert main(["gen-scene", "--envelopes", "1", "--seed", "7",
                 "-o", str(out)]) == EXIT_OK
    return out


@pytest.fixture(scope="module")
def flat_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("flat") / "bundle"
    assert main(["gen-scene", "--seed", "1", "-o", str(out)]) == EXIT_OK
    return out


class TestGenScene:
    def test_writes_bundle_files(self, bag_dir):
        for name in ("color.png", "depth.png", "scene.json", "truth.json"):
            assert (bag_dir / name).exists(), name

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["gen-scene", "--bags", "1", "--envelopes", "1",
                         "--seed", "5", "-o", str(out)]) == EXIT_OK
        for name in ("color.png", "depth.png", "scene.json", "truth.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_entropy_seed_announced(self, tmp_path, capsys):
        assert main(["gen-scene", "-o", str(tmp_path / "x")]) == EXIT_OK
        assert capsys.readouterr().out.startswith("seed:")


class TestDetectCommand:
    def test_detections_json(self, bag_dir, tmp_path):
        out = tmp_path / "det"
        assert main(["detect", "--in", str(bag_dir), "-o", str(out)]) == EXIT_OK
        data = read_json(out / "detections.json")
        assert len(data["detections"]) == 1
        assert data["detections"][0]["kind"] == "bag"
        assert (out / "overlay.png").exists()

    def test_mask_decodes(self, bag_dir, tmp_path):
        out = tmp_path / "det"
        main(["detect", "--in", str(bag_dir), "-o", str(out)])
        det = read_json(out / "detections.json")["detections"][0]
        mask = rle_decode(det["mask"])
        assert mask.sum() == det["area_px"]


class TestPlanGrasp:
    def test_selects_a_corner_grasp(self, bag_dir, tmp_path):
        out = tmp_path / "grasp"
        assert main(["plan-grasp", "--in", str(bag_dir), "--seed", "7",
                     "-o", str(out)]) == EXIT_OK
        plan = read_json(out / "plans.json")
        assert plan["selected"] is not None
        assert plan["kept_count"] >= 1
        truth = load_truth(bag_dir / "truth.json")
        r, c = plan["selected"]["candidate"]["center"]
        in_corner = any(polygon_contains(poly, r, c)
                        for poly in truth.corner_regions[0])
        on_lump = truth.lump_masks[0][r, c]
        assert in_corner and not on_lump

    def test_no_filter_keeps_raw_ranking(self, bag_dir, tmp_path):
        out = tmp_path / "raw"
        assert main(["plan-grasp", "--in", str(bag_dir), "--seed", "7",
                     "--no-filter", "-o", str(out)]) == EXIT_OK
        plan = read_json(out / "plans.json")
        assert plan["no_filter"] is True
        evaluable = sum(1 for c in plan["candidates"] if c["stats"] is not None)
        assert len(plan["ranked"]) == evaluable

    def test_flat_scene_exits_no_plan(self, flat_dir, tmp_path, capsys):
        out = tmp_path / "none"
        code = main(["plan-grasp", "--in", str(flat_dir), "--seed", "2",
                     "-o", str(out)])
        assert code == EXIT_NO_PLAN
        assert "no grasp plan" in capsys.readouterr().err

    def test_deterministic_output(self, bag_dir, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["plan-grasp", "--in", str(bag_dir), "--seed", "9",
                         "-o", str(out)]) == EXIT_OK
        assert (a / "plans.json").read_bytes() == (b / "plans.json").read_bytes()

    def test_global_sampling_flag(self, bag_dir, tmp_path):
        out = tmp_path / "glob"
        code = main(["plan-grasp", "--in", str(bag_dir), "--seed", "7",
                     "--global-sampling", "-o", str(out)])
        plan = read_json(out / "plans.json")
        assert plan["roi_detection"] is None
        assert code in (EXIT_OK, EXIT_NO_PLAN)


class TestPlanSuction:
    def test_auto_targets_topmost_envelope(self, envelope_dir, tmp_path):
        out = tmp_path / "suction"
        assert main(["plan-suction", "--in", str(envelope_dir), "--seed", "7",
                     "-o", str(out)]) == EXIT_OK
        plan = read_json(out / "suction.json")
        assert plan["selected"]["planarity_rms"] <= 0.002

    def test_explicit_bbox(self, envelope_dir, tmp_path):
        out = tmp_path / "suction"
        # aim at the envelope using its truth mask bbox
        truth = load_truth(envelope_dir / "truth.json")
        rows, cols = np.nonzero(truth.masks[0])
        bbox = f"{rows.min()},{cols.min()},{rows.max()},{cols.max()}"
        assert main(["plan-suction", "--in", str(envelope_dir), "--seed", "3",
                     "--bbox", bbox, "-o", str(out)]) == EXIT_OK
        sel = read_json(out / "suction.json")["selected"]
        assert rows.min() <= sel["pixel"][0] <= rows.max()

    def test_no_envelope_exits_no_plan(self, bag_dir, tmp_path):
        out = tmp_path / "nosuction"
        assert main(["plan-suction", "--in", str(bag_dir), "--seed", "3",
                     "-o", str(out)]) == EXIT_NO_PLAN


class TestRunPipeline:
    def test_generated_scene_completes(self, tmp_path):
        out = tmp_path / "pipe"
        assert main(["run-pipeline", "--bags", "1", "--envelopes", "1",
                     "--seed", "11", "-o", str(out)]) == EXIT_OK
        report = read_json(out / "report.json")
        assert report["all_placed"] and report["protocol_ok"]
        assert report["config"]["sampler"]["max_candidates"] == 500

    def test_bundle_input(self, envelope_dir, tmp_path):
        out = tmp_path / "pipe"
        assert main(["run-pipeline", "--in", str(envelope_dir), "--seed", "4",
                     "-o", str(out)]) == EXIT_OK

    def test_forced_lift_failure_incomplete(self, tmp_path):
        out = tmp_path / "fail"
        code = main(["run-pipeline", "--envelopes", "1", "--seed", "11",
                     "--pick-failure-prob", "1.0", "-o", str(out)])
        assert code == EXIT_INCOMPLETE
        report = read_json(out / "report.json")
        assert not report["all_placed"]
        assert report["protocol_ok"]

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["run-pipeline", "--bags", "1", "--seed", "13",
                         "-o", str(out)]) == EXIT_OK
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


class TestCompare:
    def test_small_corpus(self, tmp_path):
        out = tmp_path / "cmp"
        assert main(["compare", "--scenes", "2", "--bags", "1", "--seed", "5",
                     "-o", str(out)]) == EXIT_OK
        data = read_json(out / "compare.json")
        assert data["scenes"] == 2
        assert len(data["per_scene"]) == 2
        assert data["with_filter"]["lump_rate"] == 0.0


class TestUsageErrors:
    def test_unknown_config_section(self, bag_dir, tmp_path):
        cfg = tmp_path / "bad.toml"
        cfg.write_text("[nonsense]\nx = 1\n")
        out = tmp_path / "x"
        code = main(["plan-grasp", "--in", str(bag_dir), "--seed", "1",
                     "--config", str(cfg), "-o", str(out)])
        assert code == EXIT_USAGE

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit):
            main(["plan-grasp"])

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])
