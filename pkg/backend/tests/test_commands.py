"""End-to-end runs of the command line through main()"""

import json

import numpy as np
import pytest

from app.models.schemas import FocalAverageReport, PairSolutionReport, RotationAverageReport
from app.services.file_formats import (
    read_camera_file,
    read_match_file,
    read_model,
    write_focal_pool,
    write_match_file,
    write_rotation_graph,
)
from app.services.synthetic import (
    BENCHMARK_COLUMNS,
    make_focal_pool_benchmark,
    make_rotation_graph,
    make_scene,
    make_verification_scene,
)
from main import main


@pytest.fixture
def synthetic_files(tmp_path):
    matches, cameras = tmp_path / "pair.csv", tmp_path / "cams.json"
    code = main(
        [
            "synth", "--points", "150", "--f1", "1000", "--f2", "1300",
            "--seed", "7", "--out", str(matches), "--cameras-out", str(cameras),
        ]
    )
    assert code == 0
    return matches, cameras


class TestSynth:
    def test_writes_matches_and_cameras(self, synthetic_files):
        matches, cameras = synthetic_files
        corrs = read_match_file(matches)
        _, expected = make_scene(150, f1=1000.0, f2=1300.0, seed=7)
        np.testing.assert_array_equal(corrs.x1, expected.x1)
        model, _ = read_camera_file(cameras)
        assert [c.f for c in model.cameras] == [1000.0, 1300.0]

    def test_outlier_fraction(self, tmp_path):
        out = tmp_path / "noisy.csv"
        assert main(["synth", "--points", "40", "--outliers", "0.2", "--out", str(out)]) == 0
        corrs = read_match_file(out)
        assert len(corrs) == 50
        assert corrs.labels.sum() == 40

    def test_invalid_outlier_fraction(self, tmp_path):
        assert main(["synth", "--outliers", "1.5", "--out", str(tmp_path / "x.csv")]) == 3


class TestCalibratePair:
    def test_recovers_focal_lengths(self, synthetic_files, tmp_path, capsys):
        matches, cameras = synthetic_files
        report_path = tmp_path / "pair.json"
        code = main(["calibrate-pair", str(matches), "--no-ransac", "--json-out", str(report_path)])
        assert code == 0
        report = read_model(report_path, PairSolutionReport)
        model, _ = read_camera_file(cameras)
        assert report.f1 == pytest.approx(model.cameras[0].f, rel=1e-6)
        assert report.f2 == pytest.approx(model.cameras[1].f, rel=1e-6)
        assert report.consistent and report.chosen is not None
        assert len(report.candidates) == 2
        assert "Chosen candidate" in capsys.readouterr().out

    def test_ransac_with_false_matches(self, tmp_path):
        matches = tmp_path / "pair.csv"
        main(["synth", "--points", "150", "--f1", "900", "--f2", "1400", "--seed", "7",
              "--outliers", "0.2", "--out", str(matches)])
        report_path = tmp_path / "pair.json"
        code = main(["calibrate-pair", str(matches), "--ransac-iters", "500", "--json-out", str(report_path)])
        assert code == 0
        report = read_model(report_path, PairSolutionReport)
        assert report.inliers >= 150
        assert report.f1 == pytest.approx(900.0, rel=0.02)
        assert report.f2 == pytest.approx(1400.0, rel=0.02)

    def test_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x1,y1,x2,y2\n1,2,oops,4\n")
        assert main(["calibrate-pair", str(bad)]) == 2

    def test_too_few_matches(self, tmp_path):
        _, corrs = make_scene(20, seed=1)
        few = tmp_path / "few.csv"
        write_match_file(few, corrs.subset(range(7)))
        assert main(["calibrate-pair", str(few)]) == 3

    def test_missing_file(self, tmp_path, capsys):
        assert main(["calibrate-pair", str(tmp_path / "absent.csv")]) == 5
        assert "InputOutputError" in capsys.readouterr().err

    def test_unknown_flag(self, synthetic_files):
        assert main(["calibrate-pair", str(synthetic_files[0]), "--frobnicate"]) == 2

    def test_negative_ransac_iterations(self, synthetic_files):
        assert main(["calibrate-pair", str(synthetic_files[0]), "--ransac-iters", "-1"]) == 3


class TestVerifyMatches:
    def test_default_output_and_metrics(self, tmp_path, capsys):
        source = tmp_path / "scene.csv"
        write_match_file(source, make_verification_scene(200, 0.3, seed=1))
        assert main(["verify-matches", str(source)]) == 0
        kept = read_match_file(tmp_path / "scene.verified.csv")
        assert 0 < len(kept) <= 286
        assert kept.labels.mean() >= 0.9
        assert "Precision" in capsys.readouterr().out

    def test_explicit_output(self, tmp_path):
        source, out = tmp_path / "scene.csv", tmp_path / "kept.csv"
        write_match_file(source, make_verification_scene(50, 0.0, seed=2))
        assert main(["verify-matches", str(source), "--alpha", "0", "--out", str(out)]) == 0
        assert len(read_match_file(out)) == 50

    def test_alpha_out_of_range(self, tmp_path):
        source = tmp_path / "scene.csv"
        write_match_file(source, make_verification_scene(20, 0.0, seed=3))
        assert main(["verify-matches", str(source), "--alpha", "1.0"]) == 3


class TestAverage:
    def test_rotation_graph(self, tmp_path):
        graph, truth = make_rotation_graph(6, seed=0, density=0.5)
        source, out = tmp_path / "graph.json", tmp_path / "avg.json"
        write_rotation_graph(source, graph, truth)
        assert main(["average", "--rotations", str(source), "--json-out", str(out)]) == 0
        report = read_model(out, RotationAverageReport)
        assert sorted(report.rotations) == list(range(6))
        assert max(report.errors_deg.values()) < 1e-8

    def test_focal_pool(self, tmp_path):
        pool = make_focal_pool_benchmark(seed=0)
        source, out = tmp_path / "pool.json", tmp_path / "focal.json"
        write_focal_pool(source, pool)
        code = main(["average", "--focal", str(source), "--method", "jcc", "--json-out", str(out)])
        assert code == 0
        report = read_model(out, FocalAverageReport)
        first = next(sel for sel in report.selections if sel.image == 0)
        assert first.delta_f < 0.05

    @pytest.mark.parametrize(
        "extra",
        [[], ["--rotations", "a.json", "--focal", "b.json"], ["--focal", "b.json", "--method", "mode"]],
        ids=["no-input", "both-inputs", "bad-method"],
    )
    def test_argument_errors(self, extra):
        assert main(["average", *extra]) == 2

    def test_non_positive_beta(self, tmp_path):
        source = tmp_path / "pool.json"
        write_focal_pool(source, make_focal_pool_benchmark(seed=0, n_images=3))
        assert main(["average", "--focal", str(source), "--beta", "0"]) == 3


class TestEval:
    def test_zero_trials_writes_header(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["eval", "--trials", "0", "--out", str(out)]) == 0
        assert out.read_text() == ",".join(BENCHMARK_COLUMNS) + "\n"

    def test_same_seed_same_bytes(self, tmp_path):
        args = ["eval", "--sigma-grid", "0,1", "--trials", "2", "--points", "40", "--seed", "3"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 3

    @pytest.mark.parametrize("grid", ["a,b", "-1,0", ""])
    def test_bad_sigma_grid(self, tmp_path, grid):
        assert main(["eval", "--sigma-grid", grid, "--out", str(tmp_path / "x.csv")]) == 2


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert "paircalib" in out
    assert "Thresholded LIS" in out and "jcc" in out


def test_no_command():
    assert main([]) == 2


def test_report_is_plain_json(tmp_path):
    graph, _ = make_rotation_graph(3, seed=5)
    source, out = tmp_path / "g.json", tmp_path / "o.json"
    write_rotation_graph(source, graph)
    main(["average", "--rotations", str(source), "--json-out", str(out)])
    data = json.loads(out.read_text())
    assert data["errors_deg"] is None and data["sweeps"] == 20
