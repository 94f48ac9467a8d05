import numpy as np
import pytest

from app.errors import (
    DegenerateConfigurationError,
    PairCalibError,
    PreconditionError,
    StructureViolationError,
)
from app.models.geometry import CameraMatrix
from app.services.averaging import (
    average_pair_estimates,
    geodesic_distance,
    joint_confidence,
    pool_from_solutions,
    select_focal,
)
from app.services.epipolar import (
    canonical_pair,
    epipoles,
    estimate_f_eightpoint,
    fundamental_from_cameras,
    normalize_fundamental,
)
from app.services.geometry import calibration_matrix, dac_canonical, decompose_krc, project_dual_quadric
from app.services.self_calibration import (
    AugmentedSystem,
    CalibrationOptions,
    ReducedSystem,
    SelfCalibrationService,
    UnknownVector,
    build_augmented_system,
    calibrate_pair,
    cheirality_select,
    depth_sign,
    homography_from_solution,
    metric_pair,
    sample_pair_estimates,
    solve_unknowns,
    structured_reduce,
    triangulate_dlt,
    verify_solution_geometry,
)
from app.services.synthetic import evaluate_pair, make_scene, relative_rotation_error
from conftest import random_rotation


def _projective_second_camera(f1, f2, R, t, p):
    """K2 [R | t] expressed in the projective frame reached by H(f1, p)"""
    H = homography_from_solution(f1, p)
    return calibration_matrix(f2) @ np.column_stack([R, t]) @ np.linalg.inv(H)


def _cosine_gap(A, B) -> float:
    a, b = np.ravel(A), np.ravel(B)
    return 1.0 - abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))


class TestAugmentedSystem:
    def test_row_tags(self):
        system = build_augmented_system(np.random.default_rng(0).normal(size=(3, 4)))
        assert system.tags == ((2, 2), (2, 3), (1, 3), (1, 1), (1, 2), (3, 3))
        assert system.matrix.shape == (6, 7)

    def test_zero_camera(self):
        system = build_augmented_system(np.zeros((3, 4)))
        expected = np.zeros((6, 6))
        expected[[0, 3], 1] = -1.0
        np.testing.assert_array_equal(system.A, expected)
        np.testing.assert_array_equal(system.b, [0, 0, 0, 0, 0, 1])

    def test_true_upgrade_has_zero_residual(self):
        f1, f2 = 850.0, 1250.0
        R, t, p = random_rotation(4), np.array([0.4, -0.2, 1.0]), np.array([1e-4, -3e-4, 0.2])
        P2 = _projective_second_camera(f1, f2, R, t, p)
        x = UnknownVector.from_parameters(f1, f2**2, p)
        residual = build_augmented_system(P2).residual(x)
        scale = np.abs(build_augmented_system(P2).A).max() * np.abs(x.values).max()
        assert np.abs(residual).max() < 1e-10 * scale

    def test_residual_matches_projected_quadric(self):
        f1, p = 900.0, np.array([2e-4, 1e-4, -0.5])
        P2 = np.random.default_rng(3).normal(size=(3, 4))
        H = homography_from_solution(f1, p)
        omega = project_dual_quadric(P2 @ H, dac_canonical())
        x = UnknownVector.from_parameters(f1, 7.0, p)
        residual = build_augmented_system(P2).residual(x)
        expected = [omega[1, 1] - 7.0, omega[1, 2], omega[0, 2], omega[0, 0] - 7.0, omega[0, 1], omega[2, 2] - 1.0]
        np.testing.assert_allclose(residual, expected, rtol=1e-9, atol=1e-9 * np.abs(omega).max())

    def test_canonical_pair_null_vector(self, conditioned_f):
        F = conditioned_f
        _, P2 = canonical_pair(F)
        e = epipoles(F).e
        n = np.array([0.0, 0.0, 0.0, e[2], e[0], e[1]])
        A = build_augmented_system(P2).A
        assert np.abs(A @ n).max() < 1e-12 * np.abs(A).max()


class TestStructuredReduce:
    def test_canonical_pair_reduces(self, conditioned_f):
        F = conditioned_f
        reduced = structured_reduce(build_augmented_system(canonical_pair(F)[1]))
        E = reduced.echelon()
        np.testing.assert_array_equal(E[:, :5], np.eye(5))
        assert E[:3, 5].tolist() == [0.0, 0.0, 0.0]

    def test_sixth_row_is_ignored(self, conditioned_f):
        F = conditioned_f
        system = build_augmented_system(canonical_pair(F)[1])
        spoiled = system.matrix.copy()
        spoiled[5] = np.nan
        a, b = structured_reduce(system), structured_reduce(AugmentedSystem(spoiled))
        np.testing.assert_array_equal(a.b, b.b)
        assert (a.c, a.d) == (b.c, b.d)

    def test_general_camera_violates_structure(self):
        P2 = np.random.default_rng(12).normal(size=(3, 4))
        with pytest.raises(StructureViolationError):
            structured_reduce(build_augmented_system(P2))

    def test_zero_camera_is_degenerate(self):
        with pytest.raises(DegenerateConfigurationError):
            structured_reduce(build_augmented_system(np.zeros((3, 4))))


class TestSolveUnknowns:
    def test_double_root(self):
        plus, minus = solve_unknowns(ReducedSystem(np.array([1.0, 2.0, 0.5, 1.0, 0.0]), 1.0, 0.0))
        np.testing.assert_allclose(plus.values, minus.values)
        np.testing.assert_allclose(plus.values, [1.0, 2.0, 0.5, 0.5, 0.0, 0.5])

    def test_roots_close_the_consistency_equation(self):
        reduced = ReducedSystem(np.array([2.0, 3.0, 5.0, 0.7, -0.4]), 0.3, -0.2)
        roots = solve_unknowns(reduced)
        assert roots[0].values[5] != roots[1].values[5]
        for x in roots:
            assert abs(x.consistency_residual()) < 1e-12
            np.testing.assert_allclose(reduced.echelon()[:, :6] @ x.values, reduced.b, atol=1e-12)

    def test_negative_discriminant(self):
        with pytest.raises(DegenerateConfigurationError):
            solve_unknowns(ReducedSystem(np.array([1.0, 1.0, -1.0, 0.0, 0.0]), 0.0, 0.0))

    def test_non_positive_focal(self):
        with pytest.raises(DegenerateConfigurationError):
            solve_unknowns(ReducedSystem(np.array([-1.0, 1.0, 1.0, 0.0, 0.0]), 0.0, 0.0))

    def test_mirror_solutions_differ_by_null_vector(self, conditioned_f):
        F = conditioned_f
        e = epipoles(F).e
        plus, minus = solve_unknowns(structured_reduce(build_augmented_system(canonical_pair(F)[1])))
        diff = plus.values - minus.values
        np.testing.assert_allclose(diff[:3], 0.0, atol=1e-12 * np.abs(plus.values).max())
        n = np.array([e[2], e[0], e[1]])
        assert _cosine_gap(diff[3:], n) < 1e-10


class TestUnknownVector:
    def test_plane_round_trip(self):
        p = np.array([0.01, -0.02, 0.3])
        x = UnknownVector.from_parameters(2.0, 9.0, p)
        np.testing.assert_allclose(x.plane, p)
        assert x.f1_sq == 4.0 and x.f2_sq == 9.0
        assert x.consistency_residual() == pytest.approx(0.0, abs=1e-15)


class TestCameraHelpers:
    def test_homography_layout(self):
        H = homography_from_solution(2.0, [1.0, 2.0, 3.0])
        expected = np.array(
            [[2.0, 0, 0, 0], [0, 2.0, 0, 0], [0, 0, 1.0, 0], [-2.0, -4.0, -3.0, 1.0]]
        )
        np.testing.assert_array_equal(H, expected)

    def test_metric_pair_has_unit_principal_row(self):
        rng = np.random.default_rng(5)
        P1, P2 = metric_pair(np.eye(3, 4), rng.normal(size=(3, 4)), homography_from_solution(3.0, rng.normal(size=3)))
        for P in (P1, P2):
            assert np.linalg.norm(P.left[2]) == pytest.approx(1.0)

    def test_triangulation_recovers_point(self):
        P1 = calibration_matrix(800.0) @ np.eye(3, 4)
        R = random_rotation(2)
        P2 = calibration_matrix(1100.0) @ np.column_stack([R, [1.0, 0.2, -0.1]])
        X = np.array([0.5, -0.3, 6.0, 1.0])
        x1, x2 = P1 @ X, P2 @ X
        np.testing.assert_allclose(triangulate_dlt(P1, P2, x1 / x1[2], x2 / x2[2]), X, rtol=1e-7)

    def test_triangulation_from_identical_cameras(self):
        P = np.eye(3, 4)
        with pytest.raises(DegenerateConfigurationError):
            triangulate_dlt(P, P, [0.1, 0.2, 1.0], [0.1, 0.2, 1.0])

    @pytest.mark.parametrize(
        "P_sign, X, expected",
        [(1, [0, 0, 5, 1], 1), (1, [0, 0, -5, 1], -1), (1, [1, 1, 0, 1], 0), (-1, [0, 0, 5, 1], 1)],
    )
    def test_depth_sign(self, P_sign, X, expected):
        assert depth_sign(P_sign * np.eye(3, 4), np.array(X, dtype=float)) == expected

    def test_no_correspondences_leaves_choice_open(self, noiseless_pair):
        _, corrs = noiseless_pair
        solution = calibrate_pair(noiseless_pair[0].fundamental, corrs)
        votes = cheirality_select(solution.candidates, corrs.subset([]))
        assert votes.chosen is None and votes.total == 0


class TestCalibratePair:
    def test_noiseless_recovery(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solution = calibrate_pair(scene.fundamental, corrs)
        assert solution.f1 == pytest.approx(1000.0, rel=1e-6)
        assert solution.f2 == pytest.approx(1300.0, rel=1e-6)
        assert solution.consistent
        assert solution.chosen in (0, 1)
        assert solution.votes.front2[solution.chosen] == len(corrs)

        cam1, cam2 = scene.cameras
        assert geodesic_distance(solution.rotation, cam2.R @ cam1.R.T) < 1e-4
        R_true, t_true = scene.relative_pose()
        np.testing.assert_allclose(solution.translation, t_true, atol=1e-6)

    def test_final_pair_reproduces_fundamental(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solution = calibrate_pair(scene.fundamental, corrs)
        P1, P2 = solution.final_pair
        assert _cosine_gap(fundamental_from_cameras(P1, P2), scene.fundamental) < 1e-10

    def test_matches_alone_are_enough(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solution = calibrate_pair(corrs=corrs)
        assert solution.f1 == pytest.approx(1000.0, rel=1e-6)
        assert solution.f2 == pytest.approx(1300.0, rel=1e-6)

    @pytest.mark.parametrize("scale", [1e-3, 1.0, 1e3])
    def test_scale_of_f_is_irrelevant(self, noiseless_pair, scale):
        scene, corrs = noiseless_pair
        base = calibrate_pair(scene.fundamental, corrs)
        scaled = calibrate_pair(scale * scene.fundamental, corrs)
        assert scaled.f1 == pytest.approx(base.f1, rel=1e-9)
        assert scaled.f2 == pytest.approx(base.f2, rel=1e-9)
        assert scaled.chosen == base.chosen

    def test_swapping_images_swaps_focals(self, noiseless_pair):
        scene, corrs = noiseless_pair
        forward = calibrate_pair(scene.fundamental, corrs)
        backward = calibrate_pair(scene.fundamental.T, corrs.swapped())
        assert backward.f1 == pytest.approx(forward.f2, rel=1e-6)
        assert backward.f2 == pytest.approx(forward.f1, rel=1e-6)

    def test_without_matches_nothing_is_chosen(self, noiseless_pair):
        solution = calibrate_pair(noiseless_pair[0].fundamental)
        assert solution.chosen is None
        assert solution.rotation is None
        assert solution.final_pair is None
        assert solution.coordinate_scale > 0
        assert solution.f1 > 0 and solution.f2 > 0

    def test_block_scale_and_reverse_pass(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solution = calibrate_pair(scene.fundamental, corrs)
        assert solution.block_scale > 0
        assert solution.reverse_f1 == pytest.approx(solution.f1, rel=1e-6)
        assert solution.forward_f2 == pytest.approx(solution.f2, rel=1e-6)

    def test_fixed_coordinate_scale(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solution = calibrate_pair(scene.fundamental, corrs, CalibrationOptions(coordinate_scale=500.0))
        assert solution.coordinate_scale == 500.0
        assert solution.f1 == pytest.approx(1000.0, rel=1e-6)

    def test_requires_input(self):
        with pytest.raises(PreconditionError):
            calibrate_pair()


class TestMirrorGeometry:
    def test_all_identities_hold(self, noiseless_pair):
        scene, corrs = noiseless_pair
        report = verify_solution_geometry(calibrate_pair(scene.fundamental, corrs))
        names = {check.name for check in report.checks}
        assert names == {
            "mirror_centres",
            "bisector_centre_1",
            "bisector_centre_2",
            "supplementary_view_1",
            "supplementary_view_2",
            "equal_calibration",
            "shared_omega",
            "opposite_determinants",
        }
        assert report.all_passed, [c for c in report.checks if not c.passed]

    def test_identities_hold_for_noisy_f(self, noisy_pair):
        _, corrs = noisy_pair
        try:
            solution = calibrate_pair(corrs=corrs)
        except DegenerateConfigurationError:
            pytest.skip("noisy F has no real solution")
        report = verify_solution_geometry(solution, tol=1e-5)
        assert report.by_name("mirror_centres").passed
        assert report.by_name("opposite_determinants").passed


class TestSampling:
    def test_minimal_samples_agree_on_noiseless_data(self, noiseless_pair):
        scene, corrs = noiseless_pair
        solutions = sample_pair_estimates(corrs, n_samples=6, seed=3)
        assert len(solutions) == 6
        for sol in solutions:
            assert sol.f1 == pytest.approx(1000.0, rel=1e-5)
            assert sol.f2 == pytest.approx(1300.0, rel=1e-5)

        average = average_pair_estimates(solutions)
        cam1, cam2 = scene.cameras
        assert average.f1 == pytest.approx(1000.0, rel=1e-5)
        assert geodesic_distance(average.rotation, cam2.R @ cam1.R.T) < 1e-3

    def test_sampled_solves_feed_a_focal_pool(self, noiseless_pair):
        _, corrs = noiseless_pair
        solutions = sample_pair_estimates(corrs, n_samples=6, seed=3)
        pool = pool_from_solutions({(0, 1): solutions}, truth={0: 1000.0, 1: 1300.0})
        assert pool.images == [0, 1]
        assert len(pool.entries[0]) == len(solutions) == 6
        assert {entry.pair_id for entry in pool.entries[1]} == {"0-1"}
        np.testing.assert_allclose(joint_confidence(pool, 0), np.ones(6))
        assert select_focal(pool, 0, "jcc") == pytest.approx(1000.0, rel=1e-5)
        assert select_focal(pool, 1, "cc") == pytest.approx(1300.0, rel=1e-5)

    def test_too_few_matches(self, noiseless_pair):
        with pytest.raises(PreconditionError):
            sample_pair_estimates(noiseless_pair[1].subset(range(5)), n_samples=3, seed=0)


class TestService:
    def test_ransac_pipeline_on_clean_matches(self, noiseless_pair):
        scene, corrs = noiseless_pair
        run = SelfCalibrationService(ransac_iters=50, sampson_thresh=1e-4).calibrate(corrs, seed=1)
        assert run.inliers.all()
        assert run.solution.f1 == pytest.approx(1000.0, rel=1e-6)
        assert run.geometry.all_passed

    def test_rejects_short_match_lists(self, noiseless_pair):
        with pytest.raises(PreconditionError):
            SelfCalibrationService().calibrate(noiseless_pair[1].subset(range(7)))

    def test_camera_matrix_inputs(self, noiseless_pair):
        scene, _ = noiseless_pair
        F = normalize_fundamental(scene.fundamental)
        P1, P2 = canonical_pair(F)
        assert isinstance(P2, CameraMatrix)
        assert build_augmented_system(P2).matrix.shape == (6, 7)


class TestRandomizedPairs:
    def test_noiseless_recovery_and_mirror_identities(self):
        for seed in range(60):
            scene, corrs = make_scene(100, sigma=0.0, seed=1000 + seed)
            solution = calibrate_pair(scene.fundamental, corrs)
            report = evaluate_pair(solution, scene)
            assert report.chosen, seed
            assert report.df1 < 1e-6 and report.df2 < 1e-6, seed
            assert report.dR < 1e-4 and report.dt < 1e-4, seed
            geometry = verify_solution_geometry(solution)
            assert geometry.all_passed, (seed, [c.name for c in geometry.checks if not c.passed])

    def test_cheirality_picks_the_true_candidate_under_pixel_noise(self):
        solved = correct = 0
        for seed in range(100):
            scene, corrs = make_scene(200, sigma=1.0, seed=2000 + seed)
            cam1, cam2 = scene.cameras
            try:
                solution = calibrate_pair(estimate_f_eightpoint(corrs), corrs)
                errors = [
                    relative_rotation_error(decompose_krc(candidate.P2)[1], cam1.R, cam2.R)
                    for candidate in solution.oriented
                ]
            except PairCalibError:
                continue
            solved += 1
            correct += solution.chosen == int(np.argmin(errors))
        assert solved >= 50
        assert correct >= 0.95 * solved
