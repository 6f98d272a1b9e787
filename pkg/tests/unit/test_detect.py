"""Tests del detector por proyección: umbral χ², SVDD, entrenamiento y evaluación."""

import numpy as np
import pytest
from scipy import linalg, stats

from src.core.exceptions import (
    BasisError,
    ConditioningError,
    ConvergenceError,
    DataError,
    ModeError,
    ParameterError,
    ShapeError,
)
from src.detect.chi2 import (
    batch_statistic,
    calibrate_chi2,
    chi2_quantile,
    chi2_statistic,
    evaluate,
    inverse_sqrt,
    svdd_statistic,
)
from src.detect.evaluation import residual_r_u2, run_detection, trajectory_windows
from src.detect.models import Detector, DetectorMeta
from src.detect.svdd import svdd_fit, svdd_threshold
from src.detect.trainer import (
    innovation_toeplitz,
    minimum_training_length,
    model_based_detector,
    train_detector,
)
from src.ltisim.gains import kalman_gain
from src.ltisim.models import FaultProfile, Trajectory
from src.ltisim.simulator import gaussian_input, simulate, simulate_innovation_model
from src.representations.kernel import kernel_rep
from src.sigkit.models import SignalSequence


def _identity_detector(s=1, mode="chi2", threshold=5.99, delta=None):
    meta = DetectorMeta(s=s, gamma=0, p=1, m=1, alpha=0.05)
    dim = meta.window_dim
    return Detector(
        U2=np.eye(dim),
        delta_hat=np.zeros(dim) if delta is None else delta,
        cov_inv_factor=np.eye(dim),
        threshold=threshold,
        mode=mode,
        meta=meta,
    )


def _scalar_trajectory(y, labels):
    y = np.asarray(y, dtype=float)
    return Trajectory(SignalSequence(np.zeros_like(y)), SignalSequence(y), labels)


@pytest.mark.unit
class TestChi2Quantile:

    def test_one_dof(self):
        assert chi2_quantile(0.05, 1) == pytest.approx(3.84146, abs=1e-5)

    def test_two_dof_closed_form(self):
        assert chi2_quantile(0.05, 2) == pytest.approx(-2.0 * np.log(0.05), rel=1e-10)

    @pytest.mark.parametrize("dof", [1, 3, 7, 20, 150])
    @pytest.mark.parametrize("alpha", [0.001, 0.05, 0.3])
    def test_matches_scipy(self, alpha, dof):
        assert chi2_quantile(alpha, dof) == pytest.approx(stats.chi2.isf(alpha, dof), rel=1e-8)

    def test_median_approximation(self):
        assert chi2_quantile(0.5, 400) == pytest.approx(400 - 2.0 / 3.0, rel=0.01)

    @pytest.mark.parametrize("alpha,dof", [(0.0, 2), (1.0, 2), (0.05, 0), (0.05, 2.5)])
    def test_invalid(self, alpha, dof):
        with pytest.raises(ParameterError):
            chi2_quantile(alpha, dof)


@pytest.mark.unit
class TestChi2Statistic:

    def test_zero_at_offset(self):
        det = _identity_detector(delta=np.array([1.0, -2.0]))
        result = chi2_statistic(det, np.array([1.0, -2.0]), k=4)
        assert result.J == 0.0
        assert not result.alarm
        assert result.k == 4

    def test_arithmetic(self):
        result = chi2_statistic(_identity_detector(), np.array([3.0, 4.0]))
        assert result.J == pytest.approx(25.0)
        assert result.alarm

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            chi2_statistic(_identity_detector(mode="svdd"), np.zeros(2))
        with pytest.raises(ModeError):
            svdd_statistic(_identity_detector(mode="chi2"), np.zeros(2))

    def test_decision_consistency(self, rng):
        det = _identity_detector(threshold=2.0)
        windows = rng.standard_normal((2, 50))
        first = batch_statistic(det, windows)
        second = np.array([evaluate(det, windows[:, j]).J for j in range(50)])
        np.testing.assert_allclose(first, second, rtol=1e-12)
        assert [evaluate(det, windows[:, j]).alarm for j in range(50)] == list(second > 2.0)

    def test_window_dimension(self):
        with pytest.raises(ShapeError):
            residual_r_u2(_identity_detector(), np.zeros(3))


@pytest.mark.unit
class TestCalibration:

    def test_mean_and_ridge(self):
        residuals = np.array([[1.0, 3.0], [2.0, 2.0]])
        cal = calibrate_chi2(residuals, ridge=0.5)
        np.testing.assert_allclose(cal.delta_hat, [2.0, 2.0])
        # Gram centrada: diag(2, 0); ridge·traza/θ' = 0.5
        np.testing.assert_allclose(cal.covariance, np.diag([2.5, 0.5]))

    def test_inverse_sqrt(self, rng):
        G = rng.standard_normal((4, 4))
        cov = G @ G.T + np.eye(4)
        W = inverse_sqrt(cov)
        np.testing.assert_allclose(W @ cov @ W, np.eye(4), atol=1e-10)

    def test_singular_without_ridge(self):
        with pytest.raises(ConditioningError):
            calibrate_chi2(np.ones((2, 10)), ridge=0.0)

    def test_empty(self):
        with pytest.raises(DataError):
            calibrate_chi2(np.zeros((2, 0)))


@pytest.mark.unit
class TestDetectorModel:

    def test_rejects_non_orthonormal_rows(self):
        meta = DetectorMeta(s=1, gamma=0, p=1, m=1)
        with pytest.raises(BasisError):
            Detector(np.array([[1.0, 1.0]]), np.zeros(1), np.eye(1), 1.0, "chi2", meta)

    def test_rejects_wrong_window_dim(self):
        meta = DetectorMeta(s=2, gamma=0, p=1, m=1)
        with pytest.raises(ShapeError):
            Detector(np.eye(2), np.zeros(2), np.eye(2), 1.0, "chi2", meta)

    def test_arrays_read_only(self):
        det = _identity_detector()
        with pytest.raises(ValueError):
            det.U2[0, 0] = 2.0

    def test_residual_of_basis_row(self):
        U2 = linalg.qr(np.random.default_rng(0).standard_normal((4, 2)), mode="economic")[0].T
        meta = DetectorMeta(s=2, gamma=2, p=1, m=1)
        det = Detector(U2, np.zeros(2), np.eye(2), 1.0, "chi2", meta)
        np.testing.assert_allclose(residual_r_u2(det, U2[1]), [0.0, 1.0], atol=1e-12)


@pytest.mark.unit
class TestSvdd:

    def test_identical_points(self):
        model = svdd_fit(np.tile([1.0, -2.0], (5, 1)), C=1.0)
        np.testing.assert_allclose(model.center, [1.0, -2.0])
        assert model.radius_sq == pytest.approx(0.0, abs=1e-12)

    def test_two_points(self):
        model = svdd_fit(np.array([[0.0, 0.0], [2.0, 2.0]]), C=0.5)
        np.testing.assert_allclose(model.alphas, [0.5, 0.5])
        np.testing.assert_allclose(model.center, [1.0, 1.0])
        assert model.radius_sq == pytest.approx(2.0)

    def test_circle_with_center(self):
        angles = np.linspace(0.0, 2.0 * np.pi, 100, endpoint=False)
        points = np.vstack([np.column_stack([np.cos(angles), np.sin(angles)]), [[0.0, 0.0]]])
        model = svdd_fit(points, C=10.0)
        np.testing.assert_allclose(model.center, [0.0, 0.0], atol=1e-3)
        assert np.sqrt(model.radius_sq) == pytest.approx(1.0, abs=1e-3)
        assert model.alphas[-1] == pytest.approx(0.0, abs=1e-9)

    def test_kkt(self, rng):
        points = rng.standard_normal((80, 3))
        for C in (0.05, 0.2, 1.0):
            model = svdd_fit(points, C=C)
            scale = max(1.0, float(np.max(np.sum(points**2, axis=1))))
            assert model.kkt_residual() <= 1e-6 * scale * 10
            assert model.alphas.sum() == pytest.approx(1.0)
            assert np.all(model.alphas >= -1e-15) and np.all(model.alphas <= model.C + 1e-15)

    def test_infeasible_box(self):
        with pytest.raises(ParameterError):
            svdd_fit(np.zeros((4, 2)), C=0.1)

    def test_non_convergence(self, rng):
        with pytest.raises(ConvergenceError):
            svdd_fit(rng.standard_normal((50, 2)), C=0.05, max_updates=1)

    def test_update_budget_counts_pair_steps(self):
        # desde α uniforme: un paso lleva masa 0→1 (α = 2/3, 0, 1/3) y otro la reparte entre los extremos
        points = np.array([[0.0], [1.0], [2.0]])
        model = svdd_fit(points, C=1.0, max_updates=2)
        np.testing.assert_allclose(model.alphas, [0.5, 0.0, 0.5], atol=1e-12)
        np.testing.assert_allclose(model.center, [1.0], atol=1e-12)
        assert model.radius_sq == pytest.approx(1.0)
        with pytest.raises(ConvergenceError, match="1 actualizaciones"):
            svdd_fit(points, C=1.0, max_updates=1)

    def test_converged_start_needs_no_updates(self):
        model = svdd_fit(np.array([[0.0, 0.0], [2.0, 0.0]]), C=1.0, max_updates=0)
        np.testing.assert_allclose(model.center, [1.0, 0.0])

    def test_threshold_encloses_with_loose_box(self, rng):
        residuals = rng.standard_normal((3, 200))
        W = np.eye(3)
        delta_hat, threshold, model = svdd_threshold(residuals, W, C=1.0)
        J = np.sum((residuals - delta_hat[:, None]) ** 2, axis=0)
        assert threshold >= J.max() - 1e-5 * max(1.0, J.max())

    def test_threshold_with_binding_box(self, rng):
        residuals = rng.standard_normal((3, 200))
        delta_hat, threshold, model = svdd_threshold(residuals, np.eye(3), C=0.02)
        J = np.sum((residuals - delta_hat[:, None]) ** 2, axis=0)
        assert np.any(model.xi > 0)
        assert threshold < J.max()

    def test_single_point(self):
        r = np.array([[0.3], [-1.2]])
        delta_hat, threshold, _ = svdd_threshold(r, 2.0 * np.eye(2), C=1.0)
        np.testing.assert_allclose(delta_hat, r[:, 0])
        assert threshold == 0.0


@pytest.mark.unit
class TestTrainDetector:

    def test_minimum_length(self):
        assert minimum_training_length(4, 1, 2) == 15

    def test_short_data(self, random_model):
        traj = simulate(random_model, gaussian_input(10, 1, seed=0))
        with pytest.raises(DataError, match="insuficientes"):
            train_detector(traj, 4)

    def test_faulty_training_data(self, random_model):
        faults = FaultProfile.step(50, sensor_bias=[1.0, 1.0])
        traj = simulate(random_model, gaussian_input(200, 1, seed=0), faults=faults)
        with pytest.raises(DataError, match="falla"):
            train_detector(traj, 4)

    def test_unknown_mode(self, noisy_trajectory):
        with pytest.raises(ParameterError):
            train_detector(noisy_trajectory, 4, mode="glr")

    def test_chi2_threshold_two_dof(self, noisy_trajectory):
        det = train_detector(noisy_trajectory, 4, gamma=10)
        assert det.theta == 2
        assert det.threshold == pytest.approx(5.99146, abs=1e-5)

    def test_auto_gamma(self, random_model, clean_trajectory):
        det = train_detector(clean_trajectory, 4, gamma="auto")
        assert det.meta.gamma == 4 * random_model.p + random_model.n
        assert det.theta == 4 * random_model.m - random_model.n
        assert det.meta.training_windows == clean_trajectory.length - 3

    def test_residual_basis_close_to_kernel(self, random_model, noisy_trajectory):
        from src.subspace.decomposition import gap_metric

        det = train_detector(noisy_trajectory, 4, gamma=7)
        K = kernel_rep(random_model, 4).normalized()
        assert gap_metric(det.U2.T, K.T) < 0.2

    def test_image_insensitivity(self, noisy_trajectory, rng):
        det = train_detector(noisy_trajectory, 4, gamma=7)
        U1 = linalg.null_space(det.U2)
        window = rng.standard_normal(12)
        added = U1 @ rng.standard_normal(U1.shape[1])
        diff = det.residual(window + added) - det.residual(window)
        assert linalg.norm(diff) <= 1e-10 * max(1.0, linalg.norm(added))

    def test_noise_free_training_alarms_on_noise(self, random_model, clean_trajectory, noise_model):
        det = train_detector(clean_trajectory, 4, gamma=7)
        noisy = simulate(random_model, gaussian_input(100, 1, seed=8), noise=noise_model, seed=2)
        report = run_detection(det, noisy)
        assert report.far == 1.0

    def test_svdd_mode(self, noisy_trajectory):
        det = train_detector(noisy_trajectory, 4, gamma=7, mode="svdd", C=0.05)
        assert det.mode == "svdd"
        assert det.meta.C == 0.05 and det.meta.alpha is None
        windows = trajectory_windows(noisy_trajectory, 4)
        rate = float(np.mean(batch_statistic(det, windows) > det.threshold))
        assert rate < 0.05

    @pytest.mark.slow
    def test_held_out_mean_matches_dof(self, random_model, noise_model):
        train = simulate(random_model, gaussian_input(20000, 1, seed=1), noise=noise_model, seed=2)
        test = simulate(random_model, gaussian_input(20000, 1, seed=3), noise=noise_model, seed=4)
        det = train_detector(train, 4, gamma=7)
        J = batch_statistic(det, trajectory_windows(test, 4))
        assert J.mean() == pytest.approx(det.theta, rel=0.05)


@pytest.mark.unit
class TestModelBasedDetector:

    def test_innovation_toeplitz_blocks(self, random_model):
        L = np.ones((3, 2))
        T = innovation_toeplitz(random_model, L, 3)
        np.testing.assert_allclose(T[:2, :2], np.eye(2))
        np.testing.assert_allclose(T[2:4, :2], random_model.C @ L)
        np.testing.assert_allclose(T[4:6, :2], random_model.C @ random_model.A @ L)
        assert not T[:2, 2:].any()

    def test_structure(self, random_model, noise_model):
        gain = kalman_gain(random_model, noise_model)
        det = model_based_detector(random_model, 4, gain.L, gain.Sigma_r)
        assert det.theta == 4 * 2 - 3
        assert det.meta.method == "model"
        assert not det.delta_hat.any()

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.01, 0.05])
    def test_exact_calibration(self, random_model, noise_model, alpha):
        s = 4
        gain = kalman_gain(random_model, noise_model)
        det = model_based_detector(random_model, s, gain.L, gain.Sigma_r, alpha=alpha)
        count = 10000
        u = gaussian_input(count * s, 1, seed=5)
        traj = simulate_innovation_model(random_model, gain.L, gain.Sigma_r, u, seed=6)
        windows = trajectory_windows(traj, s)[:, ::s]
        J = batch_statistic(det, windows)
        theta = det.theta
        assert J.mean() == pytest.approx(theta, rel=0.05)
        assert J.var(ddof=1) == pytest.approx(2 * theta, rel=0.15)
        rate = float(np.mean(J > det.threshold))
        assert abs(rate - alpha) <= 3 * np.sqrt(alpha * (1 - alpha) / J.size)


@pytest.mark.unit
class TestRunDetection:

    def test_single_sample_windows(self):
        det = _identity_detector(threshold=1.0)
        traj = _scalar_trajectory([0, 0, 0, 5, 5], [False, False, False, True, True])
        report = run_detection(det, traj)
        assert report.far == 0.0
        assert report.mdr == 0.0
        assert report.detection_delay == 0
        assert report.onset == 3
        np.testing.assert_array_equal(report.anchors, np.arange(5))

    def test_window_labels(self):
        det = _identity_detector(s=2, threshold=1.0)
        traj = _scalar_trajectory([0, 0, 0, 3], [False, False, True, True])
        report = run_detection(det, traj)
        np.testing.assert_array_equal(report.labels, [False, True, True])
        np.testing.assert_array_equal(report.alarms, [False, False, True])
        assert report.mdr == 0.5
        assert report.mdr_settled == 0.0
        assert report.detection_delay == 1

    def test_fault_free_rates(self):
        det = _identity_detector(threshold=1.0)
        report = run_detection(det, _scalar_trajectory([0, 2, 0, 0], [False] * 4))
        assert report.far == 0.25
        assert report.mdr is None
        assert report.detection_delay is None
        summary = report.summary()
        assert summary["false_alarms"] == 1
        assert summary["faulty_windows"] == 0

    def test_dimension_mismatch(self, noisy_trajectory):
        with pytest.raises(ShapeError):
            run_detection(_identity_detector(), noisy_trajectory)

    def test_clean_data_no_false_alarms(self, random_model, noise_model):
        train = simulate(random_model, gaussian_input(5000, 1, seed=1), noise=noise_model, seed=2)
        det = train_detector(train, 4, gamma=7)
        clean = simulate(random_model, gaussian_input(300, 1, seed=9))
        assert run_detection(det, clean).far == 0.0

    def test_large_sensor_fault(self, random_model, noise_model):
        train = simulate(random_model, gaussian_input(5000, 1, seed=1), noise=noise_model, seed=2)
        det = train_detector(train, 4, gamma=7)
        faults = FaultProfile.step(150, sensor_bias=[5.0, -5.0])
        test = simulate(random_model, gaussian_input(300, 1, seed=3), noise=noise_model, faults=faults, seed=4)
        report = run_detection(det, test)
        assert report.mdr_settled == 0.0
        assert report.detection_delay is not None and report.detection_delay <= 3

    @pytest.mark.slow
    def test_amplitude_sweep(self, random_model, noise_model):
        train = simulate(random_model, gaussian_input(5000, 1, seed=1), noise=noise_model, seed=2)
        det = train_detector(train, 4, gamma=7)
        u = gaussian_input(3000, 1, seed=3)
        mdrs = []
        for amplitude in (0.05, 0.1, 0.2):
            faults = FaultProfile.step(500, sensor_bias=[amplitude, -amplitude])
            test = simulate(random_model, u, noise=noise_model, faults=faults, seed=4)
            mdrs.append(run_detection(det, test).mdr)
        assert mdrs[0] >= mdrs[1] >= mdrs[2]

    @pytest.mark.slow
    def test_sensor_step_settled_detection_across_seeds(self, random_model, noise_model):
        s = 4
        train = simulate(random_model, gaussian_input(5000, 1, seed=1), noise=noise_model, seed=2)
        det = train_detector(train, s, gamma=7)
        direction = np.array([1.0, -1.0]) / np.sqrt(2.0)
        shift = np.concatenate([np.zeros(s * random_model.p), np.tile(direction, s)])
        # SNR 10 en el espacio residual blanqueado
        amplitude = 10.0 / linalg.norm(det.cov_inv_factor @ det.U2 @ shift)
        missed = []
        for seed in range(100):
            faults = FaultProfile.step(150, sensor_bias=amplitude * direction)
            u = gaussian_input(300, 1, seed=100 + seed)
            test = simulate(random_model, u, noise=noise_model, faults=faults, seed=seed)
            if run_detection(det, test).mdr_settled != 0.0:
                missed.append(seed)
        assert missed == []
