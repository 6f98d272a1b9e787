"""Tests de la planta LTI: estructura, síntesis de ganancias, simulación y residuos."""

import numpy as np
import pytest
from scipy import linalg

from src.core.exceptions import ModelError, ParameterError, ShapeError
from src.ltisim.gains import (
    deadbeat_gain,
    design_gains,
    kalman_gain,
    observer_gain_deadbeat,
    observer_gain_place,
    riccati_residual,
)
from src.ltisim.models import FaultProfile, NoiseModel, StateSpaceModel
from src.ltisim.random_models import random_minimal_model
from src.ltisim.residuals import latent_signals, observer_residual
from src.ltisim.simulator import gaussian_input, simulate
from src.ltisim.structure import (
    controllability_matrix,
    markov_parameters,
    observability_index,
    observability_matrix,
    spectral_radius,
)
from src.sigkit.models import SignalSequence
from src.sigkit.rank import numerical_rank


def _nilpotency(M: np.ndarray) -> float:
    return linalg.norm(np.linalg.matrix_power(M, M.shape[0]), 2)


@pytest.mark.unit
class TestStateSpaceModel:

    def test_default_feedthrough(self, scalar_model):
        np.testing.assert_array_equal(scalar_model.D, [[0.0]])
        assert (scalar_model.n, scalar_model.p, scalar_model.m) == (1, 1, 1)

    def test_rejects_uncontrollable(self):
        with pytest.raises(ModelError, match="controlable"):
            StateSpaceModel(np.eye(2), [[1.0], [1.0]], np.eye(2))

    def test_rejects_unobservable(self):
        with pytest.raises(ModelError, match="observable"):
            StateSpaceModel(np.diag([0.5, 0.3]), np.eye(2), [[1.0, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            StateSpaceModel(np.eye(2), [[1.0]], [[1.0, 0.0]], validate=False)

    def test_matrices_are_read_only(self, scalar_model):
        with pytest.raises(ValueError):
            scalar_model.A[0, 0] = 1.0


@pytest.mark.unit
class TestStructure:

    def test_observability_matrix(self):
        model = StateSpaceModel(np.eye(2), [[1.0], [0.0]], [[1.0, 0.0]], validate=False)
        np.testing.assert_array_equal(observability_matrix(model, 2), [[1, 0], [1, 0]])

    def test_controllability_matrix(self):
        model = StateSpaceModel([[0.0]], [[1.0]], [[1.0]])
        np.testing.assert_array_equal(controllability_matrix(model, 3), [[1, 0, 0]])

    def test_index_full_state(self, rng):
        A = 0.5 * rng.standard_normal((3, 3))
        model = StateSpaceModel(A, rng.standard_normal((3, 3)), np.eye(3))
        assert observability_index(model) == 1

    def test_index_single_output_chain(self, chain_model):
        assert observability_index(chain_model) == 3

    def test_index_matches_scan(self):
        model = random_minimal_model(np.random.default_rng(21), n=4, p=1, m=2)
        mu = observability_index(model)
        assert 2 <= mu <= 4
        scan = next(s for s in range(1, 5) if numerical_rank(observability_matrix(model, s)) == 4)
        assert mu == scan

    def test_markov_parameters(self, scalar_model):
        blocks = markov_parameters(scalar_model, 4)
        np.testing.assert_allclose(np.concatenate(blocks).ravel(), [0.0, 1.0, 0.5, 0.25])


@pytest.mark.unit
class TestDeadbeatGain:

    def test_nilpotent_plant_returns_zero(self):
        model = StateSpaceModel([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]])
        np.testing.assert_array_equal(deadbeat_gain(model), np.zeros((1, 2)))

    def test_scalar(self):
        model = StateSpaceModel([[0.8]], [[2.0]], [[1.0]])
        np.testing.assert_allclose(deadbeat_gain(model), [[-0.4]])

    def test_single_input_chain(self, chain_model):
        F = deadbeat_gain(chain_model)
        A_F, _ = chain_model.closed_loop(F)
        assert _nilpotency(A_F) < 1e-8

    def test_multi_input(self, mimo_model):
        F = deadbeat_gain(mimo_model, seed=3)
        A_F, _ = mimo_model.closed_loop(F)
        assert F.shape == (2, 2)
        assert _nilpotency(A_F) < 1e-8 * (1 + linalg.norm(mimo_model.A, 2)) ** 2

    def test_uncontrollable(self):
        model = StateSpaceModel(np.diag([0.5, 0.3]), [[1.0], [0.0]], np.eye(2), validate=False)
        with pytest.raises(ModelError):
            deadbeat_gain(model)

    @pytest.mark.slow
    @pytest.mark.parametrize("k", range(200))
    def test_random_controllable_models(self, k):
        rng = np.random.default_rng(k)
        n, p, m = int(rng.integers(1, 5)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        model = random_minimal_model(rng, n, p, m)
        A_F, _ = model.closed_loop(deadbeat_gain(model, seed=k))
        assert _nilpotency(A_F) <= 1e-8 * (1 + linalg.norm(model.A, 2)) ** n


@pytest.mark.unit
class TestObserverGains:

    def test_scalar_deadbeat(self):
        model = StateSpaceModel([[0.9]], [[1.0]], [[1.0]])
        np.testing.assert_allclose(observer_gain_place(model, 0.0), [[0.9]])

    def test_full_state_measurement(self, rng):
        model = StateSpaceModel(0.5 * rng.standard_normal((2, 2)), np.eye(2), np.eye(2))
        A_L, _ = model.observer_matrices(observer_gain_deadbeat(model))
        assert _nilpotency(A_L) < 1e-8

    def test_dual_deadbeat_random(self, random_model):
        A_L, _ = random_model.observer_matrices(observer_gain_deadbeat(random_model))
        assert _nilpotency(A_L) < 1e-8 * (1 + linalg.norm(random_model.A, 2)) ** 3

    def test_place_radius(self, random_model):
        L = observer_gain_place(random_model, 0.4)
        A_L, _ = random_model.observer_matrices(L)
        assert spectral_radius(A_L) <= 0.4 + 1e-6

    def test_place_invalid_radius(self, random_model):
        with pytest.raises(ParameterError):
            observer_gain_place(random_model, 1.0)

    def test_unobservable(self):
        model = StateSpaceModel(np.diag([0.5, 0.3]), np.eye(2), [[1.0, 0.0]], validate=False)
        with pytest.raises(ModelError):
            observer_gain_deadbeat(model)


@pytest.mark.unit
class TestKalmanGain:

    def test_zero_process_noise(self, random_model):
        noise = NoiseModel(np.zeros((3, 3)), None, np.eye(2))
        gain = kalman_gain(random_model, noise)
        np.testing.assert_allclose(gain.P, 0.0, atol=1e-14)
        np.testing.assert_allclose(gain.L, 0.0, atol=1e-14)
        np.testing.assert_allclose(gain.Sigma_r, np.eye(2))

    def test_scalar_fixed_point(self, scalar_model):
        P = 1.0
        for _ in range(200):
            P = 0.25 * P + 1.0 - 0.25 * P**2 / (P + 1.0)
        gain = kalman_gain(scalar_model, NoiseModel.isotropic(1, 1, 1.0, 1.0))
        assert gain.P[0, 0] == pytest.approx(P, rel=1e-10)
        assert gain.L[0, 0] == pytest.approx(0.5 * P / (P + 1.0), rel=1e-10)

    def test_matches_discrete_are(self, random_model, rng):
        G = rng.standard_normal((5, 5))
        joint = G @ G.T + 0.1 * np.eye(5)
        noise = NoiseModel(joint[:3, :3], joint[:3, 3:], joint[3:, 3:])
        gain = kalman_gain(random_model, noise)
        P = linalg.solve_discrete_are(
            random_model.A.T, random_model.C.T, noise.Sigma_w, noise.Sigma_v, s=noise.S_wv
        )
        np.testing.assert_allclose(gain.P, P, rtol=1e-8, atol=1e-10)
        assert spectral_radius(random_model.A - gain.L @ random_model.C) < 1.0
        assert linalg.eigvalsh(gain.Sigma_r)[0] > 0
        assert riccati_residual(random_model, noise, gain.P) < 1e-10

    def test_dimension_mismatch(self, random_model):
        with pytest.raises(ParameterError):
            kalman_gain(random_model, NoiseModel.isotropic(2, 2, 1.0, 1.0))


@pytest.mark.unit
class TestNoiseModel:

    def test_rejects_indefinite(self):
        with pytest.raises(ParameterError, match="PSD"):
            NoiseModel(np.eye(1), [[2.0]], np.eye(1))

    def test_sqrt_joint(self, rng):
        G = rng.standard_normal((3, 3))
        joint = G @ G.T
        noise = NoiseModel(joint[:2, :2], joint[:2, 2:], joint[2:, 2:])
        root = noise.sqrt_joint()
        np.testing.assert_allclose(root @ root, joint, atol=1e-12)

    def test_scaled(self):
        noise = NoiseModel.isotropic(2, 1, 0.5, 1.0).scaled(2.0)
        np.testing.assert_allclose(noise.Sigma_w, np.eye(2))
        np.testing.assert_allclose(noise.Sigma_v, [[4.0]])


@pytest.mark.unit
class TestSimulate:

    def test_zero_everything(self, random_model):
        traj = simulate(random_model, SignalSequence(np.zeros((20, 1))))
        assert not traj.y.samples.any()
        assert not traj.labels.any()

    def test_feedthrough_only(self):
        model = StateSpaceModel([[0.5]], [[1.0]], [[0.0], [0.0]], np.eye(2, 1), validate=False)
        u = gaussian_input(15, 1, seed=1)
        traj = simulate(model, u)
        np.testing.assert_allclose(traj.y.samples[:, :1], u.samples)

    def test_impulse_response(self, random_model):
        u = np.zeros((6, 1))
        u[0] = 1.0
        traj = simulate(random_model, SignalSequence(u))
        expected = np.hstack(markov_parameters(random_model, 6)).T
        np.testing.assert_allclose(traj.y.samples, expected, atol=1e-14)

    def test_deterministic_for_seed(self, random_model, noise_model):
        u = gaussian_input(50, 1, seed=2)
        first = simulate(random_model, u, noise=noise_model, seed=9)
        second = simulate(random_model, u, noise=noise_model, seed=9)
        np.testing.assert_array_equal(first.y.samples, second.y.samples)

    def test_linearity(self, random_model):
        u1, u2 = gaussian_input(40, 1, seed=1), gaussian_input(40, 1, seed=2)
        y = simulate(random_model, u1 + u2).y.samples
        y12 = simulate(random_model, u1).y.samples + simulate(random_model, u2).y.samples
        np.testing.assert_allclose(y, y12, rtol=1e-12, atol=1e-12)

    def test_recorded_input_excludes_actuator_fault(self, random_model):
        u = gaussian_input(30, 1, seed=1)
        faults = FaultProfile.step(10, actuator_bias=[2.0])
        traj = simulate(random_model, u, faults=faults)
        np.testing.assert_array_equal(traj.u.samples, u.samples)
        assert traj.labels[10:].all() and not traj.labels[:10].any()

    def test_sensor_gain_fault(self, random_model):
        u = gaussian_input(30, 1, seed=1)
        nominal = simulate(random_model, u)
        faulty = simulate(random_model, u, faults=FaultProfile.step(5, sensor_gain=[0.5]))
        np.testing.assert_allclose(faulty.y.samples[5:], 1.5 * nominal.y.samples[5:])
        np.testing.assert_array_equal(faulty.y.samples[:5], nominal.y.samples[:5])

    def test_input_dimension_mismatch(self, random_model):
        with pytest.raises(ShapeError):
            simulate(random_model, SignalSequence(np.zeros((5, 2))))


@pytest.mark.unit
class TestResiduals:

    def test_exact_observer(self, random_model, rng):
        x0 = rng.standard_normal(3)
        traj = simulate(random_model, gaussian_input(40, 1, seed=1), x0=x0)
        L = observer_gain_place(random_model, 0.5)
        r = observer_residual(random_model, L, traj, xhat0=x0)
        np.testing.assert_allclose(r.samples, 0.0, atol=1e-10)

    def test_deadbeat_observer_converges(self, random_model, rng):
        traj = simulate(random_model, gaussian_input(30, 1, seed=1), x0=rng.standard_normal(3))
        L = observer_gain_deadbeat(random_model)
        r = observer_residual(random_model, L, traj)
        np.testing.assert_allclose(r.samples[random_model.n:], 0.0, atol=1e-6)

    def test_open_loop_sensor_fault(self, random_model, rng):
        x0 = rng.standard_normal(3)
        bias = np.array([0.7, -1.2])
        faults = FaultProfile.step(12, sensor_bias=bias)
        traj = simulate(random_model, gaussian_input(30, 1, seed=1), x0=x0, faults=faults)
        r = observer_residual(random_model, np.zeros((3, 2)), traj, xhat0=x0)
        np.testing.assert_allclose(r.samples[12:], np.tile(bias, (18, 1)), atol=1e-10)
        np.testing.assert_allclose(r.samples[:12], 0.0, atol=1e-10)

    def test_latent_with_zero_feedback(self, random_model, noisy_trajectory):
        L = observer_gain_place(random_model, 0.5)
        v, _ = latent_signals(random_model, np.zeros((1, 3)), L, noisy_trajectory)
        np.testing.assert_array_equal(v.samples, noisy_trajectory.u.samples)

    def test_latent_noise_free(self, random_model, rng):
        x0 = rng.standard_normal(3)
        traj = simulate(random_model, gaussian_input(25, 1, seed=1), x0=x0)
        F = deadbeat_gain(random_model)
        v, r = latent_signals(random_model, F, observer_gain_place(random_model, 0.3), traj, xhat0=x0)
        np.testing.assert_allclose(r.samples, 0.0, atol=1e-10)
        np.testing.assert_allclose(v.samples, traj.u.samples - traj.x.samples @ F.T, atol=1e-10)


@pytest.mark.unit
class TestDesignGains:

    def test_kalman_requires_noise(self, random_model):
        with pytest.raises(ParameterError):
            design_gains(random_model, observer="kalman")

    def test_pair_is_schur(self, random_model, noise_model):
        gains = design_gains(random_model, observer="kalman", noise=noise_model).check(random_model)
        A_F, _ = random_model.closed_loop(gains.F)
        assert _nilpotency(A_F) < 1e-6

    def test_unknown_observer(self, random_model):
        with pytest.raises(ParameterError):
            design_gains(random_model, observer="luenberger")


@pytest.mark.unit
def test_random_minimal_model_is_stable():
    model = random_minimal_model(np.random.default_rng(0), n=4, p=2, m=3)
    assert spectral_radius(model.A) < 1.0
    assert numerical_rank(controllability_matrix(model, 4)) == 4
