import numpy as np
import pytest

from lindbladcraft.errors import DimensionMismatchError, NonFiniteError, SingularMetricError
from lindbladcraft.operators.pauli import pauli_string_matrix
from lindbladcraft.vqs.ansatz import HvaAnsatz, tfim_ansatz
from lindbladcraft.vqs.mclachlan import (
    ShotNoise,
    VariationalState,
    assemble_m_v,
    derivative_state,
    derivative_states,
    mclachlan_step,
    solve_metric,
    statevector,
    velocity,
)


@pytest.fixture
def theta(rng):
    return rng.uniform(-np.pi, np.pi, size=tfim_ansatz().n_params)


class TestStatevector:
    def test_rx_pi_flips(self):
        ansatz = HvaAnsatz(n_qubits=1, generators=("X",))
        np.testing.assert_allclose(statevector(ansatz, np.array([np.pi])), [0, -1j], atol=1e-15)

    def test_zero_parameters_give_reference(self):
        np.testing.assert_array_equal(statevector(tfim_ansatz(), np.zeros(21)), [0, 0, 0, 1])

    def test_wrong_parameter_count(self):
        with pytest.raises(DimensionMismatchError):
            statevector(tfim_ansatz(), np.zeros(3))

    def test_is_normalized(self, theta):
        assert np.linalg.norm(statevector(tfim_ansatz(), theta)) == pytest.approx(1.0)


class TestDerivatives:
    def test_matches_finite_differences(self, theta):
        ansatz = tfim_ansatz()
        psi, xi = derivative_states(ansatz, theta)
        np.testing.assert_allclose(psi, statevector(ansatz, theta), atol=1e-14)
        h = 1e-6
        for k in (0, 6, 13, 20):
            shift = np.zeros_like(theta)
            shift[k] = h
            numeric = (statevector(ansatz, theta + shift) - statevector(ansatz, theta - shift)) / (2 * h)
            np.testing.assert_allclose(-0.5j * xi[k], numeric, atol=1e-8)

    def test_single_derivative(self, theta):
        ansatz = tfim_ansatz()
        np.testing.assert_array_equal(derivative_state(ansatz, theta, 4), derivative_states(ansatz, theta)[1][4])
        with pytest.raises(ValueError):
            derivative_state(ansatz, theta, 21)

    def test_metric_diagonal(self, theta):
        m, _ = assemble_m_v(tfim_ansatz(), theta, pauli_string_matrix("ZZ"))
        np.testing.assert_allclose(np.diag(m), 0.25, atol=1e-14)
        np.testing.assert_allclose(m, m.T, atol=1e-15)
        assert np.linalg.eigvalsh(m).min() > -1e-12

    def test_hamiltonian_dimension(self, theta):
        with pytest.raises(DimensionMismatchError):
            assemble_m_v(tfim_ansatz(), theta, np.eye(2))


class TestSolveMetric:
    def test_regular(self):
        m = np.diag([0.25, 0.5])
        np.testing.assert_allclose(solve_metric(m, np.array([0.5, 0.5]), regularization=0.0), [2.0, 1.0])

    def test_singular_direction_is_dropped(self):
        m = np.array([[0.25, 0.25], [0.25, 0.25]])
        theta_dot = solve_metric(m, np.array([0.5, 0.5]), regularization=0.0)
        np.testing.assert_allclose(m @ theta_dot, [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(theta_dot, [1.0, 1.0], atol=1e-12)

    def test_not_positive_semidefinite(self):
        with pytest.raises(SingularMetricError):
            solve_metric(np.diag([1.0, -1.0]), np.ones(2))

    def test_zero_metric(self):
        np.testing.assert_array_equal(solve_metric(np.zeros((2, 2)), np.zeros(2), regularization=0.0), [0.0, 0.0])
        with pytest.raises(SingularMetricError):
            solve_metric(np.zeros((2, 2)), np.ones(2), regularization=0.0)


class TestMclachlanStep:
    def test_uniform_decay_only_changes_gamma(self, theta):
        ansatz = tfim_ansatz()
        kappa = 0.3
        hamiltonian = -1j * kappa * np.eye(4)
        theta_dot, rate = velocity(ansatz, theta, hamiltonian)
        np.testing.assert_allclose(theta_dot, 0.0, atol=1e-12)
        assert rate == pytest.approx(-kappa)
        state = VariationalState(theta=theta.copy(), gamma=1.0, ansatz=ansatz)
        for _ in range(10):
            state = mclachlan_step(state, hamiltonian, 0.1)
        np.testing.assert_allclose(state.theta, theta, atol=1e-10)
        assert state.gamma == pytest.approx(np.exp(-kappa), rel=1e-12)

    def test_exact_single_rotation(self):
        # exp(-i X t)|0> is the ansatz state at theta = 2t
        ansatz = HvaAnsatz(n_qubits=1, generators=("X",))
        state = VariationalState.zeros(ansatz)
        for _ in range(10):
            state = mclachlan_step(state, pauli_string_matrix("X"), 0.1, regularization=0.0)
        np.testing.assert_allclose(state.theta, [2.0], atol=1e-12)
        assert state.gamma == pytest.approx(1.0)

    def test_invalid_substep(self):
        with pytest.raises(ValueError):
            mclachlan_step(VariationalState.zeros(tfim_ansatz()), np.eye(4), 0.0)

    def test_non_finite_hamiltonian(self):
        hamiltonian = np.eye(4, dtype=np.complex128)
        hamiltonian[0, 0] = np.nan
        with pytest.raises((NonFiniteError, SingularMetricError, np.linalg.LinAlgError)):
            mclachlan_step(VariationalState.zeros(tfim_ansatz()), hamiltonian, 0.1)


class TestShotNoise:
    def test_perturbation_is_symmetric(self, rng):
        m = np.diag([0.25, 0.25, 0.25])
        m_noisy, v_noisy = ShotNoise(100, rng).perturb(m, np.zeros(3), 1.0)
        np.testing.assert_allclose(m_noisy, m_noisy.T)
        np.testing.assert_array_equal(np.diag(m_noisy), np.diag(m))
        assert np.any(v_noisy != 0.0)

    def test_noise_shrinks_with_shots(self):
        v = np.zeros(2000)
        few = ShotNoise(100, np.random.default_rng(0)).perturb(np.eye(1), v, 1.0)[1]
        many = ShotNoise(10_000, np.random.default_rng(0)).perturb(np.eye(1), v, 1.0)[1]
        assert few.std() == pytest.approx(0.05, rel=0.1)
        assert many.std() == pytest.approx(0.005, rel=0.1)
