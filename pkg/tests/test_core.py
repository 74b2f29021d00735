import numpy as np
import pytest

from fidest.core import (
    PAULI_LABELS,
    PAULI_PRODUCTS,
    fidelity,
    ket_target,
    kron2,
    pauli_coeffs,
    pauli_product_basis,
    pauli_reconstruct,
    projector,
    random_density_matrix,
    trace_distance,
    validate_density_matrix,
    validate_ket,
)


def brute_force_pauli_coeffs(op):
    """Independent oracle: explicit trace against every Pauli product."""
    coeffs = np.empty((4, 4))
    for i, r in enumerate(PAULI_LABELS):
        for j, s in enumerate(PAULI_LABELS):
            coeffs[i, j] = np.trace(op @ PAULI_PRODUCTS[(r, s)]).real
    return coeffs


class TestKetTarget:
    def test_symmetric_point(self):
        psi = ket_target(np.pi / 4)
        np.testing.assert_allclose(psi, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)],
                                   atol=1e-15)

    def test_theta_zero_is_11(self):
        np.testing.assert_allclose(ket_target(0.0), [0, 0, 0, 1], atol=1e-15)

    def test_theta_pi_over_8(self):
        psi = ket_target(np.pi / 8)
        np.testing.assert_allclose(
            psi, [0.3826834323650898, 0, 0, 0.9238795325112867], atol=1e-15)

    @pytest.mark.parametrize("theta", [-0.1, np.pi / 2 + 0.01, 3.2])
    def test_out_of_range_rejected(self, theta):
        with pytest.raises(ValueError):
            ket_target(theta)

    def test_unit_norm_across_grid(self):
        for k in range(17):
            psi = ket_target(k * np.pi / 32)
            assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
            validate_ket(psi)


class TestFidelity:
    def test_pure_self_fidelity(self):
        psi = ket_target(0.3)
        assert fidelity(projector(psi), psi) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        psi = ket_target(1.1)
        assert fidelity(np.eye(4) / 4, psi) == pytest.approx(0.25, abs=1e-12)

    def test_depolarized_state(self):
        # (1-p)|psi><psi| + p I/4 has fidelity 1 - 3p/4
        psi = ket_target(np.pi / 4)
        p = 0.12
        rho = (1 - p) * projector(psi) + p * np.eye(4) / 4
        assert fidelity(rho, psi) == pytest.approx(0.91, abs=1e-12)

    def test_non_hermitian_rejected(self):
        bad = np.eye(4, dtype=complex)
        bad[0, 1] = 0.5
        with pytest.raises(ValueError):
            fidelity(bad, ket_target(0.5))

    def test_matches_trace_oracle_on_random_states(self):
        rng = np.random.default_rng(11)
        psi = ket_target(np.pi / 8)
        proj = projector(psi)
        for _ in range(100):
            rho = random_density_matrix(rng)
            oracle = np.trace(rho @ proj).real
            assert fidelity(rho, psi) == pytest.approx(oracle, abs=1e-12)

    def test_linearity_in_rho(self):
        rng = np.random.default_rng(12)
        psi = ket_target(0.7)
        for _ in range(50):
            rho1 = random_density_matrix(rng)
            rho2 = random_density_matrix(rng)
            a = rng.uniform(0, 1)
            mixed = a * rho1 + (1 - a) * rho2
            expected = a * fidelity(rho1, psi) + (1 - a) * fidelity(rho2, psi)
            assert fidelity(mixed, psi) == pytest.approx(expected, abs=1e-12)


class TestPauliCoeffs:
    def test_target_state_coefficients(self):
        # only II, XX, YY, ZZ, IZ, ZI survive for sin(t)|00> + cos(t)|11>
        for theta in (0.2, np.pi / 8, np.pi / 4, 1.3):
            coeffs = pauli_coeffs(ket_target(theta))
            s2, c2 = np.sin(2 * theta), np.cos(2 * theta)
            expected = np.zeros((4, 4))
            expected[0, 0] = 1.0
            expected[1, 1] = s2       # XX
            expected[2, 2] = -s2      # YY
            expected[3, 3] = 1.0      # ZZ
            expected[0, 3] = -c2      # IZ
            expected[3, 0] = -c2      # ZI
            np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_pi_over_8_values(self):
        coeffs = pauli_coeffs(ket_target(np.pi / 8))
        assert coeffs[1, 1] == pytest.approx(0.7071067811865476, abs=1e-12)
        assert coeffs[0, 3] == pytest.approx(-0.7071067811865476, abs=1e-12)

    def test_identity_decomposition(self):
        coeffs = pauli_coeffs(np.eye(4) / 4)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_matches_brute_force_on_random_states(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            rho = random_density_matrix(rng)
            np.testing.assert_allclose(pauli_coeffs(rho),
                                       brute_force_pauli_coeffs(rho), atol=1e-12)

    def test_round_trip_reconstruction(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            # random Hermitian trace-1 input, not necessarily positive
            g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = 0.5 * (g + g.conj().T)
            h = h / np.trace(h).real
            np.testing.assert_allclose(pauli_reconstruct(pauli_coeffs(h)), h,
                                       atol=1e-12)

    def test_coefficients_bounded_for_physical_states(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            coeffs = pauli_coeffs(random_density_matrix(rng))
            assert coeffs[0, 0] == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.abs(coeffs) <= 1.0 + 1e-12)


class TestBasisHelpers:
    def test_product_bases_are_orthonormal(self):
        for first in "XYZ":
            for second in "XYZ":
                kets = pauli_product_basis(first, second)
                gram = np.array([[np.vdot(u, v) for v in kets] for u in kets])
                np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)

    def test_kron2_shape_and_values(self):
        u = np.array([1.0, 0.0])
        v = np.array([0.0, 1.0])
        np.testing.assert_allclose(kron2(u, v), [0, 1, 0, 0])


class TestValidators:
    def test_validate_density_matrix_accepts_physical(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            validate_density_matrix(random_density_matrix(rng))

    def test_validate_density_matrix_rejects_trace(self):
        with pytest.raises(ValueError):
            validate_density_matrix(np.eye(4) / 2)

    def test_validate_density_matrix_rejects_negative(self):
        bad = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            validate_density_matrix(bad)

    def test_trace_distance(self):
        a = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
        b = np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex)
        assert trace_distance(a, b) == pytest.approx(1.0, abs=1e-12)
        assert trace_distance(a, a) == pytest.approx(0.0, abs=1e-12)
