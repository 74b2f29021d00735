"""Dense two-qubit primitives: kets, density matrices, Pauli decompositions.

Everything lives in the fixed computational basis |00>, |01>, |10>, |11>;
polarization-labelled channels map H -> 0 and V -> 1.  States and operators
are plain numpy arrays and all functions here are pure, so they can be shared
freely across threads.
"""

from __future__ import annotations

import numpy as np

# absolute tolerance for hermiticity / trace / norm checks
ATOL = 1e-12
# eigenvalues of a physical state may dip this far below zero (round-off only)
EIG_FLOOR = -1e-10

BASIS_LABELS = ("00", "01", "10", "11")

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = {"I": SIGMA_I, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
PAULI_LABELS = "IXYZ"

# +1 / -1 eigenkets of each single-qubit Pauli
_SQRT_HALF = 1.0 / np.sqrt(2.0)
PAULI_EIGENKETS = {
    "X": (np.array([1.0, 1.0], dtype=complex) * _SQRT_HALF,
          np.array([1.0, -1.0], dtype=complex) * _SQRT_HALF),
    "Y": (np.array([1.0, 1.0j], dtype=complex) * _SQRT_HALF,
          np.array([1.0, -1.0j], dtype=complex) * _SQRT_HALF),
    "Z": (np.array([1.0, 0.0], dtype=complex),
          np.array([0.0, 1.0], dtype=complex)),
}

# all 16 two-qubit Pauli products, keyed by label pair
PAULI_PRODUCTS = {
    (r, s): np.kron(PAULIS[r], PAULIS[s])
    for r in PAULI_LABELS
    for s in PAULI_LABELS
}

IDENTITY4 = np.eye(4, dtype=complex)


def kron2(u, v) -> np.ndarray:
    """Product ket of two single-qubit kets."""
    return np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))


def projector(ket) -> np.ndarray:
    """Rank-1 projector |ket><ket|."""
    k = np.asarray(ket, dtype=complex)
    return np.outer(k, k.conj())


def ket_target(theta: float) -> np.ndarray:
    """Target ket sin(theta)|00> + cos(theta)|11>, theta in [0, pi/2]."""
    if not 0.0 <= theta <= np.pi / 2.0:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    return np.array([np.sin(theta), 0.0, 0.0, np.cos(theta)], dtype=complex)


def is_hermitian(op, atol: float = ATOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) <= atol)


def validate_ket(psi, atol: float = ATOL) -> np.ndarray:
    """Check unit norm and return the ket as a complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError(f"expected a 4-component ket, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"ket is not normalized: |psi| = {norm}")
    return psi


def validate_density_matrix(rho, atol: float = ATOL,
                            eig_floor: float = EIG_FLOOR) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > atol:
        raise ValueError(f"density matrix trace is {trace}, expected 1")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < eig_floor:
        raise ValueError(f"density matrix has negative eigenvalue {lowest}")
    return rho


def born_probability(rho, proj) -> float:
    """tr(rho @ proj), real part clipped to [0, 1]."""
    p = np.einsum("ij,ji->", np.asarray(rho), np.asarray(proj)).real
    return float(min(max(p, 0.0), 1.0))


def fidelity(rho, psi) -> float:
    """Overlap <psi|rho|psi> of a state with a pure target, clamped to [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise ValueError("fidelity requires a Hermitian state")
    psi = np.asarray(psi, dtype=complex)
    value = np.vdot(psi, rho @ psi).real
    return float(min(max(value, 0.0), 1.0))


def pauli_coeffs(op) -> np.ndarray:
    """Real coefficients c[r, s] = tr(op . Sigma_r x Sigma_s) over r, s in IXYZ.

    Accepts a Hermitian 4x4 operator, or a 4-component ket which is decomposed
    as its projector.  The inverse map is `pauli_reconstruct`:
    op = (1/4) sum_rs c[r, s] Sigma_r x Sigma_s.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape == (4,):
        op = projector(op)
    if not is_hermitian(op):
        raise ValueError("Pauli decomposition requires a Hermitian operator")
    coeffs = np.empty((4, 4))
    for i, r in enumerate(PAULI_LABELS):
        for j, s in enumerate(PAULI_LABELS):
            coeffs[i, j] = np.einsum("ij,ji->", op, PAULI_PRODUCTS[(r, s)]).real
    return coeffs


def pauli_reconstruct(coeffs) -> np.ndarray:
    """Operator (1/4) sum_rs coeffs[r, s] Sigma_r x Sigma_s."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (4, 4):
        raise ValueError(f"expected 16 coefficients as a 4x4 array, got {coeffs.shape}")
    op = np.zeros((4, 4), dtype=complex)
    for i, r in enumerate(PAULI_LABELS):
        for j, s in enumerate(PAULI_LABELS):
            op += coeffs[i, j] * PAULI_PRODUCTS[(r, s)]
    return 0.25 * op


def pauli_product_basis(first: str, second: str) -> list[np.ndarray]:
    """Four product eigenkets of Sigma_first x Sigma_second.

    Channel order is (++, +-, -+, --) by the signs of the single-qubit
    eigenvalues.
    """
    u = PAULI_EIGENKETS[first]
    v = PAULI_EIGENKETS[second]
    return [kron2(u[i], v[j]) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))]


def trace_distance(a, b) -> float:
    """(1/2) ||a - b||_1 for Hermitian matrices."""
    eigs = np.linalg.eigvalsh(np.asarray(a) - np.asarray(b))
    return float(0.5 * np.sum(np.abs(eigs)))


def random_density_matrix(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    """Random physical two-qubit state (Ginibre ensemble; Haar ket if pure)."""
    if pure:
        vec = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        return projector(vec / np.linalg.norm(vec))
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
