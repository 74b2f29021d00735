"""Full two-qubit state tomography used for calibrating simulated runs.

Reconstruction is linear inversion of run-time weighted channel frequencies
in the nine product Pauli bases, followed by projection of readout noise onto
the physical (positive semidefinite, trace-1) set.  The projection truncates
negative eigenvalues and redistributes their mass over the remaining ones,
which yields the Frobenius-closest physical state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .core import (
    fidelity,
    is_hermitian,
    ket_target,
    pauli_product_basis,
    pauli_reconstruct,
    projector,
)
from .counts import CountRecord, simulate_counts
from .estimators import pauli_channel_estimates
from .strategy import MeasurementSetting

TOMO_GROUPS = tuple(a + b for a, b in product("XYZ", repeat=2))
_SIGN_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class TomographyResult:
    rho_hat: np.ndarray = field(repr=False)
    fidelity_to_target: float
    per_basis_counts: dict[str, float]


def tomo_settings(total_time: float) -> list[MeasurementSetting]:
    """36 rank-1 settings: the 9 product bases {X,Y,Z} x {X,Y,Z}, equal time per basis."""
    if total_time <= 0.0:
        raise ValueError(f"total_time must be positive, got {total_time!r}")
    group_fraction = 1.0 / len(TOMO_GROUPS)
    channel_fraction = group_fraction / 4.0
    settings = []
    for group in TOMO_GROUPS:
        kets = pauli_product_basis(group[0], group[1])
        for channel, (label, ket) in enumerate(zip(_SIGN_LABELS, kets), start=1):
            settings.append(MeasurementSetting(
                group=group,
                channel=channel,
                label=label,
                projector=projector(ket),
                time_fraction=channel_fraction,
                run_time=channel_fraction * total_time,
            ))
    return settings


def linear_inversion(records: list[CountRecord]) -> np.ndarray:
    """Hermitian trace-1 estimate from the nine product-basis records.

    Each basis PQ yields the correlator <P x Q> plus the two marginals
    <P x I> and <I x Q>; every marginal is measurable in three bases and the
    three estimates are averaged with equal weight.  The output can carry
    negative eigenvalues at finite counts; see `mle_project`.
    """
    by_group = {record.group: record for record in records}
    missing = [g for g in TOMO_GROUPS if g not in by_group]
    if missing:
        raise ValueError(f"missing tomography records for bases {missing}")

    coeffs = np.zeros((4, 4))
    coeffs[0, 0] = 1.0
    index = {"I": 0, "X": 1, "Y": 2, "Z": 3}
    for group in TOMO_GROUPS:
        correlation, first, second = pauli_channel_estimates(by_group[group])
        i, j = index[group[0]], index[group[1]]
        coeffs[i, j] = correlation
        coeffs[i, 0] += first / 3.0
        coeffs[0, j] += second / 3.0
    return pauli_reconstruct(coeffs)


def mle_project(h: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite trace-1 matrix.

    Negative eigenvalues are zeroed from the smallest up and their total is
    redistributed uniformly over the eigenvalues that remain; already physical
    inputs come back unchanged.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, atol=1e-10):
        raise ValueError("projection requires a Hermitian input")
    if abs(np.trace(h).real - 1.0) > 1e-10:
        raise ValueError("projection requires a trace-1 input")
    values, vectors = np.linalg.eigh(h)
    if values[0] >= 0.0:
        return h

    descending = values[::-1]
    dim = descending.size
    shifted = np.zeros(dim)
    spill = 0.0
    i = dim
    while descending[i - 1] + spill / i < 0.0:
        spill += descending[i - 1]
        i -= 1
    shifted[:i] = descending[:i] + spill / i

    vectors = vectors[:, ::-1]
    rho = (vectors * shifted) @ vectors.conj().T
    return 0.5 * (rho + rho.conj().T)


def tomo_fidelity(rho, pair_rate: float, total_time: float, theta: float,
                  rng: np.random.Generator) -> TomographyResult:
    """Simulate a tomography run of the given state and score it against the target."""
    settings = tomo_settings(total_time)
    records = simulate_counts(rho, settings, pair_rate, rng)
    rho_hat = mle_project(linear_inversion(records))
    return TomographyResult(
        rho_hat=rho_hat,
        fidelity_to_target=fidelity(rho_hat, ket_target(theta)),
        per_basis_counts={record.group: record.total_counts for record in records},
    )
