"""Noisy state preparation and Poissonian photon-count simulation.

States are prepared by degrading the pure target with a simple noise model
and counts are drawn per channel as A ~ Poisson(rate * run_time * tr(rho P)),
matching photon-counting statistics where the variance of a count equals its
mean.  Photon loss and source-brightness drift are folded into the single
effective `pair_rate`; the estimators only ever see counts and run times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    born_probability,
    fidelity,
    ket_target,
    projector,
    validate_density_matrix,
)
from .strategy import MeasurementSetting

NOISE_KINDS = ("depolarizing", "dephasing", "unitary-miscalibration")

# Measured state-preparation fidelities used as default calibration targets
# for simulated runs, indexed by grid point k (theta = k*pi/32).
CALIBRATION_FIDELITIES = {
    0: 0.972, 1: 0.961, 2: 0.954, 3: 0.944, 4: 0.939, 5: 0.935,
    6: 0.908, 7: 0.919, 8: 0.974, 9: 0.908, 10: 0.911, 11: 0.911,
    12: 0.919, 13: 0.926, 14: 0.945, 15: 0.949, 16: 0.963,
}


@dataclass(frozen=True)
class NoiseModel:
    """One-parameter noise channel applied to the pure target state."""

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.kind in ("depolarizing", "dephasing"):
            if not 0.0 <= self.parameter <= 1.0:
                raise ValueError(f"{self.kind} parameter must lie in [0, 1], got {self.parameter}")
        else:
            if not -math.pi <= self.parameter <= math.pi:
                raise ValueError(f"miscalibration angle must lie in [-pi, pi], got {self.parameter}")


def apply_noise(model: NoiseModel, theta: float) -> np.ndarray:
    """Noisy preparation of the target at the given angle.

    depolarizing: (1 - p)|psi><psi| + p I/4
    dephasing:    the |00><11| coherences damped by (1 - p)
    unitary-miscalibration: (R x R)|psi><psi|(R x R)^T for a rotation R by the
    model angle about the Y axis of both qubits.
    """
    psi = ket_target(theta)
    rho = projector(psi)
    p = model.parameter
    if model.kind == "depolarizing":
        rho = (1.0 - p) * rho + p * np.eye(4, dtype=complex) / 4.0
    elif model.kind == "dephasing":
        rho = rho.copy()
        rho[0, 3] *= 1.0 - p
        rho[3, 0] *= 1.0 - p
    else:
        c, s = math.cos(p), math.sin(p)
        r = np.array([[c, -s], [s, c]], dtype=complex)
        u = np.kron(r, r)
        rho = u @ rho @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return validate_density_matrix(rho)


def _miscalibration_fidelity(delta: float, theta: float) -> float:
    # overlap of the rotated target with itself: (1 - sin^2(d)(1 - sin 2t))^2
    s2 = math.sin(2.0 * theta)
    return (1.0 - math.sin(delta) ** 2 * (1.0 - s2)) ** 2


def calibrate_noise(kind: str, theta: float, target_fidelity: float) -> NoiseModel:
    """Noise model whose output hits the target fidelity to within 1e-9.

    Depolarizing and dephasing invert in closed form (F = 1 - 3p/4 and
    F = 1 - (p/2) sin^2 2t); the miscalibration angle is found by bisection.
    Raises ValueError when the target is out of reach for the chosen kind.
    """
    if not 0.25 < target_fidelity <= 1.0:
        raise ValueError(f"target fidelity must lie in (0.25, 1], got {target_fidelity}")
    if kind == "depolarizing":
        return NoiseModel(kind, 4.0 * (1.0 - target_fidelity) / 3.0)
    if kind == "dephasing":
        if target_fidelity == 1.0:
            return NoiseModel(kind, 0.0)
        s2 = math.sin(2.0 * theta)
        floor = 1.0 - 0.5 * s2 * s2
        if target_fidelity < floor:
            raise ValueError(
                f"dephasing at theta={theta} cannot go below fidelity {floor}; "
                f"requested {target_fidelity}")
        return NoiseModel(kind, 2.0 * (1.0 - target_fidelity) / (s2 * s2))
    if kind == "unitary-miscalibration":
        if target_fidelity == 1.0:
            return NoiseModel(kind, 0.0)
        floor = math.sin(2.0 * theta) ** 2
        if target_fidelity < floor:
            raise ValueError(
                f"miscalibration at theta={theta} cannot go below fidelity {floor}; "
                f"requested {target_fidelity}")
        lo, hi = 0.0, math.pi / 2.0  # fidelity decreases monotonically on this range
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _miscalibration_fidelity(mid, theta) > target_fidelity:
                lo = mid
            else:
                hi = mid
        model = NoiseModel(kind, 0.5 * (lo + hi))
        achieved = fidelity(apply_noise(model, theta), ket_target(theta))
        if abs(achieved - target_fidelity) > 1e-9:
            raise ValueError(
                f"miscalibration calibration stalled at fidelity {achieved} "
                f"for target {target_fidelity}")
        return model
    raise ValueError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")


@dataclass(frozen=True)
class CountRecord:
    """Per-channel counts and run times for one basis group.

    Simulated records carry integer-valued counts; expected-count records
    (Poisson means substituted for observations) carry reals.  Run times are
    strictly positive seconds.
    """

    group: str
    labels: tuple[str, ...]
    counts: np.ndarray = field(repr=False)
    run_times: np.ndarray = field(repr=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        run_times = np.asarray(self.run_times, dtype=float)
        if counts.shape != run_times.shape or counts.shape != (len(self.labels),):
            raise ValueError("labels, counts and run_times must have matching lengths")
        if np.any(counts < 0.0):
            raise ValueError("counts must be nonnegative")
        if np.any(run_times <= 0.0):
            raise ValueError("run times must be strictly positive")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "run_times", run_times)

    @property
    def total_counts(self) -> float:
        return float(self.counts.sum())


def _grouped(settings: list[MeasurementSetting]) -> dict[str, list[MeasurementSetting]]:
    groups: dict[str, list[MeasurementSetting]] = {}
    for setting in settings:
        groups.setdefault(setting.group, []).append(setting)
    return groups


def _channel_means(rho: np.ndarray, group: list[MeasurementSetting],
                   pair_rate: float) -> np.ndarray:
    probs = np.array([born_probability(rho, s.projector) for s in group])
    times = np.array([s.run_time for s in group])
    return pair_rate * times * probs


def simulate_counts(rho, settings: list[MeasurementSetting], pair_rate: float,
                    rng: np.random.Generator) -> list[CountRecord]:
    """Draw one Poisson count per setting, grouped into per-basis records.

    Deterministic given the generator state: identical seeds and inputs yield
    identical records.
    """
    if pair_rate < 0.0:
        raise ValueError(f"pair_rate must be nonnegative, got {pair_rate!r}")
    rho = np.asarray(rho, dtype=complex)
    records = []
    for group_id, group in _grouped(settings).items():
        means = _channel_means(rho, group, pair_rate)
        counts = rng.poisson(means).astype(float)
        records.append(CountRecord(
            group=group_id,
            labels=tuple(s.label for s in group),
            counts=counts,
            run_times=np.array([s.run_time for s in group]),
        ))
    return records


def expected_counts(rho, settings: list[MeasurementSetting],
                    pair_rate: float) -> list[CountRecord]:
    """Poisson means in place of observed counts (infinite-statistics limit)."""
    if pair_rate < 0.0:
        raise ValueError(f"pair_rate must be nonnegative, got {pair_rate!r}")
    rho = np.asarray(rho, dtype=complex)
    records = []
    for group_id, group in _grouped(settings).items():
        records.append(CountRecord(
            group=group_id,
            labels=tuple(s.label for s in group),
            counts=_channel_means(rho, group, pair_rate),
            run_times=np.array([s.run_time for s in group]),
        ))
    return records
