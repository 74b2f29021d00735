"""Locally optimal verification strategy for sin(t)|00> + cos(t)|11> targets.

The strategy operator

    Omega = w_zz P+_ZZ + w_phi sum_k (1 - |phi_k><phi_k|),

with w_zz = (2 - sin 2t)/(4 + sin 2t) and w_phi = 2(1 + sin 2t)/(3(4 + sin 2t)),
collapses to the two-parameter form Omega = (1 - q)|psi><psi| + q*1 with
q = (2 + sin 2t)/(4 + sin 2t).  The three |phi_k> are product states orthogonal
to the target, so every accepting projector is implementable with local
measurements.  For hardware that can only project onto single product states,
the strategy unpacks into 16 timed rank-1 settings (four orthonormal bases);
`settings_table` builds that schedule.

All weight formulas stay finite at t = 0 and t = pi/2 because the local
amplitudes are evaluated as sqrt(cos t/(cos t + sin t)) and
sqrt(sin t/(cos t + sin t)) instead of 1/sqrt(1 + tan t) and
1/sqrt(1 + cot t).  t = pi/4 is included by continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import IDENTITY4, ket_target, kron2, projector

# projector onto the even-parity computational subspace span{|00>, |11>}
P_ZZ_PLUS = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)

# phase pairs (alpha_k, beta_k) of the three orthogonal product states;
# alpha + beta = pi (mod 2pi) makes <psi|phi_k> vanish identically
_PHI_PHASES = (
    (2.0 * math.pi / 3.0, math.pi / 3.0),
    (4.0 * math.pi / 3.0, 5.0 * math.pi / 3.0),
    (0.0, math.pi),
)

PHI_GROUPS = ("G1", "G2", "G3")
ZZ_LABELS = ("HH", "VV", "HV", "VH")
_PHI_CHANNEL_LABELS = ("uv", "u'v", "uv'", "u'v'")


def _check_theta(theta: float) -> float:
    if not 0.0 <= theta <= math.pi / 2.0:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    return float(theta)


def weight_q(theta: float) -> float:
    """Mixing weight q = (2 + sin 2t)/(4 + sin 2t), in [1/2, 3/5]."""
    theta = _check_theta(theta)
    s = math.sin(2.0 * theta)
    return (2.0 + s) / (4.0 + s)


def strategy_weights(theta: float) -> tuple[float, float]:
    """(w_zz, w_phi) weights of the even-parity and phi-complement projectors."""
    theta = _check_theta(theta)
    s = math.sin(2.0 * theta)
    w_zz = (2.0 - s) / (4.0 + s)
    w_phi = 2.0 * (1.0 + s) / (3.0 * (4.0 + s))
    return w_zz, w_phi


def _local_amplitudes(theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return math.sqrt(c / (c + s)), math.sqrt(s / (c + s))


def _group_basis(theta: float, which: int) -> list[np.ndarray]:
    """Orthonormal product basis containing phi_k (phi_k first)."""
    a, b = _local_amplitudes(theta)
    alpha, beta = _PHI_PHASES[which]
    u = np.array([a, b * np.exp(1j * alpha)])
    u_perp = np.array([b, -a * np.exp(1j * alpha)])
    v = np.array([a, b * np.exp(1j * beta)])
    v_perp = np.array([b, -a * np.exp(1j * beta)])
    return [kron2(u, v), kron2(u_perp, v), kron2(u, v_perp), kron2(u_perp, v_perp)]


def phi_states(theta: float) -> list[np.ndarray]:
    """The three product kets orthogonal to the target at this angle."""
    theta = _check_theta(theta)
    return [_group_basis(theta, k)[0] for k in range(3)]


def build_omega(theta: float) -> np.ndarray:
    """Strategy operator w_zz P+_ZZ + w_phi sum_k (1 - |phi_k><phi_k|)."""
    theta = _check_theta(theta)
    w_zz, w_phi = strategy_weights(theta)
    omega = w_zz * P_ZZ_PLUS
    for phi in phi_states(theta):
        omega = omega + w_phi * (IDENTITY4 - projector(phi))
    return omega


def fidelity_from_omega(tr_omega_rho: float, q: float) -> float:
    """Invert tr(Omega rho) = (1 - q) F + q.

    The result is deliberately not clamped: finite-count noise may push an
    estimate outside [0, 1] and consumers decide how to treat that.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly inside (0, 1), got {q!r}")
    return (tr_omega_rho - q) / (1.0 - q)


@dataclass(frozen=True)
class Strategy:
    """Strategy operator with its weights and orthogonal product states."""

    theta: float
    q: float
    w_zz: float
    w_phi: float
    omega: np.ndarray
    phis: tuple[np.ndarray, ...]


def make_strategy(theta: float) -> Strategy:
    theta = _check_theta(theta)
    w_zz, w_phi = strategy_weights(theta)
    return Strategy(
        theta=theta,
        q=weight_q(theta),
        w_zz=w_zz,
        w_phi=w_phi,
        omega=build_omega(theta),
        phis=tuple(phi_states(theta)),
    )


@dataclass(frozen=True)
class MeasurementSetting:
    """One timed rank-1 projective setting.

    `time_fraction` is the share of the total integration time; `run_time`
    is the same share in seconds for the schedule this setting came from.
    """

    group: str
    channel: int  # 1..4 within the group
    label: str
    projector: np.ndarray
    time_fraction: float
    run_time: float

    def __post_init__(self):
        if self.time_fraction <= 0.0:
            raise ValueError(f"time_fraction must be positive, got {self.time_fraction}")
        if self.run_time <= 0.0:
            raise ValueError(f"run_time must be positive, got {self.run_time}")


def settings_table(theta: float, total_time: float) -> list[MeasurementSetting]:
    """The 16-setting rank-1 schedule of the local verification protocol.

    Block 1 (group ZZ) projects onto |HH>, |VV>, |HV>, |VH>, each for a
    quarter of w_zz * T.  Blocks 2-4 (groups G1-G3) are the orthonormal bases
    containing phi_1..phi_3: the phi channel integrates for
    (T/3)(1 + sin 2t)/(4 + sin 2t) and each of its three partners for a third
    of that.  All 16 run times sum to T.
    """
    theta = _check_theta(theta)
    if total_time <= 0.0:
        raise ValueError(f"total_time must be positive, got {total_time!r}")
    s = math.sin(2.0 * theta)
    zz_fraction = 0.25 * (2.0 - s) / (4.0 + s)
    phi_fraction = (1.0 + s) / (3.0 * (4.0 + s))
    partner_fraction = (1.0 + s) / (9.0 * (4.0 + s))

    basis4 = np.eye(4, dtype=complex)
    zz_kets = {"HH": basis4[0], "VV": basis4[3], "HV": basis4[1], "VH": basis4[2]}

    settings = []
    for channel, label in enumerate(ZZ_LABELS, start=1):
        settings.append(MeasurementSetting(
            group="ZZ",
            channel=channel,
            label=label,
            projector=projector(zz_kets[label]),
            time_fraction=zz_fraction,
            run_time=zz_fraction * total_time,
        ))
    for which, group in enumerate(PHI_GROUPS):
        kets = _group_basis(theta, which)
        for channel, (label, ket) in enumerate(zip(_PHI_CHANNEL_LABELS, kets), start=1):
            fraction = phi_fraction if channel == 1 else partner_fraction
            settings.append(MeasurementSetting(
                group=group,
                channel=channel,
                label=label,
                projector=projector(ket),
                time_fraction=fraction,
                run_time=fraction * total_time,
            ))
    return settings


@dataclass(frozen=True)
class VerificationPlan:
    """Sequential pass/fail test plan: reject states epsilon-far with confidence 1 - delta."""

    epsilon: float
    delta: float
    n_trials: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be at least 1, got {self.n_trials}")


def verification_plan(epsilon: float, delta: float, theta: float | None = None,
                      n_trials: int | None = None) -> VerificationPlan:
    """Build a plan; when n_trials is omitted it is sized from (epsilon, delta).

    A state epsilon-far from the target passes a single trial with probability
    1 - (1 - q) epsilon, so n = ceil(ln(1/delta) / ln(1/(1 - (1 - q) epsilon)))
    trials drive the false-accept probability below delta.
    """
    if n_trials is None:
        if theta is None:
            raise ValueError("either n_trials or theta is required")
        q = weight_q(theta)
        per_trial = 1.0 - (1.0 - q) * epsilon
        n_trials = math.ceil(math.log(1.0 / delta) / math.log(1.0 / per_trial))
        n_trials = max(n_trials, 1)
    return VerificationPlan(epsilon=epsilon, delta=delta, n_trials=int(n_trials))


@dataclass(frozen=True)
class VerificationResult:
    passed: bool
    trials_used: int


def run_verification(source: Callable[[], np.ndarray], theta: float,
                     plan: VerificationPlan,
                     rng: np.random.Generator) -> VerificationResult:
    """Sequential verification: accept-or-stop on each emitted state.

    Per trial one binary measurement {P_j, 1 - P_j} is drawn, with
    P_j in {P+_ZZ, 1 - |phi_k><phi_k|} chosen with probabilities
    {w_zz, w_phi, w_phi, w_phi}; the trial accepts with probability
    tr(P_j sigma).  The run fails at the first rejection and passes after
    n_trials consecutive acceptances.
    """
    strat = make_strategy(theta)
    accepting = [P_ZZ_PLUS] + [IDENTITY4 - projector(phi) for phi in strat.phis]
    cumulative = np.cumsum([strat.w_zz, strat.w_phi, strat.w_phi, strat.w_phi])
    for trial in range(1, plan.n_trials + 1):
        sigma = source()
        j = int(np.searchsorted(cumulative, rng.random(), side="right"))
        j = min(j, 3)
        p_accept = np.einsum("ij,ji->", accepting[j], sigma).real
        p_accept = min(max(p_accept, 0.0), 1.0)
        if rng.random() >= p_accept:
            return VerificationResult(passed=False, trials_used=trial)
    return VerificationResult(passed=True, trials_used=plan.n_trials)
