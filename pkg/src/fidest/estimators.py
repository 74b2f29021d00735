"""Fidelity point estimates and analytic error bars from count records.

Every quantity estimated here is a ratio of weighted channel counts,

    f = sum_mu a_mu A_mu / sum_nu b_nu A_nu,

where A_mu are the counts in channel mu and the constants a_mu, b_mu carry
the reciprocal run times (channels are collected one at a time, possibly for
different durations).  With Poissonian counts, (Delta A_mu)^2 = A_mu, first
order propagation through df/dA_mu = (a_mu - b_mu f) / sum_nu b_nu A_nu gives

    (Delta f)^2 = [ sum_mu (a_mu - b_mu f)^2 A_mu ] / (sum_nu b_nu A_nu)^2.

The squared errors of the independent basis groups add; the reported sigma is
the square root of that sum.  A channel with zero counts is valid data and
simply contributes nothing; only a vanishing denominator is an error.

Point estimates are deliberately not clamped to [0, 1] - clamping would bias
the Monte-Carlo validation of the error bars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ket_target, pauli_product_basis, projector
from .counts import CountRecord
from .strategy import (
    MeasurementSetting,
    PHI_GROUPS,
    strategy_weights,
    weight_q,
)

DFE_GROUPS = ("XX", "YY", "ZZ")
_SIGN_LABELS = ("++", "+-", "-+", "--")


class NoCountsError(RuntimeError):
    """Raised when a weighted-count denominator vanishes and the estimate is undefined."""


@dataclass(frozen=True)
class ChannelLinForm:
    """Coefficient vectors of one ratio estimator over a 4-channel record."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape:
            raise ValueError("a and b must have matching shapes")
        if not np.any(b != 0.0):
            raise ValueError("b must have at least one nonzero entry")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class FidelityEstimate:
    """Point estimate with its analytic standard error and run metadata."""

    protocol: str
    theta: float
    value: float
    sigma: float
    total_counts: int
    total_time: float


def ratio_estimate(form: ChannelLinForm, record: CountRecord) -> float:
    """(sum a_mu A_mu) / (sum b_nu A_nu)."""
    counts = record.counts
    if counts.shape != form.a.shape:
        raise ValueError(
            f"record {record.group} has {counts.shape[0]} channels, "
            f"form expects {form.a.shape[0]}")
    denominator = float(np.dot(form.b, counts))
    if denominator <= 0.0:
        raise NoCountsError(f"zero weighted counts in group {record.group}")
    return float(np.dot(form.a, counts)) / denominator


def ratio_sigma(form: ChannelLinForm, record: CountRecord, f: float) -> float:
    """First-order standard error of the ratio estimator at the observed counts."""
    counts = record.counts
    denominator = float(np.dot(form.b, counts))
    if denominator <= 0.0:
        raise NoCountsError(f"zero weighted counts in group {record.group}")
    residual = form.a - form.b * f
    return math.sqrt(float(np.dot(residual * residual, counts))) / denominator


def _records_by_group(records, required) -> dict[str, CountRecord]:
    by_group = {record.group: record for record in records}
    missing = [g for g in required if g not in by_group]
    if missing:
        raise ValueError(f"missing count records for groups {missing}")
    return by_group


def lvp_estimate(records: list[CountRecord], theta: float) -> FidelityEstimate:
    """Fidelity from the 16-setting verification schedule (groups ZZ, G1-G3).

    The even-parity probability is estimated from the ZZ record as
    (A_HH/r_HH + A_VV/r_VV) / sum(A/r) and each phi probability from the
    first channel of its group; then

        F = [ w_zz P+ + sum_k w_phi (1 - P(phi_k)) - q ] / (1 - q).

    The estimator is evaluated so that a run whose reject channels are all
    empty returns exactly 1.0: the identity w_zz + 3 w_phi = 1 is applied
    algebraically rather than numerically.  The error bar propagates each
    group's coefficient vector scaled by its weight over (1 - q).
    """
    by_group = _records_by_group(records, ("ZZ",) + PHI_GROUPS)
    q = weight_q(theta)
    w_zz, w_phi = strategy_weights(theta)
    scale = 1.0 / (1.0 - q)

    zz = by_group["ZZ"]
    b_zz = 1.0 / zz.run_times
    a_plus = np.array([b_zz[0], b_zz[1], 0.0, 0.0])  # channels HH, VV, HV, VH
    p_plus = ratio_estimate(ChannelLinForm(a_plus, b_zz), zz)
    variance = ratio_sigma(
        ChannelLinForm(w_zz * scale * a_plus, b_zz), zz, w_zz * scale * p_plus) ** 2

    phi_sum = 0.0
    for group in PHI_GROUPS:
        record = by_group[group]
        b = 1.0 / record.run_times
        a_phi = np.array([b[0], 0.0, 0.0, 0.0])
        p_phi = ratio_estimate(ChannelLinForm(a_phi, b), record)
        phi_sum += p_phi
        variance += ratio_sigma(
            ChannelLinForm(w_phi * scale * a_phi, b), record, w_phi * scale * p_phi) ** 2

    value = 1.0 + scale * (w_zz * (p_plus - 1.0) - w_phi * phi_sum)
    total_counts = sum(by_group[g].total_counts for g in ("ZZ",) + PHI_GROUPS)
    total_time = float(sum(by_group[g].run_times.sum() for g in ("ZZ",) + PHI_GROUPS))
    return FidelityEstimate(
        protocol="LVP",
        theta=float(theta),
        value=float(value),
        sigma=math.sqrt(variance),
        total_counts=int(round(total_counts)),
        total_time=total_time,
    )


def target_pauli_weights(theta: float) -> tuple[float, float, float]:
    """(psi_XX, psi_YY, psi_IZ) = (sin 2t, -sin 2t, -cos 2t) of the target.

    psi_ZZ is identically 1 and psi_ZI equals psi_IZ; all other non-identity
    coefficients vanish.
    """
    s2 = math.sin(2.0 * theta)
    c2 = math.cos(2.0 * theta)
    return s2, -s2, -c2


def dfe_settings(theta: float, total_time: float,
                 weights: tuple[float, float, float] | None = None,
                 floor: float = 0.02) -> list[MeasurementSetting]:
    """Direct-fidelity-estimation schedule: XX, YY, ZZ product eigenbases.

    Group times default to the share of the target's squared Pauli weight
    each basis can recover - XX: psi_XX^2, YY: psi_YY^2,
    ZZ: psi_ZZ^2 + psi_IZ^2 + psi_ZI^2 - with time split equally over the
    four channels of a group.  Groups whose share falls below `floor` are
    held at the floor so they stay measurable (psi_XX vanishes at t = 0 and
    t = pi/2).  Passing explicit `weights` bypasses the default policy, e.g.
    to emulate schedules that thin the time over many more settings.
    """
    if total_time <= 0.0:
        raise ValueError(f"total_time must be positive, got {total_time!r}")
    if weights is None:
        psi_xx, psi_yy, psi_iz = target_pauli_weights(theta)
        raw = np.array([psi_xx ** 2, psi_yy ** 2, 1.0 + 2.0 * psi_iz ** 2])
        fractions = raw / raw.sum()
        low = fractions < floor
        if np.any(low):
            fractions = fractions.copy()
            fractions[~low] *= (1.0 - floor * low.sum()) / fractions[~low].sum()
            fractions[low] = floor
    else:
        raw = np.asarray(weights, dtype=float)
        if raw.shape != (3,) or np.any(raw < 0.0) or raw.sum() <= 0.0:
            raise ValueError("weights must be three nonnegative reals with positive sum")
        fractions = raw / raw.sum()

    settings = []
    for group, fraction in zip(DFE_GROUPS, fractions):
        kets = pauli_product_basis(group[0], group[1])
        channel_fraction = fraction / 4.0
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


def pauli_channel_estimates(record: CountRecord) -> tuple[float, float, float]:
    """Expectation estimates from one product-eigenbasis record.

    Channels must be ordered (++, +-, -+, --).  Returns the run-time weighted
    estimates of (<P x Q>, <P x I>, <I x Q>) for the basis operators P, Q.
    """
    b = 1.0 / record.run_times
    correlation = ratio_estimate(
        ChannelLinForm(b * np.array([1.0, -1.0, -1.0, 1.0]), b), record)
    first_marginal = ratio_estimate(
        ChannelLinForm(b * np.array([1.0, 1.0, -1.0, -1.0]), b), record)
    second_marginal = ratio_estimate(
        ChannelLinForm(b * np.array([1.0, -1.0, 1.0, -1.0]), b), record)
    return correlation, first_marginal, second_marginal


def dfe_estimate(records: list[CountRecord], theta: float) -> FidelityEstimate:
    """Direct fidelity estimate from XX, YY and ZZ eigenbasis records.

    F = (1/4)(1 + rho_XX psi_XX + rho_YY psi_YY + rho_ZZ
              + psi_IZ (rho_IZ + rho_ZI)),

    with rho_XX = 2 tr(rho P+_XX) - 1 estimated from the (++, --) channels and
    the three Z-correlators from the signed four-channel combinations.  The
    sigma sums the squared errors of the XX, YY and combined-ZZ ratio terms.
    """
    by_group = _records_by_group(records, DFE_GROUPS)
    psi_xx, psi_yy, psi_iz = target_pauli_weights(theta)

    value = 0.25
    variance = 0.0
    for group, psi_coeff in (("XX", psi_xx), ("YY", psi_yy)):
        record = by_group[group]
        b = 1.0 / record.run_times
        a_plus = np.array([b[0], 0.0, 0.0, b[3]])
        p_plus = ratio_estimate(ChannelLinForm(a_plus, b), record)
        value += 0.25 * psi_coeff * (2.0 * p_plus - 1.0)
        variance += ratio_sigma(
            ChannelLinForm(0.5 * psi_coeff * a_plus, b), record,
            0.5 * psi_coeff * p_plus) ** 2

    zz = by_group["ZZ"]
    b = 1.0 / zz.run_times
    a_zz = 0.25 * np.array([
        (1.0 + 2.0 * psi_iz) * b[0], -b[1], -b[2], (1.0 - 2.0 * psi_iz) * b[3]])
    form = ChannelLinForm(a_zz, b)
    f_zz = ratio_estimate(form, zz)
    value += f_zz
    variance += ratio_sigma(form, zz, f_zz) ** 2

    total_counts = sum(by_group[g].total_counts for g in DFE_GROUPS)
    total_time = float(sum(by_group[g].run_times.sum() for g in DFE_GROUPS))
    return FidelityEstimate(
        protocol="DFE",
        theta=float(theta),
        value=float(value),
        sigma=math.sqrt(variance),
        total_counts=int(round(total_counts)),
        total_time=total_time,
    )
