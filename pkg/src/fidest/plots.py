"""Figure rendering for harness reports.

Each function takes a finished report and writes one PNG next to the CSV it
illustrates.  Rendering is headless (Agg) so the CLI works on machines
without a display.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .harness import (
    SweepReport,
    TimeScalingReport,
    TomoReport,
    ValidationReport,
    VerifyReport,
)

_PROTOCOL_COLORS = {"LVP": "tab:blue", "DFE": "tab:orange", "TOMO": "tab:green"}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def sweep_figure(report: SweepReport, path: Path) -> Path:
    """Estimated fidelity with error bars across the angle grid."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    protocols = sorted({row.protocol for row in report.rows})
    offsets = {p: 0.12 * i - 0.06 * (len(protocols) - 1) for i, p in enumerate(protocols)}
    for protocol in protocols:
        rows = [row for row in report.rows if row.protocol == protocol]
        ks = [row.k + offsets[protocol] for row in rows]
        means = [row.f_hat_mean for row in rows]
        # TOMO rows have no analytic sigma; fall back to the empirical spread
        bars = [row.sigma_empirical if math.isnan(row.sigma_analytic_mean)
                else row.sigma_analytic_mean for row in rows]
        ax.errorbar(ks, means, yerr=bars, fmt="o", ms=4, capsize=3,
                    color=_PROTOCOL_COLORS.get(protocol), label=protocol)
    truth = {row.k: row.f_true for row in report.rows}
    ax.plot(sorted(truth), [truth[k] for k in sorted(truth)], "k--", lw=1,
            label="prepared state")
    ax.set_xlabel(r"$k$  ($\theta = k\pi/32$)")
    ax.set_ylabel("fidelity estimate")
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)


def timescale_figure(report: TimeScalingReport, path: Path) -> Path:
    """Analytic error bar versus integration time, one panel per angle."""
    k_values = sorted({row.k for row in report.rows})
    fig, axes = plt.subplots(1, len(k_values), figsize=(3.4 * len(k_values), 3.6),
                             sharey=True)
    if len(k_values) == 1:
        axes = [axes]
    for ax, k in zip(axes, k_values):
        for protocol in sorted({row.protocol for row in report.rows}):
            rows = [row for row in report.rows if row.k == k and row.protocol == protocol]
            times = [row.total_time for row in rows]
            sigma = [row.sigma_analytic_mean for row in rows]
            ax.loglog(times, sigma, "o-", ms=4, color=_PROTOCOL_COLORS.get(protocol),
                      label=protocol)
        ax.set_title(rf"$k = {k}$")
        ax.set_xlabel("integration time [s]")
        ax.grid(alpha=0.3, which="both")
    axes[0].set_ylabel(r"analytic $\sigma$")
    axes[0].legend()
    return _save(fig, path)


def validate_figure(report: ValidationReport, path: Path) -> Path:
    """Empirical replication spread against the mean analytic sigma."""
    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    for protocol in sorted({row.protocol for row in report.rows}):
        rows = [row for row in report.rows if row.protocol == protocol]
        ax.scatter([row.sigma_analytic_mean for row in rows],
                   [row.sigma_empirical for row in rows],
                   s=22, color=_PROTOCOL_COLORS.get(protocol), label=protocol)
    finite = [row.sigma_analytic_mean for row in report.rows
              if row.sigma_analytic_mean > 0.0]
    if finite:
        lo, hi = 0.9 * min(finite), 1.1 * max(finite)
        ax.plot([lo, hi], [lo, hi], "k--", lw=1)
    ax.set_xlabel(r"mean analytic $\sigma$")
    ax.set_ylabel("empirical std dev")
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)


def tomo_figure(report: TomoReport, path: Path) -> Path:
    """Reconstructed fidelity per angle against the calibration target."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ks = [row.k for row in report.rows]
    ax.errorbar(ks, [row.f_hat_mean for row in report.rows],
                yerr=[row.f_hat_std for row in report.rows],
                fmt="o", ms=4, capsize=3, color=_PROTOCOL_COLORS["TOMO"],
                label="reconstruction")
    ax.plot(ks, [row.f_target for row in report.rows], "k--", lw=1, label="target")
    ax.set_xlabel(r"$k$  ($\theta = k\pi/32$)")
    ax.set_ylabel("fidelity")
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)


def verify_figure(report: VerifyReport, path: Path) -> Path:
    """Distribution of trials consumed across verification runs."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.hist(report.trials_used, bins=min(40, max(report.n_trials, 2)),
            color="tab:blue", alpha=0.8)
    ax.axvline(report.n_trials, color="k", ls="--", lw=1,
               label=f"plan length n = {report.n_trials}")
    ax.set_xlabel("trials consumed")
    ax.set_ylabel("runs")
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)
