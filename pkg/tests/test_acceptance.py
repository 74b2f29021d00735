"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a single PASS/FAIL line (visible with `pytest -s`, or in the
captured output of a failing run) before asserting, so a full run doubles as
a checklist.
"""

import math

import numpy as np
import pytest

import fidest as fd
from fidest.core import IDENTITY4, ket_target, projector, random_density_matrix
from fidest.counts import CALIBRATION_FIDELITIES
from fidest.harness import ExperimentConfig, mc_validate, run_sweep, run_time_scaling

GRID_THETAS = [k * math.pi / 32 for k in range(17)]


def _criterion(number: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[criterion {number:02d}] {status} - {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_criterion_01_strategy_identity():
    worst_form = 0.0
    worst_table = 0.0
    for theta in GRID_THETAS:
        q = fd.weight_q(theta)
        psi = ket_target(theta)
        two_parameter = (1 - q) * projector(psi) + q * IDENTITY4
        worst_form = max(worst_form,
                         np.linalg.norm(fd.build_omega(theta) - two_parameter))

        w_zz, w_phi = fd.strategy_weights(theta)
        settings = fd.settings_table(theta, 400.0)
        zz = [s for s in settings if s.group == "ZZ"]
        rebuilt = w_zz * (zz[0].projector + zz[1].projector)
        for group in ("G1", "G2", "G3"):
            block = [s for s in settings if s.group == group]
            rebuilt = rebuilt + w_phi * sum(s.projector for s in block[1:])
        worst_table = max(worst_table,
                          np.linalg.norm(rebuilt - fd.build_omega(theta)))
    _criterion(1, "strategy identity and schedule reconstruction to 1e-12",
               worst_form < 1e-12 and worst_table < 1e-12,
               f"form err {worst_form:.2e}, table err {worst_table:.2e}")


def test_criterion_02_schedule_budget():
    worst = max(abs(sum(s.time_fraction for s in fd.settings_table(theta, 400.0)) - 1.0)
                for theta in GRID_THETAS)
    _criterion(2, "the 16 integration-time fractions sum to 1 within 1e-12",
               worst < 1e-12, f"worst deviation {worst:.2e}")


def test_criterion_03_pure_state_certainty():
    theta = math.pi / 4
    rho = projector(ket_target(theta))
    settings = fd.settings_table(theta, 400.0)
    exact = 0
    for rep in range(1000):
        rng = np.random.default_rng(np.random.SeedSequence([301, rep]))
        records = fd.simulate_counts(rho, settings, 500.0, rng)
        exact += int(fd.lvp_estimate(records, theta).value == 1.0)
    _criterion(3, "1,000 pure-state replications all estimate exactly 1",
               exact == 1000, f"{exact}/1000 exact")


def test_criterion_04_estimator_consistency_oracle():
    rng = np.random.default_rng(401)
    worst = 0.0
    for _ in range(100):
        theta = rng.uniform(0.0, math.pi / 2)
        rho = random_density_matrix(rng)
        psi = ket_target(theta)
        oracle = float(np.vdot(psi, rho @ psi).real)
        lvp_records = fd.expected_counts(rho, fd.settings_table(theta, 400.0), 500.0)
        dfe_records = fd.expected_counts(rho, fd.dfe_settings(theta, 400.0), 500.0)
        worst = max(worst,
                    abs(fd.lvp_estimate(lvp_records, theta).value - oracle),
                    abs(fd.dfe_estimate(dfe_records, theta).value - oracle))
    _criterion(4, "infinite-statistics estimates match <psi|rho|psi> to 1e-10",
               worst < 1e-10, f"worst deviation {worst:.2e}")


def test_criterion_05_error_bar_validity():
    config = ExperimentConfig(
        k_grid=(4, 8, 12),
        protocols=("LVP", "DFE"),
        replications=10_000,
        target_fidelity=0.95,
        pair_rate=500.0,
        total_time=400.0,
        seed=501,
    )
    report = mc_validate(config)
    worst = max(row.rel_deviation for row in report.rows)
    detail = "; ".join(
        f"k={row.k} {row.protocol}: {row.rel_deviation:.2%}" for row in report.rows)
    _criterion(5, "empirical std within 10% of mean analytic sigma at F = 0.95",
               worst < 0.10, detail)


@pytest.fixture(scope="module")
def timescale_report():
    config = ExperimentConfig(replications=250, seed=601)
    return run_time_scaling(config,
                            time_grid=(200.0, 500.0, 900.0, 1400.0, 2000.0),
                            k_values=(4, 8, 12))


def test_criterion_06_time_scaling_exponent(timescale_report):
    exponents = timescale_report.exponent_by_protocol
    ok = all(abs(exponent + 0.5) <= 0.05 for exponent in exponents.values())
    detail = ", ".join(f"{p}: {e:+.4f}" for p, e in sorted(exponents.items()))
    _criterion(6, "sigma vs T power law is -0.5 +/- 0.05 for both protocols",
               ok, detail)


def test_criterion_07_lvp_advantage_at_3pi_over_8(timescale_report):
    ratios = []
    for total_time in timescale_report.time_grid:
        by_protocol = {row.protocol: row for row in timescale_report.rows
                       if row.k == 12 and row.total_time == total_time}
        ratios.append(by_protocol["DFE"].sigma_analytic_mean
                      / by_protocol["LVP"].sigma_analytic_mean)
    ok = all(1.5 <= ratio <= 2.6 for ratio in ratios)
    detail = ", ".join(f"T={t:.0f}: {r:.3f}"
                       for t, r in zip(timescale_report.time_grid, ratios))
    _criterion(7, "sigma_DFE/sigma_LVP at 3pi/8 within [1.5, 2.6] across the grid",
               ok, detail)


def test_criterion_08_sweep_band_and_sigma_ordering():
    config = ExperimentConfig(
        k_grid=tuple(range(17)),
        protocols=("LVP", "DFE"),
        replications=400,
        seed=801,
    )
    report = run_sweep(config, keep_samples=True)

    inside = total = 0
    for row in report.rows:
        deviations = np.abs(row.values - row.f_true)
        inside += int(np.sum(deviations <= 3.0 * row.sigmas))
        total += row.reps
    coverage = inside / total

    sigma = {(row.k, row.protocol): row.sigma_analytic_mean for row in report.rows}
    violations = [
        (k, sigma[(k, "LVP")], sigma[(k, "DFE")])
        for k in config.k_grid
        if not sigma[(k, "LVP")] <= sigma[(k, "DFE")]
    ]
    detail = f"3-sigma coverage {coverage:.2%}"
    if violations:
        detail += "; LVP sigma exceeds DFE sigma at " + ", ".join(
            f"k={k} ({lvp:.3e} > {dfe:.3e})" for k, lvp, dfe in violations)
    _criterion(8, "sweep coverage >= 95% and LVP sigma <= DFE sigma at every k",
               coverage >= 0.95 and not violations, detail)


def test_criterion_09_tomography_calibration():
    worst_distance = 0.0
    rng = np.random.default_rng(901)
    for _ in range(25):
        rho = random_density_matrix(rng)
        records = fd.expected_counts(rho, fd.tomo_settings(400.0), 500.0)
        reconstructed = fd.mle_project(fd.linear_inversion(records))
        worst_distance = max(worst_distance, fd.trace_distance(reconstructed, rho))

    details = [f"exact-expectation trace distance {worst_distance:.2e}"]
    targets_ok = True
    for k in (0, 6):
        theta = k * math.pi / 32
        target = CALIBRATION_FIDELITIES[k]
        model = fd.calibrate_noise("depolarizing", theta, target)
        rho = fd.apply_noise(model, theta)
        values = []
        for rep in range(24):
            rng = np.random.default_rng(np.random.SeedSequence([902, k, rep]))
            values.append(fd.tomo_fidelity(rho, 500.0, 400.0, theta, rng)
                          .fidelity_to_target)
        values = np.array(values)
        pull = abs(values.mean() - target) / values.std(ddof=1)
        targets_ok &= pull <= 3.0
        details.append(f"k={k}: mean {values.mean():.4f} vs {target} ({pull:.2f} sigma)")
    _criterion(9, "tomography reproduces calibration targets within 3 sigma",
               worst_distance < 1e-9 and targets_ok, "; ".join(details))


def test_criterion_10_verification_runner():
    theta = math.pi / 8
    rho_pure = projector(ket_target(theta))
    plan = fd.verification_plan(0.1, 0.05, n_trials=2000)
    rng = np.random.default_rng(1001)
    always_passes = all(
        fd.run_verification(lambda: rho_pure, theta, plan, rng).passed
        for _ in range(25))

    epsilon = 0.08
    p = 4.0 * epsilon / 3.0
    rho = (1 - p) * rho_pure + p * np.eye(4) / 4
    long_plan = fd.verification_plan(epsilon, 0.05, n_trials=100_000)
    trials = failures = 0
    rng = np.random.default_rng(1002)
    while trials < 100_000:
        result = fd.run_verification(lambda: rho, theta, long_plan, rng)
        trials += result.trials_used
        failures += int(not result.passed)
    rate = (trials - failures) / trials
    expected = 1.0 - (1.0 - fd.weight_q(theta)) * epsilon
    sigma = math.sqrt(expected * (1.0 - expected) / trials)
    rate_ok = abs(rate - expected) <= 3.0 * sigma
    _criterion(
        10, "runner passes pure states; accept rate matches 1 - (1-q)eps",
        always_passes and rate_ok,
        f"accept rate {rate:.5f} vs {expected:.5f} "
        f"({abs(rate - expected) / sigma:.2f} binomial sigma, {trials} trials)")
