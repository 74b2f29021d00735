"""Reproducible experiment harness: sweeps, time scaling, Monte-Carlo checks.

Every operation is driven by an `ExperimentConfig` and a master seed.  Each
replication draws its generator from a splittable seed keyed by
(seed, operation, k, protocol, replication index, ...), so results are
independent of evaluation order and a replication's dataset never changes
when more replications are added.  Reports serialize to CSV (12 significant
digits) plus a JSON sidecar echoing the full configuration, which makes any
figure regenerable from the sidecar alone.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import fidelity, ket_target
from .counts import (
    CALIBRATION_FIDELITIES,
    NOISE_KINDS,
    NoiseModel,
    apply_noise,
    calibrate_noise,
    simulate_counts,
)
from .estimators import dfe_estimate, dfe_settings, lvp_estimate
from .strategy import settings_table, run_verification, verification_plan, weight_q
from .tomography import tomo_fidelity

PROTOCOLS = ("LVP", "DFE", "TOMO")
K_MIN, K_MAX = 0, 16
TIMESCALE_K_VALUES = (4, 8, 12)
DEFAULT_TIME_GRID = (200.0, 650.0, 1100.0, 1550.0, 2000.0)

# stream tags for the splittable seeding scheme
_OP_SWEEP, _OP_TIMESCALE, _OP_TOMO, _OP_VERIFY = 1, 2, 3, 4
_PROTO_TAG = {"LVP": 1, "DFE": 2, "TOMO": 3}


class ConfigError(ValueError):
    """Configuration failure with the offending field attached."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def theta_of_k(k: int) -> float:
    return k * math.pi / 32.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs shared by all harness operations.

    The prepared state is controlled by the noise fields, in order of
    precedence: an explicit `noise_parameter`, a fixed `target_fidelity`
    (calibrated per angle), or - the default - per-k calibration to the
    reference fidelities in `counts.CALIBRATION_FIDELITIES`.
    """

    k_grid: tuple[int, ...] = tuple(range(K_MIN, K_MAX + 1))
    total_time: float = 400.0
    pair_rate: float = 500.0
    protocols: tuple[str, ...] = ("LVP", "DFE")
    replications: int = 1000
    seed: int = 20200416
    dfe_count_scale: float = 1.0
    dfe_floor: float = 0.02
    noise_kind: str = "depolarizing"
    noise_parameter: float | None = None
    target_fidelity: float | None = None


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    if not config.k_grid:
        raise ConfigError("k_grid", "at least one k value is required")
    for k in config.k_grid:
        if not isinstance(k, int) or not K_MIN <= k <= K_MAX:
            raise ConfigError("k_grid", f"k values must be integers in [{K_MIN}, {K_MAX}], got {k!r}")
    if len(set(config.k_grid)) != len(config.k_grid):
        raise ConfigError("k_grid", "k values must be unique")
    if config.total_time <= 0.0:
        raise ConfigError("total_time", f"must be positive, got {config.total_time!r}")
    if config.pair_rate < 0.0:
        raise ConfigError("pair_rate", f"must be nonnegative, got {config.pair_rate!r}")
    if not config.protocols:
        raise ConfigError("protocols", "at least one protocol is required")
    for protocol in config.protocols:
        if protocol not in PROTOCOLS:
            raise ConfigError("protocols", f"unknown protocol {protocol!r}; expected {PROTOCOLS}")
    if len(set(config.protocols)) != len(config.protocols):
        raise ConfigError("protocols", "protocols must be unique")
    if config.replications < 1:
        raise ConfigError("replications", f"must be at least 1, got {config.replications!r}")
    if not 0 <= config.seed < 2 ** 64:
        raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {config.seed!r}")
    if config.dfe_count_scale <= 0.0:
        raise ConfigError("dfe_count_scale", f"must be positive, got {config.dfe_count_scale!r}")
    if not 0.0 <= config.dfe_floor < 1.0 / 3.0:
        raise ConfigError("dfe_floor", f"must lie in [0, 1/3), got {config.dfe_floor!r}")
    if config.noise_kind not in NOISE_KINDS:
        raise ConfigError("noise_kind", f"unknown kind {config.noise_kind!r}; expected {NOISE_KINDS}")
    if config.noise_parameter is not None and config.target_fidelity is not None:
        raise ConfigError("noise_parameter", "give either noise_parameter or target_fidelity, not both")
    if config.target_fidelity is not None and not 0.25 < config.target_fidelity <= 1.0:
        raise ConfigError("target_fidelity", f"must lie in (0.25, 1], got {config.target_fidelity!r}")
    return config


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a parsed key-value file plus defaults."""
    known = {
        "k_grid", "total_time", "pair_rate", "protocols", "replications",
        "seed", "dfe_count_scale", "dfe_floor", "noise",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    kwargs: dict = {}
    if "k_grid" in data:
        kwargs["k_grid"] = tuple(int(k) for k in data["k_grid"])
    if "protocols" in data:
        kwargs["protocols"] = tuple(str(p).upper() for p in data["protocols"])
    for key in ("total_time", "pair_rate", "dfe_count_scale", "dfe_floor"):
        if key in data:
            kwargs[key] = float(data[key])
    for key in ("replications", "seed"):
        if key in data:
            kwargs[key] = int(data[key])
    noise = data.get("noise", {})
    if not isinstance(noise, dict):
        raise ConfigError("noise", "must be a mapping")
    noise_unknown = set(noise) - {"kind", "parameter", "target_fidelity", "calibration"}
    if noise_unknown:
        raise ConfigError(f"noise.{sorted(noise_unknown)[0]}", "unknown noise key")
    if "kind" in noise:
        kwargs["noise_kind"] = str(noise["kind"])
    if "parameter" in noise and noise["parameter"] is not None:
        kwargs["noise_parameter"] = float(noise["parameter"])
    if "target_fidelity" in noise and noise["target_fidelity"] is not None:
        kwargs["target_fidelity"] = float(noise["target_fidelity"])
    if "calibration" in noise:
        # explicit per-k reference-calibration flag; excludes the fixed settings
        calibration = bool(noise["calibration"])
        fixed = "noise_parameter" in kwargs or "target_fidelity" in kwargs
        if calibration and fixed:
            raise ConfigError(
                "noise.calibration",
                "per-k calibration excludes parameter/target_fidelity")
        if not calibration and not fixed:
            raise ConfigError(
                "noise.calibration",
                "disabling calibration requires parameter or target_fidelity")
    return validate_config(ExperimentConfig(**kwargs))


def prepared_state(config: ExperimentConfig, k: int) -> tuple[np.ndarray, float]:
    """Noisy state for grid point k and its true fidelity to the target."""
    theta = theta_of_k(k)
    if config.noise_parameter is not None:
        model = NoiseModel(config.noise_kind, config.noise_parameter)
    elif config.target_fidelity is not None:
        model = calibrate_noise(config.noise_kind, theta, config.target_fidelity)
    else:
        model = calibrate_noise(config.noise_kind, theta, CALIBRATION_FIDELITIES[k])
    rho = apply_noise(model, theta)
    return rho, fidelity(rho, ket_target(theta))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def _protocol_settings(config: ExperimentConfig, protocol: str, theta: float,
                       total_time: float):
    if protocol == "LVP":
        return settings_table(theta, total_time), config.pair_rate
    if protocol == "DFE":
        return (dfe_settings(theta, total_time, floor=config.dfe_floor),
                config.pair_rate * config.dfe_count_scale)
    raise ValueError(f"no settings for protocol {protocol!r}")


# --- sweep ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    k: int
    theta_rad: float
    protocol: str
    f_true: float
    f_hat_mean: float
    sigma_analytic_mean: float
    sigma_empirical: float
    reps: int
    time_audit: float
    values: np.ndarray | None = field(default=None, repr=False, compare=False)
    sigmas: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SweepReport:
    config: ExperimentConfig
    rows: list[SweepRow]

    COLUMNS = ("k", "theta_rad", "protocol", "f_true", "f_hat_mean",
               "sigma_analytic_mean", "sigma_empirical", "reps")


def _empirical_std(values: np.ndarray) -> float:
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def run_sweep(config: ExperimentConfig, keep_samples: bool = False) -> SweepReport:
    """Estimate fidelity for every (k, protocol) cell, replicated and seeded."""
    validate_config(config)
    rows = []
    for k in config.k_grid:
        theta = theta_of_k(k)
        rho, f_true = prepared_state(config, k)
        for protocol in config.protocols:
            reps = config.replications
            values = np.empty(reps)
            sigmas = np.full(reps, np.nan)
            if protocol == "TOMO":
                time_audit = config.total_time
                for rep in range(reps):
                    rng = _rng(config.seed, _OP_SWEEP, k, _PROTO_TAG[protocol], rep)
                    result = tomo_fidelity(rho, config.pair_rate, config.total_time,
                                           theta, rng)
                    values[rep] = result.fidelity_to_target
                sigma_analytic = float("nan")
            else:
                settings, rate = _protocol_settings(config, protocol, theta,
                                                    config.total_time)
                time_audit = float(sum(s.run_time for s in settings))
                estimate_fn = lvp_estimate if protocol == "LVP" else dfe_estimate
                for rep in range(reps):
                    rng = _rng(config.seed, _OP_SWEEP, k, _PROTO_TAG[protocol], rep)
                    records = simulate_counts(rho, settings, rate, rng)
                    estimate = estimate_fn(records, theta)
                    values[rep] = estimate.value
                    sigmas[rep] = estimate.sigma
                sigma_analytic = float(sigmas.mean())
            rows.append(SweepRow(
                k=k,
                theta_rad=theta,
                protocol=protocol,
                f_true=f_true,
                f_hat_mean=float(values.mean()),
                sigma_analytic_mean=sigma_analytic,
                sigma_empirical=_empirical_std(values),
                reps=reps,
                time_audit=time_audit,
                values=values if keep_samples else None,
                sigmas=sigmas if keep_samples else None,
            ))
    return SweepReport(config=config, rows=rows)


# --- integration-time scaling -----------------------------------------------

@dataclass(frozen=True)
class TimeScalingRow:
    k: int
    theta_rad: float
    protocol: str
    total_time: float
    f_hat_mean: float
    sigma_analytic_mean: float
    sigma_empirical: float
    reps: int


@dataclass(frozen=True)
class TimeScalingReport:
    config: ExperimentConfig
    time_grid: tuple[float, ...]
    rows: list[TimeScalingRow]
    exponent_by_protocol: dict[str, float]
    exponent_by_cell: dict[str, float]  # "PROTOCOL:k=<k>" -> fitted slope

    COLUMNS = ("k", "theta_rad", "protocol", "total_time", "f_hat_mean",
               "sigma_analytic_mean", "sigma_empirical", "reps")


def run_time_scaling(config: ExperimentConfig,
                     time_grid: tuple[float, ...] = DEFAULT_TIME_GRID,
                     k_values: tuple[int, ...] = TIMESCALE_K_VALUES) -> TimeScalingReport:
    """Mean analytic error bars as a function of total integration time.

    Also fits log(sigma) against log(T) for every (protocol, k) cell and
    reports the per-protocol mean slope; Poisson statistics pin it near -1/2.
    """
    validate_config(config)
    grid = tuple(float(t) for t in time_grid)
    if len(grid) < 2:
        raise ConfigError("time_grid", "at least two time points are required")
    if any(t <= 0.0 for t in grid):
        raise ConfigError("time_grid", "times must be positive")
    if list(grid) != sorted(grid):
        raise ConfigError("time_grid", "times must be ascending")
    protocols = tuple(p for p in config.protocols if p != "TOMO")
    if not protocols:
        raise ConfigError("protocols", "time scaling needs LVP or DFE")

    rows = []
    for k in k_values:
        theta = theta_of_k(k)
        rho, _ = prepared_state(config, k)
        for t_index, total_time in enumerate(grid):
            for protocol in protocols:
                settings, rate = _protocol_settings(config, protocol, theta, total_time)
                estimate_fn = lvp_estimate if protocol == "LVP" else dfe_estimate
                reps = config.replications
                values = np.empty(reps)
                sigmas = np.empty(reps)
                for rep in range(reps):
                    rng = _rng(config.seed, _OP_TIMESCALE, k, t_index,
                               _PROTO_TAG[protocol], rep)
                    records = simulate_counts(rho, settings, rate, rng)
                    estimate = estimate_fn(records, theta)
                    values[rep] = estimate.value
                    sigmas[rep] = estimate.sigma
                rows.append(TimeScalingRow(
                    k=k,
                    theta_rad=theta,
                    protocol=protocol,
                    total_time=total_time,
                    f_hat_mean=float(values.mean()),
                    sigma_analytic_mean=float(sigmas.mean()),
                    sigma_empirical=_empirical_std(values),
                    reps=reps,
                ))

    log_t = np.log(np.asarray(grid))
    exponent_by_cell: dict[str, float] = {}
    exponent_by_protocol: dict[str, float] = {}
    for protocol in protocols:
        slopes = []
        for k in k_values:
            sigma = np.array([row.sigma_analytic_mean for row in rows
                              if row.protocol == protocol and row.k == k])
            slope = float(np.polyfit(log_t, np.log(sigma), 1)[0])
            exponent_by_cell[f"{protocol}:k={k}"] = slope
            slopes.append(slope)
        exponent_by_protocol[protocol] = float(np.mean(slopes))
    return TimeScalingReport(
        config=config,
        time_grid=grid,
        rows=rows,
        exponent_by_protocol=exponent_by_protocol,
        exponent_by_cell=exponent_by_cell,
    )


# --- Monte-Carlo validation of the analytic error bars -----------------------

@dataclass(frozen=True)
class ValidationRow:
    k: int
    theta_rad: float
    protocol: str
    f_true: float
    f_hat_mean: float
    sigma_analytic_mean: float
    sigma_empirical: float
    rel_deviation: float
    reps: int


@dataclass(frozen=True)
class ValidationReport:
    config: ExperimentConfig
    rows: list[ValidationRow]

    COLUMNS = ("k", "theta_rad", "protocol", "f_true", "f_hat_mean",
               "sigma_analytic_mean", "sigma_empirical", "rel_deviation", "reps")


def mc_validate(config: ExperimentConfig) -> ValidationReport:
    """Empirical replication spread versus the mean analytic sigma, per cell.

    The relative deviation |std_emp - sigma_mean| / sigma_mean is the
    independent Monte-Carlo check of the error-propagation formula (zero when
    both vanish, as for a pure state under the verification schedule).
    """
    sweep = run_sweep(config, keep_samples=True)
    rows = []
    for row in sweep.rows:
        if row.protocol == "TOMO":
            continue
        if row.sigma_analytic_mean > 0.0:
            rel = abs(row.sigma_empirical - row.sigma_analytic_mean) / row.sigma_analytic_mean
        else:
            rel = 0.0 if row.sigma_empirical == 0.0 else float("inf")
        rows.append(ValidationRow(
            k=row.k,
            theta_rad=row.theta_rad,
            protocol=row.protocol,
            f_true=row.f_true,
            f_hat_mean=row.f_hat_mean,
            sigma_analytic_mean=row.sigma_analytic_mean,
            sigma_empirical=row.sigma_empirical,
            rel_deviation=rel,
            reps=row.reps,
        ))
    return ValidationReport(config=config, rows=rows)


# --- tomography calibration ---------------------------------------------------

@dataclass(frozen=True)
class TomoRow:
    k: int
    theta_rad: float
    f_target: float
    f_hat_mean: float
    f_hat_std: float
    reps: int


@dataclass(frozen=True)
class TomoReport:
    config: ExperimentConfig
    rows: list[TomoRow]

    COLUMNS = ("k", "theta_rad", "f_target", "f_hat_mean", "f_hat_std", "reps")


def run_tomo(config: ExperimentConfig) -> TomoReport:
    """Replicated tomography of each prepared state, scored against the target."""
    validate_config(config)
    rows = []
    for k in config.k_grid:
        theta = theta_of_k(k)
        rho, f_true = prepared_state(config, k)
        reps = config.replications
        values = np.empty(reps)
        for rep in range(reps):
            rng = _rng(config.seed, _OP_TOMO, k, rep)
            values[rep] = tomo_fidelity(rho, config.pair_rate, config.total_time,
                                        theta, rng).fidelity_to_target
        rows.append(TomoRow(
            k=k,
            theta_rad=theta,
            f_target=f_true,
            f_hat_mean=float(values.mean()),
            f_hat_std=_empirical_std(values),
            reps=reps,
        ))
    return TomoReport(config=config, rows=rows)


# --- sequential verification ---------------------------------------------------

@dataclass(frozen=True)
class VerifyReport:
    config: ExperimentConfig
    k: int
    theta_rad: float
    epsilon: float
    delta: float
    n_trials: int
    runs: int
    pass_rate: float
    mean_trials: float
    accept_rate: float
    expected_accept_rate: float
    trials_used: tuple[int, ...] = field(repr=False)

    COLUMNS = ("k", "theta_rad", "epsilon", "delta", "n_trials", "runs",
               "pass_rate", "mean_trials", "accept_rate", "expected_accept_rate")


def run_verify(config: ExperimentConfig, epsilon: float, delta: float,
               n_trials: int | None = None, runs: int = 100) -> VerifyReport:
    """Repeated sequential verification runs against the configured source."""
    validate_config(config)
    if runs < 1:
        raise ConfigError("runs", f"must be at least 1, got {runs!r}")
    k = config.k_grid[0]
    theta = theta_of_k(k)
    rho, f_true = prepared_state(config, k)
    try:
        plan = verification_plan(epsilon, delta, theta=theta, n_trials=n_trials)
    except ValueError as exc:
        raise ConfigError("epsilon", str(exc)) from exc

    passes = 0
    trials_used = []
    for run in range(runs):
        rng = _rng(config.seed, _OP_VERIFY, k, run)
        result = run_verification(lambda: rho, theta, plan, rng)
        passes += int(result.passed)
        trials_used.append(result.trials_used)
    total_trials = sum(trials_used)
    failures = runs - passes
    q = weight_q(theta)
    return VerifyReport(
        config=config,
        k=k,
        theta_rad=theta,
        epsilon=epsilon,
        delta=delta,
        n_trials=plan.n_trials,
        runs=runs,
        pass_rate=passes / runs,
        mean_trials=total_trials / runs,
        accept_rate=(total_trials - failures) / total_trials,
        expected_accept_rate=(1.0 - q) * f_true + q,
        trials_used=tuple(trials_used),
    )


# --- serialization -------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    return str(value)


def write_csv(path: Path, columns: tuple[str, ...], rows) -> Path:
    """Write one delimited report; floats carry 12 significant digits."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, name)) for name in columns])
    return path


def config_as_dict(config: ExperimentConfig) -> dict:
    data = asdict(config)
    data["k_grid"] = list(config.k_grid)
    data["protocols"] = list(config.protocols)
    return data


def write_sidecar(path: Path, command: str, config: ExperimentConfig,
                  outputs: dict[str, str], summary: dict | None = None) -> Path:
    """JSON sidecar with the full config echo so outputs are regenerable."""
    payload = {
        "command": command,
        "config": config_as_dict(config),
        "outputs": outputs,
        "summary": summary or {},
    }
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
