"""Two-qubit fidelity estimation toolkit.

Implements and cross-validates two estimation protocols for states close to
sin(theta)|00> + cos(theta)|11>:

* LVP - a locally optimal verification strategy unpacked into 16 timed
  rank-1 projective settings, with exact first-order error bars for
  Poissonian photon counting;
* DFE - direct fidelity estimation from the target's Pauli expectation
  values measured in the XX / YY / ZZ product eigenbases.

`counts` simulates per-channel Poisson count records for noisy preparations,
`tomography` reconstructs full density matrices for calibration, and
`harness` drives reproducible seeded experiment sweeps with CSV/JSON/PNG
reports (see the `fidest` command line tool).
"""

from .core import (
    fidelity,
    ket_target,
    pauli_coeffs,
    pauli_reconstruct,
    random_density_matrix,
    trace_distance,
)
from .counts import (
    CALIBRATION_FIDELITIES,
    CountRecord,
    NoiseModel,
    apply_noise,
    calibrate_noise,
    expected_counts,
    simulate_counts,
)
from .estimators import (
    ChannelLinForm,
    FidelityEstimate,
    NoCountsError,
    dfe_estimate,
    dfe_settings,
    lvp_estimate,
    ratio_estimate,
    ratio_sigma,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    mc_validate,
    run_sweep,
    run_time_scaling,
    run_tomo,
    run_verify,
    theta_of_k,
)
from .strategy import (
    MeasurementSetting,
    Strategy,
    VerificationPlan,
    VerificationResult,
    build_omega,
    fidelity_from_omega,
    make_strategy,
    phi_states,
    run_verification,
    settings_table,
    strategy_weights,
    verification_plan,
    weight_q,
)
from .tomography import (
    TomographyResult,
    linear_inversion,
    mle_project,
    tomo_fidelity,
    tomo_settings,
)

__version__ = "0.1.0"

__all__ = [
    "CALIBRATION_FIDELITIES",
    "ChannelLinForm",
    "ConfigError",
    "CountRecord",
    "ExperimentConfig",
    "FidelityEstimate",
    "MeasurementSetting",
    "NoCountsError",
    "NoiseModel",
    "Strategy",
    "TomographyResult",
    "VerificationPlan",
    "VerificationResult",
    "apply_noise",
    "build_omega",
    "calibrate_noise",
    "dfe_estimate",
    "dfe_settings",
    "expected_counts",
    "fidelity",
    "fidelity_from_omega",
    "ket_target",
    "linear_inversion",
    "lvp_estimate",
    "make_strategy",
    "mc_validate",
    "mle_project",
    "pauli_coeffs",
    "pauli_reconstruct",
    "phi_states",
    "random_density_matrix",
    "ratio_estimate",
    "ratio_sigma",
    "run_sweep",
    "run_time_scaling",
    "run_tomo",
    "run_verification",
    "run_verify",
    "settings_table",
    "simulate_counts",
    "strategy_weights",
    "theta_of_k",
    "tomo_fidelity",
    "tomo_settings",
    "trace_distance",
    "verification_plan",
    "weight_q",
]
