"""Data-driven unknown-input reconstruction for LTI MIMO systems.

Recovers the inputs driving a discrete-time linear system from output
measurements and one previously recorded input/output trajectory, without
knowledge of the inputs preceding the estimation window. Ships the
autoregressive Hankel-data estimator, a data-only convergence certificate
based on the spectral radius of the error companion matrix, and a
model-based inversion oracle for cross-validation.
"""

from .config import ScenarioConfig, config_from_mapping, load_config
from .errors import (
    ConfigError,
    DegenerateDataError,
    InconsistentTrajectoryError,
    InvalidGainError,
    InvalidInputError,
    NoLeftInverseError,
    PersistencyError,
    TrajectoryFormatError,
    UnsupportedShapeError,
)
from .estimator import (
    ConvergenceCertificate,
    EstimatorGains,
    EstimatorState,
    RunReport,
    build_gains,
    convergence_certificate,
    error_matrix,
    run,
    solve_constrained_ls,
    step,
)
from .hankel import (
    HankelBundle,
    block_hankel,
    is_persistently_exciting,
    one_shot_inversion,
    partition_data,
)
from .linalg import (
    ToleranceSet,
    eigenvalues,
    kernel_projector,
    nullspace_basis,
    numerical_rank,
    spectral_radius,
    truncated_pinv,
)
from .lti import (
    InverseSystemModel,
    StateSpaceModel,
    Trajectory,
    ZeroCategory,
    ZeroClassification,
    classify_zeros,
    inherent_delay,
    invariant_zeros,
    inverse_system,
    invertibility_matrix,
    left_inverse_gain,
    model_based_reconstruct,
    observability_matrix,
    simulate,
    stacked_output_identity_check,
    strong_observability_check,
)
from .report import (
    emit_plot_data,
    load_trajectory,
    save_report,
    save_trajectory,
)
from .systems import (
    SYSTEM_GENERATORS,
    no_zeros_system,
    stable_zeros_system,
    unstable_zero_system,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceCertificate",
    "DegenerateDataError",
    "EstimatorGains",
    "EstimatorState",
    "HankelBundle",
    "InconsistentTrajectoryError",
    "InvalidGainError",
    "InvalidInputError",
    "InverseSystemModel",
    "NoLeftInverseError",
    "PersistencyError",
    "RunReport",
    "ScenarioConfig",
    "StateSpaceModel",
    "SYSTEM_GENERATORS",
    "ToleranceSet",
    "Trajectory",
    "TrajectoryFormatError",
    "UnsupportedShapeError",
    "ZeroCategory",
    "ZeroClassification",
    "block_hankel",
    "build_gains",
    "classify_zeros",
    "config_from_mapping",
    "convergence_certificate",
    "eigenvalues",
    "emit_plot_data",
    "error_matrix",
    "inherent_delay",
    "invariant_zeros",
    "inverse_system",
    "invertibility_matrix",
    "is_persistently_exciting",
    "kernel_projector",
    "left_inverse_gain",
    "load_config",
    "load_trajectory",
    "model_based_reconstruct",
    "no_zeros_system",
    "nullspace_basis",
    "numerical_rank",
    "observability_matrix",
    "one_shot_inversion",
    "partition_data",
    "run",
    "save_report",
    "save_trajectory",
    "simulate",
    "solve_constrained_ls",
    "spectral_radius",
    "stable_zeros_system",
    "stacked_output_identity_check",
    "step",
    "strong_observability_check",
    "truncated_pinv",
    "unstable_zero_system",
]
