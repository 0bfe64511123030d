"""Adaptive-gradient optimizer toolkit.

Five optimizers behind one step interface (SGDM, Adam, AMSGrad, AdaBound,
AdaFix), differentiable test objectives with analytic gradients, an analysis
layer for second-momentum recede bounds and basin-escape detection, and a
CLI experiment harness with CSV/JSON/figure artifacts.
"""

from .analysis import (
    EscapeReport,
    OpcCheckResult,
    check_opc,
    detect_escape,
    effective_lr,
    estimate_L,
    estimate_delta,
    recede_bound,
    recede_bound_literal,
    recede_inequality_margin,
    verify_recede,
)
from .errors import (
    AdafixError,
    ConfigError,
    DegenerateInput,
    DimensionMismatch,
    DivisionByZero,
    HypothesisViolated,
    InsufficientData,
    InvalidParameter,
    InvalidRegion,
    InvalidSchedule,
    NonFiniteError,
    NonFiniteEvaluation,
    NonFiniteIterate,
)
from .harness import (
    ExperimentConfig,
    TrajectoryRecord,
    TrajectoryRow,
    build_config,
    compare_optimizers,
    export_csv,
    parse_config_file,
    read_trajectory_csv,
    run_experiment,
    run_verification_suite,
)
from .numerics import ParamVector, Rng, dot, elementwise, fd_gradient, norm2
from .objectives import (
    NoisyObjective,
    Objective,
    OpcRegion,
    anisotropic_quadratic,
    bowl,
    make_objective,
    opc_quadratic,
)
from .optimizers import (
    HyperParams,
    OptimizerState,
    StepDiagnostics,
    StepResult,
    adabound_step,
    adafix_step,
    adam_step,
    amsgrad_step,
    sgdm_step,
)

__version__ = "0.1.0"

__all__ = [
    "AdafixError",
    "ConfigError",
    "DegenerateInput",
    "DimensionMismatch",
    "DivisionByZero",
    "EscapeReport",
    "ExperimentConfig",
    "HyperParams",
    "HypothesisViolated",
    "InsufficientData",
    "InvalidParameter",
    "InvalidRegion",
    "InvalidSchedule",
    "NoisyObjective",
    "NonFiniteError",
    "NonFiniteEvaluation",
    "NonFiniteIterate",
    "Objective",
    "OpcCheckResult",
    "OpcRegion",
    "OptimizerState",
    "ParamVector",
    "Rng",
    "StepDiagnostics",
    "StepResult",
    "TrajectoryRecord",
    "TrajectoryRow",
    "adabound_step",
    "adafix_step",
    "adam_step",
    "amsgrad_step",
    "anisotropic_quadratic",
    "bowl",
    "build_config",
    "check_opc",
    "compare_optimizers",
    "detect_escape",
    "dot",
    "effective_lr",
    "elementwise",
    "estimate_L",
    "estimate_delta",
    "export_csv",
    "fd_gradient",
    "make_objective",
    "norm2",
    "opc_quadratic",
    "parse_config_file",
    "read_trajectory_csv",
    "recede_bound",
    "recede_bound_literal",
    "recede_inequality_margin",
    "run_experiment",
    "run_verification_suite",
    "sgdm_step",
    "verify_recede",
]
