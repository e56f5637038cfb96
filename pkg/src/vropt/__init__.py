"""Variance-reduced stochastic optimization with randomized snapshot
scheduling, importance sampling, and exact IFO accounting."""

from .data import Dataset, SyntheticSpec, generate_synthetic, parse_libsvm, subsample
from .errors import (
    ConfigError,
    ContractError,
    DescentViolation,
    DivergenceError,
    NumericError,
    ParseError,
    VroptError,
)
from .model import (
    IfoCounter,
    LogisticModel,
    NonconvexLogisticModel,
    SmoothnessConstants,
    SparseRow,
    smoothness_constants,
)
from .optim import (
    ALGORITHMS,
    OptimizerConfig,
    PlannedStep,
    RunResult,
    c_eta,
    eta_max_nonconvex,
    ifo_count,
    lambda_last_iterate,
    lambda_loopless_sc,
    plan_step_size,
    run,
    run_d2s,
    run_gd,
    run_l2s,
    run_l2s_sc,
    run_sarah,
    run_sarah_li,
    run_sgd,
    run_svrg,
    sigma_geometric,
    theta_strongly_convex,
)
from .sampling import (
    ImportanceTable,
    Rng,
    build_importance_table,
    draw_snapshot_flag,
    draw_uniform_index,
    snapshot_event_probability,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "ConfigError", "ContractError", "Dataset",
    "DescentViolation", "DivergenceError", "IfoCounter", "ImportanceTable",
    "LogisticModel", "NonconvexLogisticModel", "NumericError",
    "OptimizerConfig", "ParseError", "PlannedStep", "Rng", "RunResult",
    "SmoothnessConstants", "SparseRow", "SyntheticSpec", "VroptError",
    "build_importance_table", "c_eta", "draw_snapshot_flag",
    "draw_uniform_index", "eta_max_nonconvex", "generate_synthetic",
    "ifo_count", "lambda_last_iterate", "lambda_loopless_sc", "parse_libsvm",
    "plan_step_size", "run", "run_d2s", "run_gd", "run_l2s", "run_l2s_sc",
    "run_sarah", "run_sarah_li", "run_sgd", "run_svrg", "sigma_geometric",
    "smoothness_constants", "snapshot_event_probability", "subsample",
    "theta_strongly_convex",
]
