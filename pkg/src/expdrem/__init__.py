"""Noise-robust scalar parameter identification.

Filters a noisy linear regression, exponentiates it into a cubic
polynomial regression, decouples that with a regressor-extension filter
bank and adjugate mixing, and drives a division-free scalar estimator,
side by side with a classical gradient estimator for comparison.
"""

from .drem import (DremBank, ExtendedRegression, MixOutput, adj3, det3,
                   drem_bank_derivatives, extended_regression, mix)
from .estimators import (EstimatorState, drem_update_derivative,
                         plain_gradient_derivative)
from .lti import FirstOrderFilter, filter_derivative
from .signals import (NOISE_KINDS, REGRESSOR_KINDS, AssumptionReport,
                      NoiseSpec, RegressorSpec, TruthSpec, check_assumptions,
                      eval_measurement, eval_noise, eval_regressor,
                      held_uniform_values)
from .sim import (STATE_DIM, TRAJECTORY_COLUMNS, RunMetrics, ScenarioConfig,
                  SystemState, Trajectory, initial_state, per_step_noise,
                  rk4_step, run_scenario, system_derivative)
from .transform import (EXP_INPUT_LIMIT, DivergedError, FilteredPoint,
                        RegressionRow, alpha_tau_rho, exp_operator,
                        regression_row, regression_row_reference)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport", "DivergedError", "DremBank", "EstimatorState",
    "ExtendedRegression", "EXP_INPUT_LIMIT", "FilteredPoint",
    "FirstOrderFilter", "MixOutput", "NOISE_KINDS", "NoiseSpec",
    "REGRESSOR_KINDS", "RegressionRow", "RegressorSpec", "RunMetrics",
    "ScenarioConfig", "STATE_DIM", "SystemState", "TRAJECTORY_COLUMNS",
    "Trajectory", "TruthSpec", "adj3", "alpha_tau_rho", "check_assumptions",
    "det3", "drem_bank_derivatives", "drem_update_derivative",
    "eval_measurement", "eval_noise", "eval_regressor", "exp_operator",
    "extended_regression", "filter_derivative", "held_uniform_values",
    "initial_state", "mix", "per_step_noise", "plain_gradient_derivative",
    "regression_row", "regression_row_reference", "rk4_step", "run_scenario",
    "system_derivative",
]
