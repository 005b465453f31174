"""Differentially private mean estimation with the trimmed mean and smooth sensitivity."""

from .budgets import (
    CDP,
    ApproxDP,
    PrivacyBudget,
    PureDP,
    RenyiCurve,
    TCDP,
    cdp_to_approx,
    compose_group,
    implies,
    iterate_group,
    pure_to_cdp,
)
from .noise import (
    DistortionPair,
    NoiseFamily,
    NoiseSpec,
    arsinh_normal,
    calibrate_scale,
    gaussian,
    laplace,
    lln,
    log_density,
    privacy_cost,
    sample,
    student_t,
    uln,
    variance,
)
from .sensitivity import (
    SensitivityReport,
    SortedDataset,
    TrimSpec,
    TruncationMode,
    brute_force_smooth_sensitivity,
    smooth_sensitivity_input_trunc,
    smooth_sensitivity_output_trunc,
    trimmed_mean,
)
from .mechanism import MechanismConfig, ReleaseRecord, global_sensitivity_baseline, release
from .calibration import CalibrationProblem, default_t_grid, grid_search, optimize_lln_sigma
from .bounds import (
    BoundInputs,
    lower_bound_tail,
    lower_bound_variance,
    mechanism_mse_bound,
    ss_second_moment_bound,
    trim_var_bound_general,
    trim_var_bound_symmetric,
    truncation_error_bound,
)
from .harness import (
    Algorithm,
    DataFamily,
    DataModel,
    ExperimentResult,
    ExperimentSpec,
    emit_csv,
    generate,
    parse_csv,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
