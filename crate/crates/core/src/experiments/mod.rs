//! Scaling studies, exponent fits, dephasing sweeps and the adaptive
//! estimation loop.

mod adaptive;
mod dephasing;
mod fit;
mod preparation;
mod scaling;

pub use adaptive::{
    adaptive_estimate, optimal_probe_size, probe_size_for, AdaptiveConfig, AdaptiveRound, AdaptiveRun, ProbeModel,
    DEFAULT_MAX_PROBE_SIZE, LIKELIHOOD_GRID,
};
pub use dephasing::{run_dephasing_sweep, DephasingRow, DephasingSettings, DephasingSweep, LINDBLAD_DT_SCALE};
pub use fit::{
    check_beta_two_alpha, default_window, fit_scaling, fit_window, linear_fit, BetaAlphaReport, FitKind, ScalingResult,
    MIN_FIT_POINTS, R2_FLAG,
};
pub use preparation::{
    preparation_schedule, run_adiabatic, run_prepare_unknown, AdiabaticRow, AdiabaticRun, ProbeRow, ProbeSweep,
    TrajectoryRow, PREP_DELTA_FRACTION,
};
pub use scaling::{
    critical_point, critical_table, gap_fit_kind, preparation_table, preparation_time, qfi_fit_kind, run_gap_scaling,
    run_preparation_time_scaling, run_qfi_scaling, run_scaling, theta_scan, CriticalRow, PrepTimeRow, ScalingStudy,
    ScanRow, CRITICAL_TOL,
};
