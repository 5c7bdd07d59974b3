//! The splitting method: problem instances, step-size rules, the fixed-point
//! operators and the sequential driver.

mod certify;
mod driver;
mod fixed_point;
mod instance;
mod params;
mod sweep;

pub use certify::{averagedness_slack, quasi_nonexpansive_slack, two_operator_slack};
pub use driver::{
    consensus_gap, dual_distances, dual_trajectory, iterate, zero_start, Run, SplitState, Status, StopRule, Trace, TraceRecord,
};
pub use fixed_point::{build_fixed_point, extract_solution, Extraction, CERTIFICATE_TOL};
pub use instance::{Mode, ProblemInstance};
pub use params::{default_steps, gamma_upper, lambda_upper, validate_lambda, validate_params, Bound, Rejection, StepParams};
pub use sweep::{apply, apply_mixed, apply_t, apply_t_tilde, sweep, sweep_cocoercive, sweep_frb, sweep_mixed, z_update, Step, Sweep};

pub(crate) use sweep::local;
