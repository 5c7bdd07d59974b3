//! Problem builders, reference oracles and baseline methods.

mod baselines;
mod builders;
mod oracle;
mod spec;

pub use baselines::{fb_baseline, product_space_dy, product_space_dy_blocks};
pub use builders::{
    builtin, make_affine_certified, make_bilinear_saddle, make_box_feasibility, make_certified, make_quadratic_consensus,
    make_random_saddle, make_rotation_counterexample, quadratic_consensus_from_terms, Certified, BUILDER_CHECK_SAMPLES, BUILTINS,
};
pub use oracle::{grid_search, linear_solve, GridResult};
pub use spec::{ForwardDesc, ForwardKindDesc, OracleSpec, ProblemSpec, ResolventDesc};
