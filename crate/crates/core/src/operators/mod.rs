//! Operator abstractions: points of `ℝ^d`, set-valued operators represented by
//! their resolvents, single-valued forward operators, and sampled regularity
//! checks.
//!
//! All operators are immutable after construction and safe to share across
//! threads.

mod check;
mod forward;
pub mod instrument;
pub mod linalg;
mod resolvent;
mod vector;

pub use check::{check_firm_nonexpansive, check_forward, FneReport, RegularityReport, INEQUALITY_TOL};
pub use forward::{Forward, ForwardKind, ForwardOp, Regularity};
pub use linalg::Matrix;
pub use resolvent::{affine_value, Resolvent, ResolventKind, ResolventOp};
pub use vector::{blocks_norm_sq, blocks_sub, Vector};
