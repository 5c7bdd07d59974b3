//! Splitting algorithms for finding a zero of a sum of finitely many monotone
//! operators
//!
//! ```text
//!     0 ∈ A_1(x) + … + A_n(x) + B_1(x) + … + B_m(x)
//! ```
//!
//! where each `A_i` is maximally monotone and known only through its resolvent,
//! and each `B_i` is single-valued and either cocoercive or monotone and
//! Lipschitz. The iterations work on a governing variable `z ∈ H^{n-1}` and
//! produce a shadow sequence `x ∈ H^n` whose coordinates reach consensus at a
//! solution. Every update only couples neighbouring indices, so the scheme runs
//! on a ring of agents without any global averaging step.
//!
//! Modules:
//! - [`operators`]: vectors, resolvent and forward operators, regularity checks.
//! - [`splitting`]: the fixed-point operators, parameter rules, iteration driver.
//! - [`ringsim`]: deterministic message-passing simulation of the ring protocol.
//! - [`problems`]: problem builders, independent oracles and baseline methods.
//!
//! Indices in documentation follow the mathematical 1-based convention
//! (`A_1..A_n`, `z_1..z_{n-1}`); storage is 0-based, so `A_i` lives at
//! `resolvents[i - 1]`.

pub mod error;
pub mod operators;
pub mod problems;
pub mod ringsim;
pub mod rng;
pub mod splitting;

pub use error::{Error, Result};
pub use operators::{
    Forward, ForwardKind, ForwardOp, Regularity, Resolvent, ResolventKind, ResolventOp, Vector,
};
pub use problems::ProblemSpec;
pub use ringsim::RingNetwork;
pub use splitting::{Mode, ProblemInstance, StepParams, StopRule, Trace};
