//! Shared fixtures for the benchmarks.

use ringsplit::operators::Vector;
use ringsplit::problems::make_quadratic_consensus;
use ringsplit::splitting::{zero_start, ProblemInstance, StepParams};

/// Seeded quadratic consensus instance with default steps and a zero start.
pub fn consensus_fixture(n: usize, dim: usize) -> (ProblemInstance, StepParams, Vec<Vector>) {
    let problem = make_quadratic_consensus(n, dim, 42)
        .and_then(|spec| spec.build())
        .expect("builtin instance builds");
    let params = StepParams::defaults(&problem);
    let z0 = zero_start(&problem);
    (problem, params, z0)
}
