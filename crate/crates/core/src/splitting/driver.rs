use std::time::Instant;

use serde::Serialize;

use super::{apply, ProblemInstance, Step, StepParams};
use crate::error::{Error, Result};
use crate::operators::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StopRule {
    /// Stop once `‖z^{k+1} - z^k‖²` is at most this.
    pub tol_residual_sq: f64,
    pub max_iters: u64,
    /// Residual is evaluated every `check_period` iterations (and at the last).
    pub check_period: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            tol_residual_sq: 1e-18,
            max_iters: 1_000_000,
            check_period: 1,
        }
    }
}

impl StopRule {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.tol_residual_sq.is_nan() || self.tol_residual_sq < 0.0 || self.check_period == 0 || self.max_iters == 0 {
            return Err(Error::InvalidProblem(format!("invalid stopping rule {self:?}")));
        }
        Ok(())
    }

    pub(crate) fn is_check(&self, k: u64) -> bool {
        k.is_multiple_of(self.check_period) || k == self.max_iters
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    /// Iterations completed; the residual is `‖z^k - z^{k-1}‖²`.
    pub k: u64,
    pub residual_sq: f64,
    /// `max_i ‖x_{i+1} - x_i‖` for the sweep that produced `z^k`.
    pub consensus_gap: f64,
    /// `B_i(x_i)` for each forward operator, when recorded.
    pub dual_values: Option<Vec<Vector>>,
    /// Seconds since the start of the run.
    pub wall_time: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Records without wall-clock times, for reproducibility comparisons.
    pub fn without_timing(&self) -> Trace {
        Trace {
            records: self
                .records
                .iter()
                .map(|r| TraceRecord {
                    wall_time: 0.0,
                    ..r.clone()
                })
                .collect(),
        }
    }
}

pub fn consensus_gap(x: &[Vector]) -> f64 {
    x.windows(2).map(|w| w[1].dist(&w[0])).fold(0.0, f64::max)
}

/// Driver state between applications.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState {
    pub z: Vec<Vector>,
    pub x: Vec<Vector>,
    pub forward_cache: Vec<Vector>,
    pub k: u64,
    pub last_residual_sq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub state: SplitState,
    pub trace: Trace,
    pub status: Status,
}

impl Run {
    /// The solution estimate `x_1`.
    pub fn solution(&self) -> &Vector {
        &self.state.x[0]
    }
}

/// Zero initial point `z⁰ = 0 ∈ H^{n-1}`.
pub fn zero_start(problem: &ProblemInstance) -> Vec<Vector> {
    vec![Vector::zeros(problem.dim()); problem.n() - 1]
}

/// Repeats the mode's fixed-point operator until the residual test passes or
/// the iteration budget runs out.
pub fn iterate(problem: &ProblemInstance, params: &StepParams, z0: Vec<Vector>, stop: StopRule, record_duals: bool) -> Result<Run> {
    let checked = StepParams::new(problem, params.lambda, params.gamma)?;
    if checked.mode != params.mode {
        return Err(Error::InvalidProblem("parameter mode does not match the problem".into()));
    }
    stop.validate()?;
    let start = Instant::now();
    let mut trace = Trace::default();
    let mut z = z0;
    let mut k = 0;
    loop {
        let Step { z_next, sweep } = apply(problem, params, &z)?;
        k += 1;
        let mut status = None;
        let mut last_residual_sq = f64::NAN;
        if stop.is_check(k) {
            let mut residual_sq = 0.0;
            for (next, prev) in z_next.iter().zip(&z) {
                residual_sq += next.sub(prev).norm_sq();
            }
            last_residual_sq = residual_sq;
            trace.records.push(TraceRecord {
                k,
                residual_sq,
                consensus_gap: consensus_gap(&sweep.x),
                dual_values: record_duals.then(|| sweep.forward_cache.clone()),
                wall_time: start.elapsed().as_secs_f64(),
            });
            if residual_sq <= stop.tol_residual_sq {
                status = Some(Status::Converged);
            }
        }
        if status.is_none() && k >= stop.max_iters {
            status = Some(Status::MaxIters);
        }
        z = z_next;
        if let Some(status) = status {
            return Ok(Run {
                state: SplitState {
                    z,
                    x: sweep.x,
                    forward_cache: sweep.forward_cache,
                    k,
                    last_residual_sq,
                },
                trace,
                status,
            });
        }
    }
}

/// `‖B_i(x_i^k) - B_i(x_i^final)‖` for every record (outer index) and forward
/// operator (inner index), with the final record as reference.
pub fn dual_trajectory(trace: &Trace) -> Result<Vec<Vec<f64>>> {
    let last = trace.last().ok_or(Error::DualValuesAbsent)?;
    let reference = last.dual_values.as_ref().ok_or(Error::DualValuesAbsent)?;
    dual_distances(trace, reference)
}

/// `‖B_i(x_i^k) - target_i‖` for every record.
pub fn dual_distances(trace: &Trace, targets: &[Vector]) -> Result<Vec<Vec<f64>>> {
    trace
        .records
        .iter()
        .map(|r| {
            let duals = r.dual_values.as_ref().ok_or(Error::DualValuesAbsent)?;
            Ok(duals.iter().zip(targets).map(|(b, t)| b.dist(t)).collect())
        })
        .collect()
}
