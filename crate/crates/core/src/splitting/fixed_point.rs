//! Construction of a fixed point from a primal solution with its subgradient
//! certificate, and recovery of the solution from a fixed point.
//!
//! Both hold in every mode: in Lipschitz mode the construction is the
//! cocoercive one with `B_{n-1} = 0`, whose fixed points coincide with those
//! of the reflected operator.

use super::{ProblemInstance, StepParams};
use crate::error::{Error, Result};
use crate::operators::Vector;

/// Maximum `‖Σv_i + ΣB_i(x⋆)‖` accepted as a solution certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Builds `z̄ ∈ Fix T` from `x⋆` and `v_i ∈ A_i(x⋆)` with
/// `Σv_i + ΣB_i(x⋆) = 0`:
///
/// ```text
/// z̄_1 = x⋆ + λv_1
/// z̄_i = λv_i + z̄_{i-1} + λB_{i-1}(x⋆)     2 ≤ i ≤ n-1
/// ```
pub fn build_fixed_point(problem: &ProblemInstance, params: &StepParams, x_star: &Vector, v: &[Vector]) -> Result<Vec<Vector>> {
    let n = problem.n();
    if v.len() != n {
        return Err(Error::InvalidProblem(format!("certificate has {} entries, expected {n}", v.len())));
    }
    x_star.ensure_dim(problem.dim())?;
    x_star.ensure_finite("solution")?;
    for vi in v {
        vi.ensure_dim(problem.dim())?;
        vi.ensure_finite("certificate")?;
    }
    let lambda = params.lambda;
    let forward_at_star = problem
        .forwards()
        .iter()
        .map(|b| b.eval(x_star))
        .collect::<Result<Vec<_>>>()?;

    let mut total = Vector::zeros(problem.dim());
    for vi in v {
        total = total.add(vi);
    }
    for b in &forward_at_star {
        total = total.add(b);
    }
    let residual = total.norm();
    if residual > CERTIFICATE_TOL {
        return Err(Error::Certificate {
            residual,
            tolerance: CERTIFICATE_TOL,
        });
    }

    let mut z = Vec::with_capacity(n - 1);
    z.push(x_star.add(&v[0].scale(lambda)));
    for i in 2..n {
        let next = v[i - 1]
            .scale(lambda)
            .add(&z[i - 2])
            .add(&forward_at_star[i - 2].scale(lambda));
        z.push(next);
    }
    Ok(z)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    /// `x̄ = J_{λA_1}(z̄_1)`.
    pub x: Vector,
    /// Largest deviation in the identities
    /// `x̄ = J_{λA_i}(z̄_i - z̄_{i-1} + x̄ - λB_{i-1}(x̄))` and
    /// `x̄ = J_{λA_n}(2x̄ - z̄_{n-1} - λB_{n-1}(x̄))`.
    pub max_deviation: f64,
}

pub fn extract_solution(problem: &ProblemInstance, params: &StepParams, z_bar: &[Vector]) -> Result<Extraction> {
    let n = problem.n();
    if z_bar.len() != n - 1 {
        return Err(Error::InvalidProblem(format!(
            "fixed point has {} blocks, expected {}",
            z_bar.len(),
            n - 1
        )));
    }
    let lambda = params.lambda;
    let res = problem.resolvents();
    let x = res[0].resolve(lambda, &z_bar[0])?;
    let forward_term = |j: usize| -> Result<Vector> {
        match problem.forward(j) {
            Some(b) => Ok(b.eval(&x)?.scale(lambda)),
            None => Ok(Vector::zeros(problem.dim())),
        }
    };
    let mut max_deviation: f64 = 0.0;
    for i in 2..n {
        let arg = z_bar[i - 1].sub(&z_bar[i - 2]).add(&x).sub(&forward_term(i - 1)?);
        max_deviation = max_deviation.max(res[i - 1].resolve(lambda, &arg)?.dist(&x));
    }
    let arg = x.add(&x).sub(&z_bar[n - 2]).sub(&forward_term(n - 1)?);
    max_deviation = max_deviation.max(res[n - 1].resolve(lambda, &arg)?.dist(&x));
    Ok(Extraction { x, max_deviation })
}
