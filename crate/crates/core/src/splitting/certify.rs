//! Slacks (`right side - left side`) of the contraction inequalities satisfied
//! by the fixed-point operators. A nonnegative slack means the inequality
//! holds at the given points.

use super::{apply, Mode, ProblemInstance, StepParams};
use crate::error::{Error, Result};
use crate::operators::{blocks_norm_sq, blocks_sub, Vector};

fn sum_blocks(blocks: &[Vector]) -> Vector {
    let mut total = Vector::zeros(blocks[0].dim());
    for b in blocks {
        total = total.add(b);
    }
    total
}

fn require(params: &StepParams, problem: &ProblemInstance, mode: Mode) -> Result<()> {
    if problem.mode() != mode || params.mode != mode {
        return Err(Error::InvalidProblem(format!("inequality requires {mode} mode")));
    }
    Ok(())
}

/// Terms shared by the cocoercive inequalities: `(‖Tz - Tz̄‖², ‖d‖², ‖Σd_i‖², ‖z - z̄‖²)`
/// with `d = (Id - T)z - (Id - T)z̄`.
fn pair_terms(problem: &ProblemInstance, params: &StepParams, z: &[Vector], z_bar: &[Vector]) -> Result<(f64, f64, f64, f64)> {
    let tz = apply(problem, params, z)?.z_next;
    let tzb = apply(problem, params, z_bar)?.z_next;
    let d = blocks_sub(&blocks_sub(z, &tz), &blocks_sub(z_bar, &tzb));
    Ok((
        blocks_norm_sq(&blocks_sub(&tz, &tzb)),
        blocks_norm_sq(&d),
        sum_blocks(&d).norm_sq(),
        blocks_norm_sq(&blocks_sub(z, z_bar)),
    ))
}

/// ```text
/// ‖z - z̄‖² - ‖Tz - Tz̄‖² - ((1-γ)/γ - λL/(2γ))‖d‖² - (1/γ)‖Σd_i‖²
/// ```
pub fn averagedness_slack(problem: &ProblemInstance, params: &StepParams, z: &[Vector], z_bar: &[Vector]) -> Result<f64> {
    require(params, problem, Mode::Cocoercive)?;
    let (StepParams { lambda, gamma, lipschitz, .. }, (t, d, s, rhs)) = (*params, pair_terms(problem, params, z, z_bar)?);
    let coef = (1.0 - gamma) / gamma - lambda * lipschitz / (2.0 * gamma);
    Ok(rhs - t - coef * d - s / gamma)
}

/// Sharper two-operator form:
/// `‖z - z̄‖² - ‖Tz - Tz̄‖² - ((2-γ)/γ - λL/(2γ))‖d‖²`.
pub fn two_operator_slack(problem: &ProblemInstance, params: &StepParams, z: &[Vector], z_bar: &[Vector]) -> Result<f64> {
    require(params, problem, Mode::Cocoercive)?;
    if problem.n() != 2 {
        return Err(Error::InvalidProblem("two-operator inequality needs n = 2".into()));
    }
    let (StepParams { lambda, gamma, lipschitz, .. }, (t, d, _, rhs)) = (*params, pair_terms(problem, params, z, z_bar)?);
    let coef = (2.0 - gamma) / gamma - lambda * lipschitz / (2.0 * gamma);
    Ok(rhs - t - coef * d)
}

/// For `z̄ ∈ Fix T̃` and `e = z - T̃z`:
///
/// ```text
/// ‖z - z̄‖² - ‖T̃z - z̄‖² - ((1-γ)/γ - 2λL/γ)‖e‖² - (1/γ)‖Σe_i‖²
///           - γλL‖e_1‖² - γλL‖e_{n-1}‖²
/// ```
pub fn quasi_nonexpansive_slack(problem: &ProblemInstance, params: &StepParams, z: &[Vector], z_bar: &[Vector]) -> Result<f64> {
    require(params, problem, Mode::Lipschitz)?;
    let StepParams { lambda, gamma, lipschitz, .. } = *params;
    let tz = apply(problem, params, z)?.z_next;
    let e = blocks_sub(z, &tz);
    let coef = (1.0 - gamma) / gamma - 2.0 * lambda * lipschitz / gamma;
    let n = problem.n();
    let lhs = blocks_norm_sq(&blocks_sub(&tz, z_bar))
        + coef * blocks_norm_sq(&e)
        + sum_blocks(&e).norm_sq() / gamma
        + gamma * lambda * lipschitz * e[0].norm_sq()
        + gamma * lambda * lipschitz * e[n - 2].norm_sq();
    Ok(blocks_norm_sq(&blocks_sub(z, z_bar)) - lhs)
}
