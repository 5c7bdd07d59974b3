use std::fmt;

use serde::Serialize;

use super::{Mode, ProblemInstance};
use crate::error::{Error, Result};

/// Which admissibility bound a parameter choice violated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum Bound {
    TooFewOperators { min_n: usize },
    Lipschitz,
    LambdaPositive,
    LambdaUpper { limit: f64 },
    GammaPositive,
    GammaUpper { limit: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rejection {
    pub bound: Bound,
    pub message: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Open upper bound on `λ`; infinite when `L = 0`.
///
/// Cocoercive mode uses `2/L`, or `4/L` when `n = 2`; the other modes `1/(2L)`.
pub fn lambda_upper(n: usize, mode: Mode, lipschitz: f64) -> f64 {
    if lipschitz == 0.0 {
        return f64::INFINITY;
    }
    match mode {
        Mode::Cocoercive if n == 2 => 4.0 / lipschitz,
        Mode::Cocoercive => 2.0 / lipschitz,
        Mode::Lipschitz | Mode::Mixed => 1.0 / (2.0 * lipschitz),
    }
}

/// Open upper bound on `γ` at a given `λ`.
pub fn gamma_upper(n: usize, mode: Mode, lipschitz: f64, lambda: f64) -> f64 {
    match mode {
        Mode::Cocoercive if n == 2 => 2.0 - lambda * lipschitz / 2.0,
        Mode::Cocoercive => 1.0 - lambda * lipschitz / 2.0,
        Mode::Lipschitz | Mode::Mixed => 1.0 - 2.0 * lambda * lipschitz,
    }
}

fn reject(bound: Bound, message: String) -> std::result::Result<(), Rejection> {
    Err(Rejection { bound, message })
}

/// Accepts iff `λ` and `γ` lie in the open intervals for which the chosen
/// operator is averaged (cocoercive) or strongly quasi-nonexpansive
/// (Lipschitz, mixed).
pub fn validate_params(n: usize, mode: Mode, lipschitz: f64, lambda: f64, gamma: f64) -> std::result::Result<(), Rejection> {
    validate_lambda(n, mode, lipschitz, lambda)?;
    let g_max = gamma_upper(n, mode, lipschitz, lambda);
    if !(gamma.is_finite() && gamma > 0.0) {
        return reject(Bound::GammaPositive, format!("gamma must be positive, got {gamma}"));
    }
    if gamma >= g_max {
        let rule = match mode {
            Mode::Cocoercive if n == 2 => "2 - lambda*L/2",
            Mode::Cocoercive => "1 - lambda*L/2",
            Mode::Lipschitz | Mode::Mixed => "1 - 2*lambda*L",
        };
        return reject(
            Bound::GammaUpper { limit: g_max },
            format!("gamma = {gamma} violates gamma < {rule} = {g_max}"),
        );
    }
    Ok(())
}

/// The `n`, `L` and `λ` part of [`validate_params`].
pub fn validate_lambda(n: usize, mode: Mode, lipschitz: f64, lambda: f64) -> std::result::Result<(), Rejection> {
    let min_n = mode.min_operators();
    if n < min_n {
        return reject(
            Bound::TooFewOperators { min_n },
            format!("{mode} mode needs n >= {min_n}, got n = {n}"),
        );
    }
    if !(lipschitz.is_finite() && lipschitz >= 0.0) {
        return reject(Bound::Lipschitz, format!("L must be finite and nonnegative, got {lipschitz}"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return reject(Bound::LambdaPositive, format!("lambda must be positive, got {lambda}"));
    }
    let l_max = lambda_upper(n, mode, lipschitz);
    if lambda >= l_max {
        let rule = match mode {
            Mode::Cocoercive if n == 2 => "4/L",
            Mode::Cocoercive => "2/L",
            Mode::Lipschitz | Mode::Mixed => "1/(2L)",
        };
        return reject(
            Bound::LambdaUpper { limit: l_max },
            format!("lambda = {lambda} violates lambda < {rule} = {l_max}"),
        );
    }
    Ok(())
}

/// Validated step sizes for one problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepParams {
    pub lambda: f64,
    pub gamma: f64,
    /// `L = max_i L_i` over the forward operators.
    pub lipschitz: f64,
    pub mode: Mode,
}

impl StepParams {
    pub fn new(problem: &ProblemInstance, lambda: f64, gamma: f64) -> Result<Self> {
        let lipschitz = problem.lipschitz();
        validate_params(problem.n(), problem.mode(), lipschitz, lambda, gamma).map_err(Error::InvalidParams)?;
        Ok(Self {
            lambda,
            gamma,
            lipschitz,
            mode: problem.mode(),
        })
    }

    /// `λ = 1/L` (cocoercive) or `1/(4L)` (other modes), `γ` at 90% of its
    /// bound; `λ = 1`, `γ = 0.9` when every forward operator is zero.
    pub fn defaults(problem: &ProblemInstance) -> Self {
        let (lambda, gamma) = default_steps(problem.n(), problem.mode(), problem.lipschitz());
        Self {
            lambda,
            gamma,
            lipschitz: problem.lipschitz(),
            mode: problem.mode(),
        }
    }

    /// Defaults with optional overrides, validated.
    pub fn resolve(problem: &ProblemInstance, lambda: Option<f64>, gamma: Option<f64>) -> Result<Self> {
        let d = Self::defaults(problem);
        let lambda = lambda.unwrap_or(d.lambda);
        let gamma = match gamma {
            Some(g) => g,
            None if lambda == d.lambda => d.gamma,
            None if problem.lipschitz() == 0.0 => 0.9,
            None => 0.9 * gamma_upper(problem.n(), problem.mode(), problem.lipschitz(), lambda),
        };
        Self::new(problem, lambda, gamma)
    }
}

pub fn default_steps(n: usize, mode: Mode, lipschitz: f64) -> (f64, f64) {
    if lipschitz == 0.0 {
        return (1.0, 0.9);
    }
    let lambda = match mode {
        Mode::Cocoercive => 1.0 / lipschitz,
        Mode::Lipschitz | Mode::Mixed => 1.0 / (4.0 * lipschitz),
    };
    (lambda, 0.9 * gamma_upper(n, mode, lipschitz, lambda))
}
