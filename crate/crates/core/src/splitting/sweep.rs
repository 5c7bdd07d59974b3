//! One sweep computes the shadow point `x ∈ H^n` from `z ∈ H^{n-1}`:
//!
//! ```text
//! x_1 = J_{λA_1}(z_1)
//! x_i = J_{λA_i}(z_i + x_{i-1} - z_{i-1} - λB_{i-1}(x_{i-1}) - r_i)      2 ≤ i ≤ n-1
//! x_n = J_{λA_n}(x_1 + x_{n-1} - z_{n-1} - λB_{n-1}(x_{n-1}) - r_n)
//! ```
//!
//! where `r_i = λ(B_{i-2}(x_{i-1}) - B_{i-2}(x_{i-2}))` is the reflection
//! term (zero in cocoercive mode, and in mixed mode whenever `B_{i-2}` is
//! cocoercive) and `B_{n-1}` is absent in Lipschitz mode. The governing
//! variable is then updated by `z_i ← z_i + γ(x_{i+1} - x_i)`.
//!
//! The per-node arithmetic lives in [`local`] so the ring simulator performs
//! exactly the same floating-point operations.

use super::{Mode, ProblemInstance, StepParams};
use crate::error::{Error, Result};
use crate::operators::Vector;

pub(crate) mod local {
    use crate::operators::Vector;

    /// `a + b - c - λf - r`, evaluated left to right.
    pub fn argument(a: &Vector, b: &Vector, c: &Vector, forward: Option<&Vector>, reflected: Option<&Vector>, lambda: f64) -> Vector {
        let mut arg = a.add(b).sub(c);
        if let Some(f) = forward {
            arg = arg.sub(&f.scale(lambda));
        }
        if let Some(r) = reflected {
            arg = arg.sub(r);
        }
        arg
    }

    /// `λ(B(x_own) - B(x_prev))`.
    pub fn reflected(at_own: &Vector, at_prev: &Vector, lambda: f64) -> Vector {
        at_own.sub(at_prev).scale(lambda)
    }

    /// `z + γ(x_next - x_prev)`.
    pub fn z_step(z: &Vector, x_next: &Vector, x_prev: &Vector, gamma: f64) -> Vector {
        z.add(&x_next.sub(x_prev).scale(gamma))
    }
}

/// Shadow point and the forward evaluations made while computing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    /// `x_1..x_n`.
    pub x: Vec<Vector>,
    /// `B_j(x_j)` for every forward operator `B_j`.
    pub forward_cache: Vec<Vector>,
    /// `λ(B_j(x_{j+1}) - B_j(x_j))` where a reflection was used.
    pub reflected: Vec<Option<Vector>>,
}

/// Result of one application of the fixed-point operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub z_next: Vec<Vector>,
    pub sweep: Sweep,
}

impl Step {
    pub fn x(&self) -> &[Vector] {
        &self.sweep.x
    }

    /// `‖z⁺ - z‖²`, summed over blocks in index order.
    pub fn residual_sq(&self, z: &[Vector]) -> f64 {
        let mut total = 0.0;
        for (next, prev) in self.z_next.iter().zip(z) {
            total += next.sub(prev).norm_sq();
        }
        total
    }
}

fn check_z(problem: &ProblemInstance, z: &[Vector]) -> Result<()> {
    if z.len() != problem.n() - 1 {
        return Err(Error::InvalidProblem(format!(
            "governing variable has {} blocks, expected {}",
            z.len(),
            problem.n() - 1
        )));
    }
    for block in z {
        block.ensure_dim(problem.dim())?;
        block.ensure_finite("governing variable")?;
    }
    Ok(())
}

fn require_mode(params: &StepParams, problem: &ProblemInstance, mode: Mode) -> Result<()> {
    if problem.mode() != mode || params.mode != mode {
        return Err(Error::InvalidProblem(format!(
            "operation requires {mode} mode, problem is {} and parameters are {}",
            problem.mode(),
            params.mode
        )));
    }
    Ok(())
}

/// Sweep for whatever mode the problem declares.
pub fn sweep(problem: &ProblemInstance, lambda: f64, z: &[Vector]) -> Result<Sweep> {
    check_z(problem, z)?;
    let n = problem.n();
    let res = problem.resolvents();
    let m = problem.forwards().len();
    let mut x: Vec<Vector> = Vec::with_capacity(n);
    let mut forward_cache: Vec<Vector> = Vec::with_capacity(m);
    let mut reflected: Vec<Option<Vector>> = vec![None; m];

    x.push(res[0].resolve(lambda, &z[0])?);
    for i in 2..=n {
        // B_{i-1}(x_{i-1})
        let forward = match problem.forward(i - 1) {
            Some(b) => {
                forward_cache.push(b.eval(&x[i - 2])?);
                Some(i - 2)
            }
            None => None,
        };
        // λ(B_{i-2}(x_{i-1}) - B_{i-2}(x_{i-2}))
        if problem.reflects_into(i) {
            let b = problem.forward(i - 2).expect("reflection source exists");
            let at_own = b.eval(&x[i - 2])?;
            reflected[i - 3] = Some(local::reflected(&at_own, &forward_cache[i - 3], lambda));
        }
        let f = forward.map(|j| &forward_cache[j]);
        let r = if i >= 3 { reflected[i - 3].as_ref() } else { None };
        let arg = if i < n {
            local::argument(&z[i - 1], &x[i - 2], &z[i - 2], f, r, lambda)
        } else {
            local::argument(&x[0], &x[n - 2], &z[n - 2], f, r, lambda)
        };
        x.push(res[i - 1].resolve(lambda, &arg)?);
    }
    Ok(Sweep {
        x,
        forward_cache,
        reflected,
    })
}

/// The governing update applied to a finished sweep.
pub fn z_update(z: &[Vector], x: &[Vector], gamma: f64) -> Vec<Vector> {
    z.iter()
        .enumerate()
        .map(|(i, zi)| local::z_step(zi, &x[i + 1], &x[i], gamma))
        .collect()
}

/// Applies the mode's fixed-point operator to `z`.
pub fn apply(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Step> {
    let sweep = sweep(problem, params.lambda, z)?;
    let z_next = z_update(z, &sweep.x, params.gamma);
    for block in &z_next {
        block.ensure_finite("governing update")?;
    }
    Ok(Step { z_next, sweep })
}

/// Forward-backward sweep (cocoercive forwards, one evaluation each).
pub fn sweep_cocoercive(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Sweep> {
    require_mode(params, problem, Mode::Cocoercive)?;
    sweep(problem, params.lambda, z)
}

/// Forward-reflected-backward sweep (each forward evaluated at two points).
pub fn sweep_frb(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Sweep> {
    require_mode(params, problem, Mode::Lipschitz)?;
    sweep(problem, params.lambda, z)
}

pub fn sweep_mixed(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Sweep> {
    require_mode(params, problem, Mode::Mixed)?;
    sweep(problem, params.lambda, z)
}

/// `T(z)` for cocoercive problems.
pub fn apply_t(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Step> {
    require_mode(params, problem, Mode::Cocoercive)?;
    apply(problem, params, z)
}

/// `T̃(z)` for monotone Lipschitz problems.
pub fn apply_t_tilde(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Step> {
    require_mode(params, problem, Mode::Lipschitz)?;
    apply(problem, params, z)
}

pub fn apply_mixed(problem: &ProblemInstance, params: &StepParams, z: &[Vector]) -> Result<Step> {
    require_mode(params, problem, Mode::Mixed)?;
    apply(problem, params, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{ForwardOp, Matrix, ResolventOp};

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    fn zero_problem(mode: Mode, n: usize, d: usize) -> ProblemInstance {
        let m = mode.forward_count(n);
        ProblemInstance::from_ops(mode, vec![ResolventOp::zero(d); n], vec![ForwardOp::zero(d); m]).unwrap()
    }

    #[test]
    fn two_zero_operators_copy_z() {
        let p = zero_problem(Mode::Cocoercive, 2, 2);
        let params = StepParams::defaults(&p);
        let z = vec![v(&[1.5, -2.0])];
        let step = apply_t(&p, &params, &z).unwrap();
        assert_eq!(step.x(), &[z[0].clone(), z[0].clone()]);
        assert_eq!(step.z_next, z);
    }

    #[test]
    fn three_zero_operators_unroll_by_hand() {
        let (a, b) = (v(&[2.0]), v(&[-5.0]));
        for mode in [Mode::Cocoercive, Mode::Lipschitz, Mode::Mixed] {
            let p = zero_problem(mode, 3, 1);
            let s = sweep(&p, 0.3, &[a.clone(), b.clone()]).unwrap();
            assert_eq!(s.x, vec![a.clone(), b.clone(), a.clone()], "{mode}");
        }
    }

    #[test]
    fn frb_all_zero_equals_fb_all_zero() {
        let z = vec![v(&[1.0, 2.0]), v(&[0.5, -1.0]), v(&[3.0, 0.0])];
        let fb = zero_problem(Mode::Cocoercive, 4, 2);
        let frb = zero_problem(Mode::Lipschitz, 4, 2);
        let pf = StepParams::new(&fb, 0.7, 0.5).unwrap();
        let pl = StepParams::new(&frb, 0.7, 0.5).unwrap();
        assert_eq!(apply_t(&fb, &pf, &z).unwrap().z_next, apply_t_tilde(&frb, &pl, &z).unwrap().z_next);
    }

    #[test]
    fn reflections_only_where_lipschitz() {
        let k = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let skew = ForwardOp::skew(k).unwrap();
        let quad = ForwardOp::quad_gradient(Matrix::identity(2, 2), v(&[1.0, 0.0])).unwrap();
        let p = ProblemInstance::from_ops(
            Mode::Mixed,
            vec![ResolventOp::zero(2); 4],
            vec![quad.clone(), skew, quad],
        )
        .unwrap();
        let z = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        let s = sweep(&p, 0.1, &z).unwrap();
        assert!(s.reflected[0].is_none());
        assert!(s.reflected[1].is_some());
        assert!(s.reflected[2].is_none());
    }

    #[test]
    fn mode_mismatch_and_bad_z() {
        let p = zero_problem(Mode::Cocoercive, 3, 1);
        let params = StepParams::defaults(&p);
        assert!(apply_t_tilde(&p, &params, &[v(&[0.0]), v(&[0.0])]).is_err());
        assert!(apply_t(&p, &params, &[v(&[0.0])]).is_err());
        assert!(apply_t(&p, &params, &[v(&[0.0]), v(&[0.0, 1.0])]).is_err());
    }
}
