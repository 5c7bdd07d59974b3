//! Classical methods used for comparison.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators::{Forward, Resolvent, Vector};
use crate::splitting::{Mode, ProblemInstance};

/// Forward-backward iterates `x^{k+1} = J_{λA}(x^k - λB(x^k))`, returned as
/// `x^0..x^{iters}`.
pub fn fb_baseline(b: &dyn Forward, a: &dyn Resolvent, lambda: f64, x0: &Vector, iters: usize) -> Result<Vec<Vector>> {
    if iters == 0 {
        return Err(Error::InvalidProblem("forward-backward needs at least one iteration".into()));
    }
    let mut xs = Vec::with_capacity(iters + 1);
    xs.push(x0.clone());
    for _ in 0..iters {
        let x = xs.last().expect("nonempty");
        let next = a.resolve(lambda, &x.sub(&b.eval(x)?.scale(lambda)))?;
        xs.push(next);
    }
    Ok(xs)
}

/// Davis–Yin splitting in the product space `H^n` with the diagonal
/// constraint:
///
/// ```text
/// x^k       = (1/n) Σ z_i^k
/// z_i^{k+1} = z_i^k + J_{λA_i}(2x^k - z_i^k - λB_i(x^k)) - x^k
/// ```
///
/// `forwards[i]` pairs with `resolvents[i]`; missing trailing entries are the
/// zero map. Returns `x^0..x^{iters}`.
pub fn product_space_dy_blocks(
    resolvents: &[Arc<dyn Resolvent>],
    forwards: &[Arc<dyn Forward>],
    lambda: f64,
    z0: &[Vector],
    iters: usize,
) -> Result<Vec<Vector>> {
    let n = resolvents.len();
    if n == 0 || z0.len() != n || forwards.len() > n {
        return Err(Error::InvalidProblem(format!(
            "product-space method needs {n} blocks and at most {n} forward operators"
        )));
    }
    let mean = |z: &[Vector]| {
        let mut s = Vector::zeros(z[0].dim());
        for zi in z {
            s = s.add(zi);
        }
        s.scale(1.0 / n as f64)
    };
    let mut z = z0.to_vec();
    let mut xs = Vec::with_capacity(iters + 1);
    for _ in 0..iters {
        let x = mean(&z);
        let mut next = Vec::with_capacity(n);
        for (i, zi) in z.iter().enumerate() {
            let mut arg = x.scale(2.0).sub(zi);
            if let Some(b) = forwards.get(i) {
                arg = arg.sub(&b.eval(&x)?.scale(lambda));
            }
            next.push(zi.add(&resolvents[i].resolve(lambda, &arg)?).sub(&x));
        }
        xs.push(x);
        z = next;
    }
    xs.push(mean(&z));
    Ok(xs)
}

/// [`product_space_dy_blocks`] on a cocoercive problem, pairing `B_i` with
/// `A_i` and padding `B_n = 0`. Requires `λ < 2/L`.
pub fn product_space_dy(problem: &ProblemInstance, lambda: f64, z0: &[Vector], iters: usize) -> Result<Vec<Vector>> {
    if problem.mode() != Mode::Cocoercive {
        return Err(Error::InvalidProblem("product-space method needs cocoercive forward operators".into()));
    }
    let l = problem.lipschitz();
    if !(lambda > 0.0 && (l == 0.0 || lambda < 2.0 / l)) {
        return Err(Error::InvalidProblem(format!("product-space method needs 0 < λ < 2/L, got λ = {lambda}, L = {l}")));
    }
    product_space_dy_blocks(problem.resolvents(), problem.forwards(), lambda, z0, iters)
}
