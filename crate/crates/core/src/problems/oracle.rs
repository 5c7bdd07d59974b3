//! Reference solvers that never touch the splitting code.

use super::spec::ProblemSpec;
use crate::error::{Error, Result};
use crate::operators::{Forward, Matrix, ResolventKind, Vector};

/// Solves `0 = ΣA_i(x) + ΣB_j(x)` by LU factorisation when every operator is
/// affine (`A_i` zero or affine, any forward kind).
pub fn linear_solve(spec: &ProblemSpec) -> Result<Vector> {
    let d = spec.dim;
    let mut m = Matrix::zeros(d, d);
    let mut b = Vector::zeros(d);
    for (i, r) in spec.resolvent_ops()?.iter().enumerate() {
        match r.kind() {
            ResolventKind::Zero => {}
            ResolventKind::AffineResolvent { q, c } => {
                m += q;
                b = b.sub(c);
            }
            _ => return Err(Error::Oracle(format!("A_{} is not affine; linear solve does not apply", i + 1))),
        }
    }
    for f in spec.forward_ops()? {
        let (mf, bf) = f.affine_parts();
        m += mf;
        b = b.add(&bf);
    }
    let rhs = nalgebra::DVector::from_iterator(d, b.iter().map(|v| -v));
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Oracle("operator sum is singular".into()))?;
    Vector::new(x.iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub x: Vector,
    /// `max_j dist(0, Σ_i A_i(x)_j + Σ B(x)_j)` at the returned point.
    pub violation: f64,
}

fn interval_distance(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    }
}

/// Brute-force search over the grid `{-radius + k·step}^d` (`d ≤ 2`) for the
/// point where `0` is closest to satisfying the optimality condition. Needs
/// resolvent kinds whose values are products of intervals. Ties keep the
/// first point in lexicographic order.
pub fn grid_search(spec: &ProblemSpec, step: f64, radius: f64) -> Result<GridResult> {
    let d = spec.dim;
    if d > 2 {
        return Err(Error::Oracle(format!("grid search supports d ≤ 2, got {d}")));
    }
    if !(step > 0.0 && radius > 0.0) {
        return Err(Error::Oracle("grid search needs positive step and radius".into()));
    }
    let resolvents = spec.resolvent_ops()?;
    let forwards = spec.forward_ops()?;
    let count = (2.0 * radius / step).round() as usize + 1;
    let coord = |k: usize| -radius + k as f64 * step;
    let total = count.pow(d as u32);
    let mut best: Option<GridResult> = None;
    for flat in 0..total {
        let x = Vector::from_fn(d, |j| coord(if j == 0 { flat / count.pow(d as u32 - 1) } else { flat % count }));
        let mut forward_sum = Vector::zeros(d);
        for f in &forwards {
            forward_sum = forward_sum.add(&f.eval(&x)?);
        }
        let mut violation: f64 = 0.0;
        let mut feasible = true;
        for j in 0..d {
            let (mut lo, mut hi) = (forward_sum[j], forward_sum[j]);
            for r in &resolvents {
                match r.value_interval(&x, j) {
                    Some((a, b)) => {
                        lo += a;
                        hi += b;
                    }
                    None if matches!(r.kind(), ResolventKind::HalfspaceProjection { .. }) => {
                        return Err(Error::Oracle("grid search cannot evaluate halfspace normal cones".into()));
                    }
                    None => feasible = false,
                }
            }
            violation = violation.max(interval_distance(lo, hi));
        }
        if feasible && best.as_ref().is_none_or(|b| violation < b.violation) {
            best = Some(GridResult { x, violation });
        }
    }
    best.ok_or_else(|| Error::Oracle("no grid point lies in the domain".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_box_feasibility, quadratic_consensus_from_terms};

    #[test]
    fn two_quadratics_by_hand() {
        // (2 + 2)x = 2 + 6
        let q = Matrix::from_element(1, 1, 2.0);
        let spec = quadratic_consensus_from_terms(vec![
            (q.clone(), Vector::new(vec![2.0]).unwrap()),
            (q, Vector::new(vec![6.0]).unwrap()),
        ])
        .unwrap();
        assert_eq!(spec.n(), 3);
        assert!((linear_solve(&spec).unwrap()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_search_finds_box_intersection() {
        let spec = make_box_feasibility(&[
            (vec![0.0], vec![2.0]),
            (vec![1.0], vec![3.0]),
            (vec![f64::NEG_INFINITY], vec![f64::INFINITY]),
        ])
        .unwrap();
        let g = grid_search(&spec, 0.25, 4.0).unwrap();
        assert_eq!(g.violation, 0.0);
        assert!(g.x[0] >= 1.0 && g.x[0] <= 2.0);
        assert!(linear_solve(&spec).is_err());
    }
}
