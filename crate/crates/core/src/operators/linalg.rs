//! Small dense-matrix helpers on top of `nalgebra`.

use nalgebra::DMatrix;

use super::Vector;
use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Relative inflation applied to power-iteration estimates so the declared
/// constant is an upper bound.
pub const LIPSCHITZ_INFLATION: f64 = 1e-8;

const POWER_REL_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 10_000;

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::InvalidOperator("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidOperator("ragged matrix rows".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// `M x`, accumulated row by row in column order.
pub fn mat_vec(m: &Matrix, x: &Vector) -> Vector {
    assert_eq!(m.ncols(), x.dim(), "matrix/vector dimension mismatch");
    Vector::from_fn(m.nrows(), |i| {
        let mut acc = 0.0;
        for j in 0..m.ncols() {
            acc += m[(i, j)] * x[j];
        }
        acc
    })
}

/// `Mᵀ x`.
pub fn mat_t_vec(m: &Matrix, x: &Vector) -> Vector {
    assert_eq!(m.nrows(), x.dim(), "matrix/vector dimension mismatch");
    Vector::from_fn(m.ncols(), |j| {
        let mut acc = 0.0;
        for i in 0..m.nrows() {
            acc += m[(i, j)] * x[i];
        }
        acc
    })
}

pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

pub fn is_skew(m: &Matrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..=i).all(|j| (m[(i, j)] + m[(j, i)]).abs() <= tol))
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration on the Rayleigh quotient. Stops on a relative change below
/// `1e-12`.
pub fn psd_lambda_max(a: &Matrix) -> f64 {
    assert!(a.is_square());
    let n = a.nrows();
    // Deterministic start with distinct entries so it is not orthogonal to
    // structured eigenvectors.
    let mut v = Vector::from_fn(n, |i| 1.0 + 0.1 * ((i as f64 + 1.0).sqrt()));
    v = v.scale(1.0 / v.norm());
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = mat_vec(a, &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next_mu = v.dot(&w);
        v = w.scale(1.0 / norm);
        if (next_mu - mu).abs() <= POWER_REL_TOL * next_mu.abs() {
            return next_mu.max(norm);
        }
        mu = next_mu;
    }
    mu
}

/// Spectral norm `‖M‖₂` estimated as `sqrt(λ_max(MᵀM))`.
pub fn spectral_norm(m: &Matrix) -> f64 {
    psd_lambda_max(&(m.transpose() * m)).sqrt()
}

/// Inflates an estimate so it can be declared as an upper bound.
pub fn certified(estimate: f64) -> f64 {
    estimate * (1.0 + LIPSCHITZ_INFLATION)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_matches_symmetric_eigen() {
        let mut rng = crate::rng::seeded(3);
        for d in 1..7 {
            let g = matrix_from_rows(&crate::rng::uniform_matrix(&mut rng, d, d, 1.0)).unwrap();
            let q = g.transpose() * &g + Matrix::identity(d, d) * 0.1;
            let exact = q.clone().symmetric_eigen().eigenvalues.max();
            let est = psd_lambda_max(&q);
            assert!((est - exact).abs() <= 1e-9 * exact, "{est} vs {exact}");
            assert!(certified(est) >= exact);
        }
    }

    #[test]
    fn rotation_has_unit_norm() {
        let k = matrix_from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert!((spectral_norm(&k) - 1.0).abs() < 1e-14);
        assert!(is_skew(&k, 0.0));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matrix_from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
