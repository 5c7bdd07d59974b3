use std::fmt;

use super::linalg::{is_symmetric, mat_vec, Matrix};
use super::Vector;
use crate::error::{Error, Result};

/// A maximally monotone operator `A`, known through its resolvent
/// `J_{λA} = (Id + λA)^{-1}`.
pub trait Resolvent: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Returns the unique `v` with `u - v ∈ λ A(v)`.
    fn resolve(&self, lambda: f64, u: &Vector) -> Result<Vector>;
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResolventKind {
    /// `A = 0`; the resolvent is the identity for every `λ`.
    Zero,
    /// `A = ∂(w‖·‖₁)`, soft thresholding at `λw`.
    L1Prox { weight: f64 },
    /// Normal cone of a box; bounds may be infinite.
    BoxProjection { lower: Vec<f64>, upper: Vec<f64> },
    /// Normal cone of `{x : ⟨a, x⟩ ≤ β}`.
    HalfspaceProjection { normal: Vector, offset: f64 },
    /// `A(x) = Qx - c` with `Q` symmetric positive semidefinite.
    AffineResolvent { q: Matrix, c: Vector },
    /// `A = ∂(Σ_j w_j |x_j|)` with per-coordinate weights.
    SubdiffAbsSum { weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventOp {
    kind: ResolventKind,
    dim: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidOperator(msg.into())
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl ResolventOp {
    pub fn new(kind: ResolventKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let check_len = |len: usize, what: &str| {
            if len == dim {
                Ok(())
            } else {
                Err(invalid(format!("{what} has length {len}, expected {dim}")))
            }
        };
        match &kind {
            ResolventKind::Zero => {}
            ResolventKind::L1Prox { weight } => {
                if !(weight.is_finite() && *weight >= 0.0) {
                    return Err(invalid("l1 weight must be finite and nonnegative"));
                }
            }
            ResolventKind::BoxProjection { lower, upper } => {
                check_len(lower.len(), "box lower bound")?;
                check_len(upper.len(), "box upper bound")?;
                for (l, u) in lower.iter().zip(upper) {
                    if l.is_nan() || u.is_nan() || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                        return Err(invalid("box bounds must not be NaN or empty"));
                    }
                    if l > u {
                        return Err(invalid(format!("box bound {l} exceeds {u}")));
                    }
                }
            }
            ResolventKind::HalfspaceProjection { normal, offset } => {
                check_len(normal.dim(), "halfspace normal")?;
                if normal.norm_sq() == 0.0 {
                    return Err(invalid("halfspace normal must be nonzero"));
                }
                if !offset.is_finite() {
                    return Err(Error::NonFinite("halfspace offset"));
                }
            }
            ResolventKind::AffineResolvent { q, c } => {
                if q.nrows() != dim || q.ncols() != dim {
                    return Err(invalid(format!(
                        "affine resolvent matrix is {}x{}, expected {dim}x{dim}",
                        q.nrows(),
                        q.ncols()
                    )));
                }
                check_len(c.dim(), "affine resolvent offset")?;
                let scale = q.amax().max(1.0);
                if !is_symmetric(q, 1e-12 * scale) {
                    return Err(invalid("affine resolvent matrix must be symmetric"));
                }
                let min_eig = q.clone().symmetric_eigen().eigenvalues.min();
                if min_eig < -1e-10 * scale {
                    return Err(invalid(format!(
                        "affine resolvent matrix is not positive semidefinite (eigenvalue {min_eig:e})"
                    )));
                }
            }
            ResolventKind::SubdiffAbsSum { weights } => {
                check_len(weights.len(), "abs-sum weights")?;
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(invalid("abs-sum weights must be finite and nonnegative"));
                }
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(ResolventKind::Zero, dim).expect("zero operator is always valid")
    }

    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        Self::new(ResolventKind::L1Prox { weight }, dim)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        Self::new(ResolventKind::BoxProjection { lower, upper }, dim)
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let dim = normal.dim();
        Self::new(ResolventKind::HalfspaceProjection { normal, offset }, dim)
    }

    pub fn affine(q: Matrix, c: Vector) -> Result<Self> {
        let dim = c.dim();
        Self::new(ResolventKind::AffineResolvent { q, c }, dim)
    }

    pub fn abs_sum(weights: Vec<f64>) -> Result<Self> {
        let dim = weights.len();
        Self::new(ResolventKind::SubdiffAbsSum { weights }, dim)
    }

    pub fn kind(&self) -> &ResolventKind {
        &self.kind
    }

    /// Coordinate `j` of `A(x)` as a closed interval, for operators whose value
    /// set is a product of intervals. `None` when `x ∉ dom A` or the operator
    /// is not of product form (the halfspace cone).
    pub fn value_interval(&self, x: &Vector, j: usize) -> Option<(f64, f64)> {
        let sign_interval = |v: f64, w: f64| {
            if v > 0.0 {
                (w, w)
            } else if v < 0.0 {
                (-w, -w)
            } else {
                (-w, w)
            }
        };
        match &self.kind {
            ResolventKind::Zero => Some((0.0, 0.0)),
            ResolventKind::L1Prox { weight } => Some(sign_interval(x[j], *weight)),
            ResolventKind::SubdiffAbsSum { weights } => Some(sign_interval(x[j], weights[j])),
            ResolventKind::BoxProjection { lower, upper } => {
                let (l, u, v) = (lower[j], upper[j], x[j]);
                if v < l || v > u {
                    None
                } else {
                    let lo = if v == l { f64::NEG_INFINITY } else { 0.0 };
                    let hi = if v == u { f64::INFINITY } else { 0.0 };
                    Some((lo, hi))
                }
            }
            ResolventKind::AffineResolvent { q, c } => {
                let mut acc = 0.0;
                for k in 0..self.dim {
                    acc += q[(j, k)] * x[k];
                }
                let v = acc - c[j];
                Some((v, v))
            }
            ResolventKind::HalfspaceProjection { .. } => None,
        }
    }
}

impl Resolvent for ResolventOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn resolve(&self, lambda: f64, u: &Vector) -> Result<Vector> {
        u.ensure_dim(self.dim)?;
        u.ensure_finite("resolvent input")?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid(format!("resolvent parameter must be positive, got {lambda}")));
        }
        let out = match &self.kind {
            ResolventKind::Zero => u.clone(),
            ResolventKind::L1Prox { weight } => {
                let t = lambda * weight;
                u.map(|v| soft_threshold(v, t))
            }
            ResolventKind::SubdiffAbsSum { weights } => {
                Vector::from_fn(self.dim, |j| soft_threshold(u[j], lambda * weights[j]))
            }
            ResolventKind::BoxProjection { lower, upper } => {
                Vector::from_fn(self.dim, |j| u[j].clamp(lower[j], upper[j]))
            }
            ResolventKind::HalfspaceProjection { normal, offset } => {
                let excess = normal.dot(u) - offset;
                if excess <= 0.0 {
                    u.clone()
                } else {
                    u.sub(&normal.scale(excess / normal.norm_sq()))
                }
            }
            ResolventKind::AffineResolvent { q, c } => {
                // (I + λQ) v = u + λc
                let system = Matrix::identity(self.dim, self.dim) + q * lambda;
                let rhs = nalgebra::DVector::from_iterator(
                    self.dim,
                    u.iter().zip(c.iter()).map(|(a, b)| a + lambda * b),
                );
                let chol = system
                    .cholesky()
                    .ok_or_else(|| invalid("I + λQ is not positive definite"))?;
                let v = chol.solve(&rhs);
                Vector::from_fn(self.dim, |j| v[j])
            }
        };
        out.ensure_finite("resolvent output")?;
        Ok(out)
    }
}

/// `A(x)` for single-valued resolvent kinds, used by certificate builders.
pub fn affine_value(op: &ResolventOp, x: &Vector) -> Option<Vector> {
    match op.kind() {
        ResolventKind::Zero => Some(Vector::zeros(x.dim())),
        ResolventKind::AffineResolvent { q, c } => Some(mat_vec(q, x).sub(c)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn zero_is_identity() {
        let op = ResolventOp::zero(2);
        assert_eq!(op.resolve(0.7, &v(&[3.0, -1.0])).unwrap(), v(&[3.0, -1.0]));
    }

    #[test]
    fn l1_matches_grid_minimiser() {
        // argmin |x| + (x - 3)^2 / 2 over a fine grid
        let mut best = (f64::INFINITY, 0.0);
        for k in -60_000..=60_000 {
            let x = k as f64 * 1e-4;
            let f = x.abs() + (x - 3.0) * (x - 3.0) / 2.0;
            if f < best.0 {
                best = (f, x);
            }
        }
        assert!((best.1 - 2.0).abs() < 1e-4);
        let op = ResolventOp::l1(1, 1.0).unwrap();
        assert_eq!(op.resolve(1.0, &v(&[3.0])).unwrap(), v(&[2.0]));
    }

    #[test]
    fn box_projection_ignores_lambda() {
        let op = ResolventOp::boxed(vec![0.0], vec![2.0]).unwrap();
        assert_eq!(op.resolve(5.0, &v(&[-1.0])).unwrap(), v(&[0.0]));
        assert_eq!(op.resolve(0.1, &v(&[2.0])).unwrap(), v(&[2.0]));
        let line = ResolventOp::boxed(vec![f64::NEG_INFINITY], vec![f64::INFINITY]).unwrap();
        assert_eq!(line.resolve(1.0, &v(&[-7.5])).unwrap(), v(&[-7.5]));
    }

    #[test]
    fn affine_solves_linear_system() {
        let q = Matrix::from_row_slice(1, 1, &[2.0]);
        let op = ResolventOp::affine(q, v(&[0.0])).unwrap();
        let out = op.resolve(1.0, &v(&[3.0])).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn halfspace_projection() {
        let op = ResolventOp::halfspace(v(&[1.0, 1.0]), 1.0).unwrap();
        let p = op.resolve(1.0, &v(&[2.0, 2.0])).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert_eq!(op.resolve(1.0, &v(&[0.0, 0.0])).unwrap(), v(&[0.0, 0.0]));
    }

    #[test]
    fn errors() {
        let op = ResolventOp::zero(2);
        assert_eq!(
            op.resolve(1.0, &v(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        );
        assert!(op.resolve(0.0, &v(&[1.0, 1.0])).is_err());
        assert!(ResolventOp::boxed(vec![1.0], vec![0.0]).is_err());
        let not_psd = Matrix::from_row_slice(1, 1, &[-1.0]);
        assert!(ResolventOp::affine(not_psd, v(&[0.0])).is_err());
        assert!(ResolventOp::halfspace(v(&[0.0]), 1.0).is_err());
    }

    #[test]
    fn box_value_intervals() {
        let op = ResolventOp::boxed(vec![0.0], vec![2.0]).unwrap();
        assert_eq!(op.value_interval(&v(&[1.0]), 0), Some((0.0, 0.0)));
        assert_eq!(op.value_interval(&v(&[0.0]), 0), Some((f64::NEG_INFINITY, 0.0)));
        assert_eq!(op.value_interval(&v(&[2.0]), 0), Some((0.0, f64::INFINITY)));
        assert_eq!(op.value_interval(&v(&[3.0]), 0), None);
    }
}
