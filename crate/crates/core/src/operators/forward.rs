use std::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::{certified, is_skew, is_symmetric, mat_t_vec, mat_vec, psd_lambda_max, spectral_norm, Matrix};
use super::Vector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    /// `⟨B(x)-B(y), x-y⟩ ≥ (1/L)‖B(x)-B(y)‖²`.
    Cocoercive,
    /// Monotone and `L`-Lipschitz.
    LipschitzMonotone,
}

/// A single-valued operator `B` evaluated directly (a forward step).
pub trait Forward: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn regularity(&self) -> Regularity;
    /// Declared constant `L` (cocoercivity `1/L` or Lipschitz `L`).
    fn lipschitz(&self) -> f64;
    fn eval(&self, x: &Vector) -> Result<Vector>;
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForwardKind {
    ZeroMap,
    /// `x ↦ Mx + c`.
    AffineMap { m: Matrix, c: Vector },
    /// Gradient of `½xᵀQx - cᵀx`, i.e. `x ↦ Qx - c`.
    QuadGradient { q: Matrix, c: Vector },
    /// `x ↦ Kx` with `K` skew-symmetric.
    SkewMap { k: Matrix },
    /// `(x, y) ↦ (Py, -Pᵀx)`, the monotone operator of `Φ(x, y) = xᵀPy`.
    SaddleBilinear { p: Matrix },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardOp {
    kind: ForwardKind,
    regularity: Regularity,
    lipschitz: f64,
    dim: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidOperator(msg.into())
}

impl ForwardOp {
    pub fn new(kind: ForwardKind, regularity: Regularity, lipschitz: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(invalid(format!("Lipschitz constant must be finite and nonnegative, got {lipschitz}")));
        }
        let square = |m: &Matrix, what: &str| {
            if m.nrows() == dim && m.ncols() == dim {
                Ok(())
            } else {
                Err(invalid(format!("{what} is {}x{}, expected {dim}x{dim}", m.nrows(), m.ncols())))
            }
        };
        let offset = |c: &Vector| c.ensure_dim(dim);
        let is_zero = match &kind {
            ForwardKind::ZeroMap => true,
            ForwardKind::AffineMap { m, c } => {
                square(m, "affine map matrix")?;
                offset(c)?;
                m.amax() == 0.0
            }
            ForwardKind::QuadGradient { q, c } => {
                square(q, "quadratic matrix")?;
                offset(c)?;
                if !is_symmetric(q, 1e-12 * q.amax().max(1.0)) {
                    return Err(invalid("quadratic matrix must be symmetric"));
                }
                q.amax() == 0.0
            }
            ForwardKind::SkewMap { k } => {
                square(k, "skew matrix")?;
                if !is_skew(k, 0.0) {
                    return Err(invalid("skew map matrix must satisfy K = -Kᵀ"));
                }
                if regularity == Regularity::Cocoercive && k.amax() != 0.0 {
                    return Err(invalid("a nonzero skew map is not cocoercive"));
                }
                k.amax() == 0.0
            }
            ForwardKind::SaddleBilinear { p } => {
                if p.nrows() + p.ncols() != dim {
                    return Err(invalid(format!(
                        "bilinear coupling {}x{} does not match dimension {dim}",
                        p.nrows(),
                        p.ncols()
                    )));
                }
                if regularity == Regularity::Cocoercive && p.amax() != 0.0 {
                    return Err(invalid("a nonzero bilinear saddle operator is not cocoercive"));
                }
                p.amax() == 0.0
            }
        };
        if lipschitz == 0.0 && !is_zero {
            return Err(invalid("L = 0 is only allowed for the zero map"));
        }
        Ok(Self {
            kind,
            regularity,
            lipschitz,
            dim,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(ForwardKind::ZeroMap, Regularity::Cocoercive, 0.0, dim).expect("zero map is valid")
    }

    /// Gradient of a convex quadratic. `L` is the certified largest
    /// eigenvalue of `Q`, which is also its cocoercivity constant.
    pub fn quad_gradient(q: Matrix, c: Vector) -> Result<Self> {
        let dim = c.dim();
        let lipschitz = if q.amax() == 0.0 { 0.0 } else { certified(psd_lambda_max(&q)) };
        Self::new(ForwardKind::QuadGradient { q, c }, Regularity::Cocoercive, lipschitz, dim)
    }

    pub fn skew(k: Matrix) -> Result<Self> {
        let dim = k.nrows();
        let lipschitz = if k.amax() == 0.0 { 0.0 } else { certified(spectral_norm(&k)) };
        Self::new(ForwardKind::SkewMap { k }, Regularity::LipschitzMonotone, lipschitz, dim)
    }

    /// `bound` must be at least `‖P‖₂`; it is declared, not computed.
    pub fn saddle(p: Matrix, bound: f64) -> Result<Self> {
        let dim = p.nrows() + p.ncols();
        Self::new(ForwardKind::SaddleBilinear { p }, Regularity::LipschitzMonotone, bound, dim)
    }

    pub fn affine(m: Matrix, c: Vector, regularity: Regularity, lipschitz: f64) -> Result<Self> {
        let dim = c.dim();
        Self::new(ForwardKind::AffineMap { m, c }, regularity, lipschitz, dim)
    }

    pub fn kind(&self) -> &ForwardKind {
        &self.kind
    }

    /// Linear part `M` and constant part `b` with `B(x) = Mx + b`.
    pub fn affine_parts(&self) -> (Matrix, Vector) {
        let d = self.dim;
        match &self.kind {
            ForwardKind::ZeroMap => (Matrix::zeros(d, d), Vector::zeros(d)),
            ForwardKind::AffineMap { m, c } => (m.clone(), c.clone()),
            ForwardKind::QuadGradient { q, c } => (q.clone(), c.scale(-1.0)),
            ForwardKind::SkewMap { k } => (k.clone(), Vector::zeros(d)),
            ForwardKind::SaddleBilinear { p } => {
                let (d1, d2) = (p.nrows(), p.ncols());
                let mut m = Matrix::zeros(d, d);
                m.view_mut((0, d1), (d1, d2)).copy_from(p);
                m.view_mut((d1, 0), (d2, d1)).copy_from(&(-p.transpose()));
                (m, Vector::zeros(d))
            }
        }
    }
}

impl Forward for ForwardOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn regularity(&self) -> Regularity {
        self.regularity
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn eval(&self, x: &Vector) -> Result<Vector> {
        x.ensure_dim(self.dim)?;
        x.ensure_finite("forward input")?;
        let out = match &self.kind {
            ForwardKind::ZeroMap => Vector::zeros(self.dim),
            ForwardKind::AffineMap { m, c } => mat_vec(m, x).add(c),
            ForwardKind::QuadGradient { q, c } => mat_vec(q, x).sub(c),
            ForwardKind::SkewMap { k } => mat_vec(k, x),
            ForwardKind::SaddleBilinear { p } => {
                let d1 = p.nrows();
                let xs = Vector::new(x.as_slice()[..d1].to_vec())?;
                let ys = Vector::new(x.as_slice()[d1..].to_vec())?;
                Vector::concat(&[&mat_vec(p, &ys), &mat_t_vec(p, &xs).scale(-1.0)])
            }
        };
        out.ensure_finite("forward output")?;
        Ok(out)
    }
}
