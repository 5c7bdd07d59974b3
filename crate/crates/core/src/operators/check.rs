//! Sampled verification of the regularity properties operators declare.

use rand::Rng;
use serde::Serialize;

use super::{Forward, Regularity, Resolvent};
use crate::rng::{seeded, uniform_vector};

/// Absolute tolerance on inner-product inequalities.
pub const INEQUALITY_TOL: f64 = 1e-10;
/// Relative tolerance on measured Lipschitz ratios.
pub const LIPSCHITZ_REL_TOL: f64 = 1e-10;

const SAMPLE_RADIUS: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FneReport {
    pub samples: usize,
    /// Largest observed `-⟨J(u)-J(v), (u-J(u))-(v-J(v))⟩`, clipped at zero.
    pub max_violation: f64,
    pub pass: bool,
}

/// Checks firm nonexpansiveness of `J_{λA}` on seeded random pairs.
pub fn check_firm_nonexpansive(op: &dyn Resolvent, lambda: f64, samples: usize, seed: u64) -> FneReport {
    let mut rng = seeded(seed);
    let mut max_violation: f64 = 0.0;
    let mut ok = true;
    for _ in 0..samples {
        let radius = SAMPLE_RADIUS * rng.gen_range(0.1..=1.0);
        let u = uniform_vector(&mut rng, op.dim(), radius);
        let v = uniform_vector(&mut rng, op.dim(), radius);
        match (op.resolve(lambda, &u), op.resolve(lambda, &v)) {
            (Ok(ju), Ok(jv)) => {
                let lhs = ju.sub(&jv).dot(&u.sub(&ju).sub(&v.sub(&jv)));
                max_violation = max_violation.max(-lhs);
            }
            _ => ok = false,
        }
    }
    FneReport {
        samples,
        max_violation,
        pass: ok && max_violation <= INEQUALITY_TOL,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub samples: usize,
    /// Largest `‖B(x)-B(y)‖ / ‖x-y‖`.
    pub max_lipschitz_ratio: f64,
    /// Smallest `⟨B(x)-B(y), x-y⟩`.
    pub min_monotone_gap: f64,
    /// Smallest `⟨B(x)-B(y), x-y⟩ - (1/L)‖B(x)-B(y)‖²`; only for cocoercive declarations.
    pub min_cocoercive_gap: Option<f64>,
    pub lipschitz_pass: bool,
    pub monotone_pass: bool,
    pub cocoercive_pass: bool,
}

impl RegularityReport {
    pub fn passes(&self) -> bool {
        self.lipschitz_pass && self.monotone_pass && self.cocoercive_pass
    }
}

/// Samples pairs and checks the declared Lipschitz constant, monotonicity and,
/// for cocoercive declarations, the cocoercivity inequality.
pub fn check_forward(op: &dyn Forward, samples: usize, seed: u64) -> RegularityReport {
    let mut rng = seeded(seed);
    let l = op.lipschitz();
    let mut max_ratio: f64 = 0.0;
    let mut min_mono = f64::INFINITY;
    let mut min_coco = f64::INFINITY;
    let mut evaluated = true;
    for _ in 0..samples {
        let x = uniform_vector(&mut rng, op.dim(), SAMPLE_RADIUS);
        let y = uniform_vector(&mut rng, op.dim(), SAMPLE_RADIUS);
        let (bx, by) = match (op.eval(&x), op.eval(&y)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                evaluated = false;
                continue;
            }
        };
        let db = bx.sub(&by);
        let dx = x.sub(&y);
        let dx_norm = dx.norm();
        if dx_norm > 0.0 {
            max_ratio = max_ratio.max(db.norm() / dx_norm);
        }
        let inner = db.dot(&dx);
        min_mono = min_mono.min(inner);
        if l > 0.0 {
            min_coco = min_coco.min(inner - db.norm_sq() / l);
        } else {
            min_coco = min_coco.min(-db.norm_sq());
        }
    }
    let cocoercive = op.regularity() == Regularity::Cocoercive;
    RegularityReport {
        samples,
        max_lipschitz_ratio: max_ratio,
        min_monotone_gap: min_mono,
        min_cocoercive_gap: cocoercive.then_some(min_coco),
        lipschitz_pass: evaluated && max_ratio <= l * (1.0 + LIPSCHITZ_REL_TOL) + f64::MIN_POSITIVE,
        monotone_pass: evaluated && min_mono >= -INEQUALITY_TOL,
        cocoercive_pass: evaluated && (!cocoercive || min_coco >= -INEQUALITY_TOL),
    }
}
