use super::oracle::linear_solve;
use super::spec::{OracleSpec, ProblemSpec};
use crate::error::{Error, Result};
use crate::operators::linalg::{certified, mat_vec, matrix_from_rows, spectral_norm};
use crate::operators::{Forward, ForwardKind, ForwardOp, Matrix, Regularity, Resolvent, ResolventOp, Vector};
use crate::rng::{seeded, uniform_matrix, uniform_vector, SeededRng};
use crate::splitting::Mode;

/// Samples per operator used by builders to check declared regularity.
pub const BUILDER_CHECK_SAMPLES: usize = 32;

fn symmetrize(a: Matrix) -> Matrix {
    (&a + a.transpose()) * 0.5
}

/// `GᵀG/d + shift·I` with `G` uniform in `[-1, 1]`.
fn random_psd(rng: &mut SeededRng, d: usize, shift: f64) -> Matrix {
    let g = matrix_from_rows(&uniform_matrix(rng, d, d, 1.0)).expect("nonempty");
    symmetrize(g.transpose() * &g / d as f64) + Matrix::identity(d, d) * shift
}

fn random_skew(rng: &mut SeededRng, d: usize) -> Matrix {
    let g = matrix_from_rows(&uniform_matrix(rng, d, d, 1.0)).expect("nonempty");
    (&g - g.transpose()) * 0.5
}

fn checked(spec: ProblemSpec, seed: u64) -> Result<ProblemSpec> {
    spec.verify_regularity(BUILDER_CHECK_SAMPLES, seed)?;
    Ok(spec)
}

/// `min Σ_i ½xᵀQ_ix - c_iᵀx` split over `n - 1` quadratic terms, one per
/// forward operator, with every `A_i = 0`. The solution solves
/// `(ΣQ_i)x = Σc_i`.
pub fn quadratic_consensus_from_terms(terms: Vec<(Matrix, Vector)>) -> Result<ProblemSpec> {
    let Some((_, c0)) = terms.first() else {
        return Err(Error::InvalidProblem("need at least one quadratic term".into()));
    };
    let d = c0.dim();
    let n = terms.len() + 1;
    let forwards = terms
        .into_iter()
        .map(|(q, c)| ForwardOp::quad_gradient(q, c))
        .collect::<Result<Vec<_>>>()?;
    let mut spec = ProblemSpec::from_ops(
        "quadratic_consensus",
        Mode::Cocoercive,
        &vec![ResolventOp::zero(d); n],
        &forwards,
        None,
        Some(OracleSpec::LinearSolve),
    )?;
    spec.known_solution = Some(linear_solve(&spec)?);
    checked(spec, 0x5eed)
}

/// Seeded instance with `n - 1` strongly convex quadratics on `ℝ^d`.
pub fn make_quadratic_consensus(n: usize, d: usize, seed: u64) -> Result<ProblemSpec> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidProblem(format!("quadratic consensus needs n ≥ 2 and d ≥ 1, got n = {n}, d = {d}")));
    }
    let mut rng = seeded(seed);
    let terms = (0..n - 1)
        .map(|_| {
            let q = random_psd(&mut rng, d, 0.1);
            let c = uniform_vector(&mut rng, d, 1.0);
            (q, c)
        })
        .collect();
    quadratic_consensus_from_terms(terms)
}

/// `H = ℝ²`, `n = 3`, all `A_i = 0`, `B_1` the rotation by a quarter turn.
/// Forward-backward diverges on it; the reflected variant converges to the
/// origin.
pub fn make_rotation_counterexample() -> ProblemSpec {
    let k = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let b = ForwardOp::new(ForwardKind::SkewMap { k }, Regularity::LipschitzMonotone, 1.0, 2).expect("rotation is valid");
    let spec = ProblemSpec::from_ops(
        "rotation",
        Mode::Lipschitz,
        &vec![ResolventOp::zero(2); 3],
        &[b],
        Some(Vector::zeros(2)),
        Some(OracleSpec::LinearSolve),
    )
    .expect("rotation is valid");
    checked(spec, 0x5eed).expect("rotation passes its checks")
}

/// Feasibility over boxes: `A_i` is the normal cone of box `i`, all forward
/// operators are zero. Bounds may be infinite.
pub fn make_box_feasibility(boxes: &[(Vec<f64>, Vec<f64>)]) -> Result<ProblemSpec> {
    if boxes.len() < 2 {
        return Err(Error::InvalidProblem("box feasibility needs at least two boxes".into()));
    }
    let resolvents = boxes
        .iter()
        .map(|(l, u)| ResolventOp::boxed(l.clone(), u.clone()))
        .collect::<Result<Vec<_>>>()?;
    let d = resolvents[0].dim();
    let oracle = (d <= 2).then_some(OracleSpec::GridSearch { step: 0.01, radius: 10.0 });
    let spec = ProblemSpec::from_ops(
        "box_feasibility",
        Mode::Cocoercive,
        &resolvents,
        &vec![ForwardOp::zero(d); boxes.len() - 1],
        None,
        oracle,
    )?;
    checked(spec, 0x5eed)
}

/// Unconstrained saddle point of `Φ(x, y) = xᵀPy` on `ℝ^{d₁+d₂}`, whose
/// unique saddle for nonsingular square `P` is the origin. Lipschitz mode with
/// `n = 3` and a single forward operator.
pub fn make_bilinear_saddle(p: Matrix) -> Result<ProblemSpec> {
    if p.amax() == 0.0 {
        return Err(Error::InvalidProblem("bilinear coupling P must be nonzero".into()));
    }
    let dim = p.nrows() + p.ncols();
    let bound = certified(spectral_norm(&p));
    let b = ForwardOp::saddle(p, bound)?;
    let spec = ProblemSpec::from_ops(
        "bilinear_saddle",
        Mode::Lipschitz,
        &vec![ResolventOp::zero(dim); 3],
        &[b],
        Some(Vector::zeros(dim)),
        Some(OracleSpec::LinearSolve),
    )?;
    checked(spec, 0x5eed)
}

pub fn make_random_saddle(d1: usize, d2: usize, seed: u64) -> Result<ProblemSpec> {
    let mut rng = seeded(seed);
    make_bilinear_saddle(matrix_from_rows(&uniform_matrix(&mut rng, d1, d2, 1.0))?)
}

/// A problem with a known solution `x⋆` and certificate `v_i ∈ A_i(x⋆)`
/// satisfying `Σv_i + ΣB_i(x⋆) = 0`.
#[derive(Clone, Debug)]
pub struct Certified {
    pub spec: ProblemSpec,
    pub x_star: Vector,
    pub v: Vec<Vector>,
}

/// Seeded instance with a planted solution. `A_1..A_{n-1}` cycle through an
/// affine map, a scaled `ℓ₁` subdifferential, a box normal cone with `x⋆`
/// inside, and a weighted absolute-value subdifferential; `A_n` is a strongly
/// monotone affine map chosen to close the certificate, which makes `x⋆` the
/// unique solution. Forward operators follow the mode: gradients of convex
/// quadratics when cocoercive, monotone affine maps with a skew part when
/// Lipschitz, and in mixed mode every second operator is of the Lipschitz
/// kind, the last one always cocoercive.
pub fn make_certified(mode: Mode, n: usize, d: usize, seed: u64) -> Result<Certified> {
    planted(mode, n, d, seed, true)
}

/// As [`make_certified`] but every `A_i` is affine, so the solution is also
/// available from the linear-solve oracle.
pub fn make_affine_certified(mode: Mode, n: usize, d: usize, seed: u64) -> Result<Certified> {
    planted(mode, n, d, seed, false)
}

fn lipschitz_affine(rng: &mut SeededRng, d: usize) -> Result<ForwardOp> {
    let m = random_psd(rng, d, 0.0) * 0.2 + random_skew(rng, d);
    let c = uniform_vector(rng, d, 1.0);
    let l = certified(spectral_norm(&m));
    ForwardOp::affine(m, c, Regularity::LipschitzMonotone, l)
}

fn planted(mode: Mode, n: usize, d: usize, seed: u64, nonsmooth: bool) -> Result<Certified> {
    if n < mode.min_operators() || d < 1 {
        return Err(Error::InvalidProblem(format!("{mode} instance needs n ≥ {} and d ≥ 1", mode.min_operators())));
    }
    let mut rng = seeded(seed);
    let x_star = Vector::from_fn(d, |_| {
        let u = rng_value(&mut rng);
        // keep coordinates away from zero so the ℓ₁ subgradient is a singleton
        if u >= 0.0 {
            0.25 + u
        } else {
            u - 0.25
        }
    });

    let m = mode.forward_count(n);
    let forwards = (1..=m)
        .map(|j| {
            let lipschitz_kind = match mode {
                Mode::Cocoercive => false,
                Mode::Lipschitz => true,
                Mode::Mixed => j % 2 == 0 && j < m,
            };
            if lipschitz_kind {
                lipschitz_affine(&mut rng, d)
            } else {
                let q = random_psd(&mut rng, d, 0.1);
                ForwardOp::quad_gradient(q, uniform_vector(&mut rng, d, 1.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut resolvents = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let slot = if nonsmooth { i % 4 } else { 0 };
        match slot {
            0 => {
                let q = random_psd(&mut rng, d, 0.0);
                let c = uniform_vector(&mut rng, d, 1.0);
                v.push(mat_vec(&q, &x_star).sub(&c));
                resolvents.push(ResolventOp::affine(q, c)?);
            }
            1 => {
                let w = 0.5 + rng_value(&mut rng).abs();
                v.push(x_star.map(|x| w * x.signum()));
                resolvents.push(ResolventOp::l1(d, w)?);
            }
            2 => {
                let lower = x_star.iter().map(|x| x - 1.0 - rng_value(&mut rng).abs()).collect();
                let upper = x_star.iter().map(|x| x + 1.0 + rng_value(&mut rng).abs()).collect();
                v.push(Vector::zeros(d));
                resolvents.push(ResolventOp::boxed(lower, upper)?);
            }
            _ => {
                let weights: Vec<f64> = (0..d).map(|_| 0.1 + rng_value(&mut rng).abs()).collect();
                v.push(Vector::from_fn(d, |j| weights[j] * x_star[j].signum()));
                resolvents.push(ResolventOp::abs_sum(weights)?);
            }
        }
    }
    let mut residual = Vector::zeros(d);
    for vi in &v {
        residual = residual.add(vi);
    }
    for b in &forwards {
        residual = residual.add(&b.eval(&x_star)?);
    }
    let q_last = random_psd(&mut rng, d, 0.5);
    // A_n(x⋆) = Q x⋆ - c = -residual
    let c_last = mat_vec(&q_last, &x_star).add(&residual);
    v.push(mat_vec(&q_last, &x_star).sub(&c_last));
    resolvents.push(ResolventOp::affine(q_last, c_last)?);

    let oracle = (!nonsmooth).then_some(OracleSpec::LinearSolve);
    let name = if nonsmooth { "certified" } else { "affine_certified" };
    let spec = ProblemSpec::from_ops(name, mode, &resolvents, &forwards, Some(x_star.clone()), oracle)?;
    let spec = checked(spec, seed ^ 0x5eed)?;
    Ok(Certified { spec, x_star, v })
}

fn rng_value(rng: &mut SeededRng) -> f64 {
    uniform_vector(rng, 1, 1.0)[0]
}

/// Names accepted by [`builtin`].
pub const BUILTINS: &[&str] = &[
    "quadratic_consensus",
    "rotation",
    "box_feasibility",
    "bilinear_saddle",
    "certified",
    "affine_certified",
];

/// Built-in instances by name. `n`, `dim` and `seed` apply where the instance
/// is parametrised; `mode` only selects the variant of the certified
/// instances.
pub fn builtin(name: &str, n: usize, dim: usize, seed: u64, mode: Mode) -> Result<ProblemSpec> {
    match name {
        "quadratic_consensus" => make_quadratic_consensus(n, dim, seed),
        "rotation" => Ok(make_rotation_counterexample()),
        "box_feasibility" => make_box_feasibility(&[
            (vec![0.0], vec![2.0]),
            (vec![1.0], vec![3.0]),
            (vec![f64::NEG_INFINITY], vec![f64::INFINITY]),
        ]),
        "bilinear_saddle" => make_random_saddle(dim, dim, seed),
        "certified" => make_certified(mode, n, dim, seed).map(|c| c.spec),
        "affine_certified" => make_affine_certified(mode, n, dim, seed).map(|c| c.spec),
        other => Err(Error::InvalidProblem(format!(
            "unknown builtin '{other}', expected one of {}",
            BUILTINS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::linear_solve;
    use crate::splitting::{build_fixed_point, StepParams};

    #[test]
    fn zero_offsets_give_zero_solution() {
        let mut rng = seeded(3);
        let terms = (0..3).map(|_| (random_psd(&mut rng, 4, 0.1), Vector::zeros(4))).collect();
        let spec = quadratic_consensus_from_terms(terms).unwrap();
        assert!(spec.known_solution.unwrap().norm() < 1e-15);
    }

    #[test]
    fn rotation_is_unit_isometry() {
        let spec = make_rotation_counterexample();
        assert_eq!(spec.forwards[0].lipschitz, 1.0);
        assert_eq!(spec.known_solution, Some(Vector::zeros(2)));
        let b = &spec.forward_ops().unwrap()[0];
        let x = Vector::new(vec![0.3, -1.7]).unwrap();
        assert_eq!(b.eval(&x).unwrap().dot(&x), 0.0);
        assert_eq!(b.eval(&x).unwrap().norm(), x.norm());
    }

    #[test]
    fn saddle_requires_nonzero_coupling() {
        assert!(make_bilinear_saddle(Matrix::zeros(2, 2)).is_err());
        let spec = make_bilinear_saddle(Matrix::from_element(1, 1, 1.0)).unwrap();
        assert_eq!(linear_solve(&spec).unwrap(), Vector::zeros(2));
    }

    #[test]
    fn certificates_close_for_every_mode() {
        for mode in [Mode::Cocoercive, Mode::Lipschitz, Mode::Mixed] {
            for n in [3, 4, 6] {
                let c = make_certified(mode, n, 3, 11).unwrap();
                let p = c.spec.build().unwrap();
                let params = StepParams::defaults(&p);
                build_fixed_point(&p, &params, &c.x_star, &c.v).unwrap();
                let a = make_affine_certified(mode, n, 3, 11).unwrap();
                assert!(linear_solve(&a.spec).unwrap().dist(&a.x_star) < 1e-10);
            }
        }
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let err = builtin("nope", 3, 2, 0, Mode::Cocoercive).unwrap_err().to_string();
        assert!(err.contains("quadratic_consensus"));
    }
}
