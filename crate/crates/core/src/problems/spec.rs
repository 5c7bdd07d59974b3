use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::linalg::{matrix_from_rows, matrix_rows};
use crate::operators::{
    check_firm_nonexpansive, check_forward, Forward, ForwardKind, ForwardOp, Regularity, Resolvent, ResolventKind, ResolventOp,
    Vector,
};
use crate::splitting::{Mode, ProblemInstance};

/// Serialized form of a resolvent operator; infinite box bounds are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ResolventDesc {
    Zero {},
    L1Prox { weight: f64 },
    BoxProjection { lower: Vec<Option<f64>>, upper: Vec<Option<f64>> },
    HalfspaceProjection { normal: Vector, offset: f64 },
    AffineResolvent { q: Vec<Vec<f64>>, c: Vector },
    SubdiffAbsSum { weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ForwardKindDesc {
    ZeroMap {},
    AffineMap { m: Vec<Vec<f64>>, c: Vector },
    QuadGradient { q: Vec<Vec<f64>>, c: Vector },
    SkewMap { k: Vec<Vec<f64>> },
    SaddleBilinear { p: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardDesc {
    #[serde(flatten)]
    pub op: ForwardKindDesc,
    pub regularity: Regularity,
    #[serde(rename = "L")]
    pub lipschitz: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    LinearSolve,
    GridSearch { step: f64, radius: f64 },
}

/// Declarative problem description; operators are listed in order
/// `A_1..A_n` and `B_1..B_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub mode: Mode,
    pub resolvents: Vec<ResolventDesc>,
    pub forwards: Vec<ForwardDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ResolventDesc {
    pub fn from_op(op: &ResolventOp) -> Self {
        match op.kind() {
            ResolventKind::Zero => Self::Zero {},
            ResolventKind::L1Prox { weight } => Self::L1Prox { weight: *weight },
            ResolventKind::BoxProjection { lower, upper } => Self::BoxProjection {
                lower: lower.iter().copied().map(finite_or_null).collect(),
                upper: upper.iter().copied().map(finite_or_null).collect(),
            },
            ResolventKind::HalfspaceProjection { normal, offset } => Self::HalfspaceProjection {
                normal: normal.clone(),
                offset: *offset,
            },
            ResolventKind::AffineResolvent { q, c } => Self::AffineResolvent {
                q: matrix_rows(q),
                c: c.clone(),
            },
            ResolventKind::SubdiffAbsSum { weights } => Self::SubdiffAbsSum { weights: weights.clone() },
        }
    }

    pub fn to_op(&self, dim: usize) -> Result<ResolventOp> {
        let kind = match self {
            Self::Zero {} => ResolventKind::Zero,
            Self::L1Prox { weight } => ResolventKind::L1Prox { weight: *weight },
            Self::BoxProjection { lower, upper } => ResolventKind::BoxProjection {
                lower: lower.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
                upper: upper.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
            },
            Self::HalfspaceProjection { normal, offset } => ResolventKind::HalfspaceProjection {
                normal: normal.clone(),
                offset: *offset,
            },
            Self::AffineResolvent { q, c } => ResolventKind::AffineResolvent {
                q: matrix_from_rows(q)?,
                c: c.clone(),
            },
            Self::SubdiffAbsSum { weights } => ResolventKind::SubdiffAbsSum { weights: weights.clone() },
        };
        ResolventOp::new(kind, dim)
    }
}

impl ForwardDesc {
    pub fn from_op(op: &ForwardOp) -> Self {
        let kind = match op.kind() {
            ForwardKind::ZeroMap => ForwardKindDesc::ZeroMap {},
            ForwardKind::AffineMap { m, c } => ForwardKindDesc::AffineMap {
                m: matrix_rows(m),
                c: c.clone(),
            },
            ForwardKind::QuadGradient { q, c } => ForwardKindDesc::QuadGradient {
                q: matrix_rows(q),
                c: c.clone(),
            },
            ForwardKind::SkewMap { k } => ForwardKindDesc::SkewMap { k: matrix_rows(k) },
            ForwardKind::SaddleBilinear { p } => ForwardKindDesc::SaddleBilinear { p: matrix_rows(p) },
        };
        Self {
            op: kind,
            regularity: op.regularity(),
            lipschitz: op.lipschitz(),
        }
    }

    pub fn to_op(&self, dim: usize) -> Result<ForwardOp> {
        let kind = match &self.op {
            ForwardKindDesc::ZeroMap {} => ForwardKind::ZeroMap,
            ForwardKindDesc::AffineMap { m, c } => ForwardKind::AffineMap {
                m: matrix_from_rows(m)?,
                c: c.clone(),
            },
            ForwardKindDesc::QuadGradient { q, c } => ForwardKind::QuadGradient {
                q: matrix_from_rows(q)?,
                c: c.clone(),
            },
            ForwardKindDesc::SkewMap { k } => ForwardKind::SkewMap { k: matrix_from_rows(k)? },
            ForwardKindDesc::SaddleBilinear { p } => ForwardKind::SaddleBilinear { p: matrix_from_rows(p)? },
        };
        ForwardOp::new(kind, self.regularity, self.lipschitz, dim)
    }
}

impl ProblemSpec {
    pub fn from_ops(
        name: impl Into<String>,
        mode: Mode,
        resolvents: &[ResolventOp],
        forwards: &[ForwardOp],
        known_solution: Option<Vector>,
        oracle: Option<OracleSpec>,
    ) -> Result<Self> {
        let dim = resolvents
            .first()
            .map(|r| r.dim())
            .ok_or_else(|| Error::InvalidProblem("no resolvent operators".into()))?;
        let spec = Self {
            name: name.into(),
            dim,
            mode,
            resolvents: resolvents.iter().map(ResolventDesc::from_op).collect(),
            forwards: forwards.iter().map(ForwardDesc::from_op).collect(),
            known_solution,
            oracle,
        };
        spec.build()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.resolvents.len()
    }

    pub fn resolvent_ops(&self) -> Result<Vec<ResolventOp>> {
        self.resolvents.iter().map(|r| r.to_op(self.dim)).collect()
    }

    pub fn forward_ops(&self) -> Result<Vec<ForwardOp>> {
        self.forwards.iter().map(|f| f.to_op(self.dim)).collect()
    }

    /// Validates the description and assembles the operators.
    pub fn build(&self) -> Result<ProblemInstance> {
        if let Some(x) = &self.known_solution {
            x.ensure_dim(self.dim)?;
        }
        if let Some(OracleSpec::GridSearch { step, radius }) = self.oracle {
            if !(step > 0.0 && radius > 0.0 && step.is_finite() && radius.is_finite()) {
                return Err(Error::InvalidProblem("grid search needs positive finite step and radius".into()));
            }
        }
        let resolvents: Vec<Arc<dyn Resolvent>> = self
            .resolvent_ops()?
            .into_iter()
            .map(|r| Arc::new(r) as Arc<dyn Resolvent>)
            .collect();
        let forwards: Vec<Arc<dyn Forward>> = self
            .forward_ops()?
            .into_iter()
            .map(|f| Arc::new(f) as Arc<dyn Forward>)
            .collect();
        ProblemInstance::new(self.mode, resolvents, forwards)
    }

    /// Sampled regularity checks: every forward operator against its declared
    /// constant and every resolvent for firm nonexpansiveness.
    pub fn verify_regularity(&self, samples: usize, seed: u64) -> Result<()> {
        for (i, f) in self.forward_ops()?.iter().enumerate() {
            let report = check_forward(f, samples, seed.wrapping_add(i as u64));
            if !report.passes() {
                return Err(Error::InvalidOperator(format!("B_{} fails its regularity check: {report:?}", i + 1)));
            }
        }
        for (i, r) in self.resolvent_ops()?.iter().enumerate() {
            let report = check_firm_nonexpansive(r, 1.0, samples, seed.wrapping_add(1000 + i as u64));
            if !report.pass {
                return Err(Error::InvalidOperator(format!(
                    "resolvent of A_{} is not firmly nonexpansive: {report:?}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::InvalidProblem(format!("problem JSON: {e}")))?;
        spec.build()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_box_feasibility, make_certified, make_quadratic_consensus, make_rotation_counterexample};

    #[test]
    fn json_roundtrip_preserves_specs() {
        let specs = vec![
            make_quadratic_consensus(3, 2, 1).unwrap(),
            make_rotation_counterexample(),
            make_box_feasibility(&[(vec![0.0, f64::NEG_INFINITY], vec![1.0, 2.0]), (vec![-1.0, 0.0], vec![f64::INFINITY, 1.0])]).unwrap(),
            make_certified(Mode::Mixed, 5, 3, 9).unwrap().spec,
        ];
        for spec in specs {
            let text = spec.to_json();
            let back = ProblemSpec::from_json(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn infinite_bounds_are_null() {
        let spec = make_box_feasibility(&[(vec![f64::NEG_INFINITY], vec![1.0]), (vec![0.0], vec![f64::INFINITY])]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&spec.to_json()).unwrap();
        assert_eq!(v["resolvents"][0]["kind"], "box_projection");
        assert!(v["resolvents"][0]["params"]["lower"][0].is_null());
        assert!(v["resolvents"][1]["params"]["upper"][0].is_null());
        assert_eq!(v["forwards"][0]["L"], 0.0);
        assert_eq!(v["forwards"][0]["kind"], "zero_map");
    }

    #[test]
    fn malformed_specs_rejected() {
        let mut spec = make_rotation_counterexample();
        spec.known_solution = Some(Vector::zeros(3));
        assert!(spec.build().is_err());
        let mut spec = make_rotation_counterexample();
        spec.forwards.push(spec.forwards[0].clone());
        assert!(matches!(spec.build(), Err(Error::InvalidProblem(_))));
        assert!(ProblemSpec::from_json("{\"name\": 1}").is_err());
    }
}
