use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Forward, ForwardOp, Regularity, Resolvent, ResolventOp};

/// Which fixed-point operator drives the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Forward-backward sweep, `n - 1` cocoercive forwards.
    Cocoercive,
    /// Forward-reflected-backward sweep, `n - 2` monotone Lipschitz forwards.
    Lipschitz,
    /// Reflection only where the forward operator is not cocoercive;
    /// `n - 1` forwards with the last one cocoercive.
    Mixed,
}

impl Mode {
    pub fn min_operators(self) -> usize {
        match self {
            Mode::Cocoercive => 2,
            Mode::Lipschitz | Mode::Mixed => 3,
        }
    }

    /// Number of forward operators for `n` resolvents.
    pub fn forward_count(self, n: usize) -> usize {
        match self {
            Mode::Cocoercive | Mode::Mixed => n - 1,
            Mode::Lipschitz => n - 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cocoercive => "cocoercive",
            Mode::Lipschitz => "lipschitz",
            Mode::Mixed => "mixed",
        })
    }
}

/// `A_1..A_n` and `B_1..B_m` on `ℝ^d`, with `m` fixed by the mode.
///
/// `resolvents[i]` holds `A_{i+1}` and `forwards[j]` holds `B_{j+1}`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    mode: Mode,
    dim: usize,
    resolvents: Vec<Arc<dyn Resolvent>>,
    forwards: Vec<Arc<dyn Forward>>,
}

impl ProblemInstance {
    pub fn new(mode: Mode, resolvents: Vec<Arc<dyn Resolvent>>, forwards: Vec<Arc<dyn Forward>>) -> Result<Self> {
        let n = resolvents.len();
        if n < mode.min_operators() {
            return Err(Error::InvalidProblem(format!(
                "{mode} mode needs at least {} resolvent operators, got {n}",
                mode.min_operators()
            )));
        }
        let m = mode.forward_count(n);
        if forwards.len() != m {
            return Err(Error::InvalidProblem(format!(
                "{mode} mode with n = {n} needs {m} forward operators, got {}",
                forwards.len()
            )));
        }
        let dim = resolvents[0].dim();
        for (i, a) in resolvents.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::InvalidProblem(format!("A_{} has dimension {}, expected {dim}", i + 1, a.dim())));
            }
        }
        for (j, b) in forwards.iter().enumerate() {
            if b.dim() != dim {
                return Err(Error::InvalidProblem(format!("B_{} has dimension {}, expected {dim}", j + 1, b.dim())));
            }
            if mode == Mode::Cocoercive && b.regularity() != Regularity::Cocoercive {
                return Err(Error::InvalidProblem(format!(
                    "B_{} is not declared cocoercive, which cocoercive mode requires",
                    j + 1
                )));
            }
        }
        if mode == Mode::Mixed && forwards[m - 1].regularity() != Regularity::Cocoercive {
            return Err(Error::InvalidProblem(format!(
                "mixed mode requires the last forward operator B_{m} to be cocoercive"
            )));
        }
        Ok(Self {
            mode,
            dim,
            resolvents,
            forwards,
        })
    }

    /// Convenience constructor from concrete catalog operators.
    pub fn from_ops(mode: Mode, resolvents: Vec<ResolventOp>, forwards: Vec<ForwardOp>) -> Result<Self> {
        Self::new(
            mode,
            resolvents.into_iter().map(|a| Arc::new(a) as Arc<dyn Resolvent>).collect(),
            forwards.into_iter().map(|b| Arc::new(b) as Arc<dyn Forward>).collect(),
        )
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of set-valued operators `n`.
    pub fn n(&self) -> usize {
        self.resolvents.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolvents(&self) -> &[Arc<dyn Resolvent>] {
        &self.resolvents
    }

    pub fn forwards(&self) -> &[Arc<dyn Forward>] {
        &self.forwards
    }

    /// `L = max_i L_i`, the constant used for step-size rules.
    pub fn lipschitz(&self) -> f64 {
        self.forwards.iter().map(|b| b.lipschitz()).fold(0.0, f64::max)
    }

    /// `B_j` (1-based) if present in this mode.
    pub(crate) fn forward(&self, j: usize) -> Option<&Arc<dyn Forward>> {
        if j == 0 {
            None
        } else {
            self.forwards.get(j - 1)
        }
    }

    /// Whether node `i` (1-based) receives the reflection built from `B_{i-2}`.
    pub(crate) fn reflects_into(&self, i: usize) -> bool {
        if i < 3 {
            return false;
        }
        match self.mode {
            Mode::Cocoercive => false,
            Mode::Lipschitz => true,
            Mode::Mixed => self
                .forward(i - 2)
                .is_some_and(|b| b.regularity() == Regularity::LipschitzMonotone),
        }
    }

    /// Whether node `i` (1-based) sends a reflected term to node `i + 1`.
    pub(crate) fn sends_reflection(&self, i: usize) -> bool {
        match self.mode {
            Mode::Cocoercive => false,
            Mode::Lipschitz | Mode::Mixed => (2..self.n()).contains(&i),
        }
    }

    /// The same operators under another mode; fails if the arity does not fit.
    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(mode, self.resolvents.clone(), self.forwards.clone())
    }
}
