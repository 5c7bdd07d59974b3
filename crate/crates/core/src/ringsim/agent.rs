use std::sync::Arc;

use crate::operators::{Forward, Resolvent, Vector};

/// Local state of one agent. Agent 1 owns `A_1` and `x_1`; agent `i ≥ 2`
/// owns `A_i`, `B_{i-1}` (when present), `z_{i-1}` and `x_i`.
#[derive(Clone, Debug)]
pub struct AgentState {
    pub(crate) id: usize,
    pub(crate) resolvent: Arc<dyn Resolvent>,
    pub(crate) forward: Option<Arc<dyn Forward>>,
    /// Whether the incoming reflected term enters this agent's update.
    pub(crate) uses_reflection: bool,
    /// Whether this agent sends a reflected term downstream.
    pub(crate) sends_reflection: bool,
    pub(crate) z: Option<Vector>,
    pub(crate) x: Option<Vector>,
    /// `B_{i-1}(x_{i-1})` from the latest round.
    pub(crate) forward_value: Option<Vector>,
    /// `‖z_{i-1}^{k+1} - z_{i-1}^k‖²` from the latest round.
    pub(crate) local_residual_sq: f64,
    /// Residual learned from the latest broadcast.
    pub(crate) known_residual_sq: Option<f64>,
    pub(crate) rounds_done: u64,
    pub(crate) halted: bool,
}

impl AgentState {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn resolvent(&self) -> &Arc<dyn Resolvent> {
        &self.resolvent
    }

    /// `B_{id-1}`, absent for agent 1 and for agent `n` in Lipschitz mode.
    pub fn forward(&self) -> Option<&Arc<dyn Forward>> {
        self.forward.as_ref()
    }

    /// `z_{id-1}`, absent for agent 1.
    pub fn z(&self) -> Option<&Vector> {
        self.z.as_ref()
    }

    pub fn x(&self) -> Option<&Vector> {
        self.x.as_ref()
    }

    pub fn known_residual_sq(&self) -> Option<f64> {
        self.known_residual_sq
    }

    pub fn rounds_done(&self) -> u64 {
        self.rounds_done
    }

    pub fn halted(&self) -> bool {
        self.halted
    }
}
